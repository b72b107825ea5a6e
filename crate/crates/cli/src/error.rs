use std::path::PathBuf;

use qinterp_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("missing required flag --{0}")]
    MissingFlag(&'static str),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for invalid configuration, 3 for numerical diagnostics, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::ConfigRead { .. } => 4,
            CliError::Core(e) => match e.root() {
                CoreError::Diagnostic(_) | CoreError::InsufficientData { .. } => 3,
                _ => 2,
            },
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            3 => "numerical-diagnostic",
            4 => "io",
            _ => "invalid-config",
        }
    }

    /// Single-line JSON error record for stderr.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "status": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}
