//! Experiment configuration: file schema, flag merging and validation.
//!
//! Precedence: command-line flags override config-file values, which
//! override per-command defaults.

use std::fmt;
use std::path::{Path, PathBuf};

use qinterp_core::analysis::DEFAULT_SWEEP;
use qinterp_core::fractional::DEFAULT_GRID_STEP;
use qinterp_core::kernel::DEFAULT_TRUNCATION_TOLERANCE;
use qinterp_core::operators::DEFAULT_QUADRATURE_NODES;
use qinterp_core::{
    ActivationParams, ChartKind, DensityKernel, EvalGrid, FracConfig, FunctionPreset,
    Renormalization,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Converge,
    Voronovskaya,
    Frac,
    KernelDump,
    Manifold,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Converge => "converge",
            Command::Voronovskaya => "voronovskaya",
            Command::Frac => "frac",
            Command::KernelDump => "kernel-dump",
            Command::Manifold => "manifold",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OperatorChoice {
    Basic,
    Kantorovich,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// CSV sweep table plus JSON report sidecar.
    Csv,
    /// JSON report only.
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeChoice {
    Discrete,
    AnalyticFlat,
}

impl From<ModeChoice> for Renormalization {
    fn from(m: ModeChoice) -> Self {
        match m {
            ModeChoice::Discrete => Renormalization::Discrete,
            ModeChoice::AnalyticFlat => Renormalization::AnalyticFlat,
        }
    }
}

/// Config file schema (JSON). Every field is optional; unknown keys are
/// rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frac_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub renormalization: Option<ModeChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_lo: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_hi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($field:ident),* $(,)?) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::ConfigParse {
            path: path.to_owned(),
            source,
        })
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(&mut self, other: &ExperimentConfig) {
        overlay!(self, other; command, q, alpha, operator, beta, quadrature_nodes, frac_step,
            preset, chart, renormalization, n, grid_lo, grid_hi, grid_points,
            truncation_tolerance, m_max, output, format);
    }

    /// Applies per-command defaults and validates every field.
    pub fn resolve(&self) -> Result<Settings, CliError> {
        let command = self
            .command
            .ok_or_else(|| CliError::Invalid("no command given".into()))?;
        let q = self.q.unwrap_or(0.5);
        let alpha = self.alpha.unwrap_or(1.0);
        let activation = ActivationParams::new(q, alpha)?;
        let tolerance = self
            .truncation_tolerance
            .unwrap_or(DEFAULT_TRUNCATION_TOLERANCE);
        DensityKernel::with_tolerance(activation, tolerance)?;

        let preset = match (&self.preset, command) {
            (Some(p), _) => Some(p.clone()),
            (None, Command::KernelDump) => None,
            (None, _) => return Err(CliError::MissingFlag("preset")),
        };
        let preset_fn = preset
            .as_deref()
            .map(FunctionPreset::from_name)
            .transpose()?;

        let chart = self
            .chart
            .clone()
            .unwrap_or_else(|| "poincare-half-plane".into());
        ChartKind::from_name(&chart)?;

        let beta = match (self.beta, command) {
            (Some(b), _) => Some(b),
            (None, Command::Frac) => return Err(CliError::MissingFlag("beta")),
            (None, _) => None,
        };
        let frac_step = self.frac_step.unwrap_or(DEFAULT_GRID_STEP);
        if let Some(b) = beta {
            FracConfig::new(b, frac_step)?;
        }

        let n = self.n.clone().unwrap_or_else(|| match command {
            Command::Manifold => vec![32, 64, 128, 256],
            _ => DEFAULT_SWEEP.to_vec(),
        });
        if n.is_empty() || n.contains(&0) {
            return Err(CliError::Invalid("--n must list positive integers".into()));
        }

        let dim = match command {
            Command::Manifold | Command::Converge | Command::Voronovskaya => {
                preset_fn.as_ref().map_or(1, FunctionPreset::dim)
            }
            _ => 1,
        };
        let (def_lo, def_hi, def_points) = match command {
            Command::Frac => (vec![0.2], vec![1.0], 101),
            Command::Manifold if chart == "poincare-half-plane" => {
                (vec![-1.0, 1.0], vec![1.0, 2.0], 21)
            }
            Command::Manifold => (
                vec![0.0; dim],
                vec![1.0; dim],
                if dim == 1 { 101 } else { 21 },
            ),
            _ => (
                vec![0.0; dim],
                vec![1.0; dim],
                if dim == 1 { 101 } else { 21 },
            ),
        };
        let grid_lo = self.grid_lo.clone().unwrap_or(def_lo);
        let grid_hi = self.grid_hi.clone().unwrap_or(def_hi);
        let grid_points = self.grid_points.unwrap_or(def_points);
        let grid = EvalGrid::new(grid_lo.clone(), grid_hi.clone(), grid_points)?;
        if grid.dim() != dim {
            return Err(CliError::Invalid(format!(
                "grid has {} axes but the preset is {dim}-dimensional",
                grid.dim()
            )));
        }

        let quadrature_nodes = self.quadrature_nodes.unwrap_or(DEFAULT_QUADRATURE_NODES);
        if !(2..=64).contains(&quadrature_nodes) {
            return Err(CliError::Invalid("--nodes must be between 2 and 64".into()));
        }
        let m_max = self.m_max.unwrap_or(2);
        if !(1..=4).contains(&m_max) {
            return Err(CliError::Invalid("--m-max must be between 1 and 4".into()));
        }

        Ok(Settings {
            command,
            q,
            alpha,
            operator: self.operator.unwrap_or(OperatorChoice::Basic),
            beta,
            quadrature_nodes,
            frac_step,
            preset,
            chart,
            renormalization: self.renormalization.unwrap_or(ModeChoice::Discrete),
            n,
            grid_lo,
            grid_hi,
            grid_points,
            truncation_tolerance: tolerance,
            m_max,
            output: self
                .output
                .clone()
                .unwrap_or_else(|| PathBuf::from(command.name())),
            format: self.format.unwrap_or(OutputFormat::Csv),
        })
    }
}

/// Fully resolved, validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub command: Command,
    pub q: f64,
    pub alpha: f64,
    pub operator: OperatorChoice,
    pub beta: Option<f64>,
    pub quadrature_nodes: usize,
    pub frac_step: f64,
    pub preset: Option<String>,
    pub chart: String,
    pub renormalization: ModeChoice,
    pub n: Vec<u32>,
    pub grid_lo: Vec<f64>,
    pub grid_hi: Vec<f64>,
    pub grid_points: usize,
    pub truncation_tolerance: f64,
    pub m_max: usize,
    pub output: PathBuf,
    pub format: OutputFormat,
}

impl Settings {
    /// Config that resolves back to `self`.
    pub fn to_config(&self) -> ExperimentConfig {
        ExperimentConfig {
            command: Some(self.command),
            q: Some(self.q),
            alpha: Some(self.alpha),
            operator: Some(self.operator),
            beta: self.beta,
            quadrature_nodes: Some(self.quadrature_nodes),
            frac_step: Some(self.frac_step),
            preset: self.preset.clone(),
            chart: Some(self.chart.clone()),
            renormalization: Some(self.renormalization),
            n: Some(self.n.clone()),
            grid_lo: Some(self.grid_lo.clone()),
            grid_hi: Some(self.grid_hi.clone()),
            grid_points: Some(self.grid_points),
            truncation_tolerance: Some(self.truncation_tolerance),
            m_max: Some(self.m_max),
            output: Some(self.output.clone()),
            format: Some(self.format),
        }
    }

    pub fn kernel(&self) -> Result<DensityKernel, CliError> {
        Ok(DensityKernel::with_tolerance(
            ActivationParams::new(self.q, self.alpha)?,
            self.truncation_tolerance,
        )?)
    }

    pub fn grid(&self) -> Result<EvalGrid, CliError> {
        Ok(EvalGrid::new(
            self.grid_lo.clone(),
            self.grid_hi.clone(),
            self.grid_points,
        )?)
    }

    pub fn preset_fn(&self) -> Result<FunctionPreset, CliError> {
        let name = self
            .preset
            .as_deref()
            .ok_or(CliError::MissingFlag("preset"))?;
        Ok(FunctionPreset::from_name(name)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let r: Result<ExperimentConfig, _> = serde_json::from_str(r#"{"q": 0.5, "qq": 1}"#);
        assert!(r.is_err());
    }

    #[test]
    fn overlay_prefers_flags() {
        let mut file = ExperimentConfig {
            q: Some(0.3),
            alpha: Some(2.0),
            ..Default::default()
        };
        let flags = ExperimentConfig {
            q: Some(0.7),
            ..Default::default()
        };
        file.overlay(&flags);
        assert_eq!(file.q, Some(0.7));
        assert_eq!(file.alpha, Some(2.0));
    }

    #[test]
    fn missing_preset_is_reported() {
        let cfg = ExperimentConfig {
            command: Some(Command::Converge),
            ..Default::default()
        };
        let err = cfg.resolve().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("--preset"));
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = ExperimentConfig {
            command: Some(Command::Manifold),
            preset: Some("sin-exp".into()),
            ..Default::default()
        };
        let s = cfg.resolve().unwrap();
        let text = serde_json::to_string(&s.to_config()).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.resolve().unwrap(), s);
        assert_eq!(s.grid_lo, vec![-1.0, 1.0]);
    }

    #[test]
    fn domain_violations_rejected() {
        for cfg in [
            ExperimentConfig {
                q: Some(1.5),
                ..base()
            },
            ExperimentConfig {
                alpha: Some(0.0),
                ..base()
            },
            ExperimentConfig {
                n: Some(vec![16, 0]),
                ..base()
            },
            ExperimentConfig {
                truncation_tolerance: Some(2.0),
                ..base()
            },
            ExperimentConfig {
                grid_lo: Some(vec![0.0, 0.0]),
                ..base()
            },
            ExperimentConfig {
                preset: Some("nope".into()),
                ..base()
            },
            ExperimentConfig {
                m_max: Some(7),
                ..base()
            },
        ] {
            assert_eq!(cfg.resolve().unwrap_err().exit_code(), 2, "{cfg:?}");
        }
    }

    fn base() -> ExperimentConfig {
        ExperimentConfig {
            command: Some(Command::Converge),
            preset: Some("sin".into()),
            ..Default::default()
        }
    }
}
