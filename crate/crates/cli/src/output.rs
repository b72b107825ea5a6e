//! CSV and JSON report files.
//!
//! CSV numbers use 17 significant digits in scientific notation (`{:.16e}`),
//! `.` as decimal separator and LF line endings, so identical inputs give
//! byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qinterp_core::ConvergenceReport;
use serde::Serialize;

use crate::error::CliError;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV table of string cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// `n,sup_error,mean_error` rows of a report.
pub fn sweep_table(report: &ConvergenceReport) -> Table {
    let mut t = Table::new(&["n", "sup_error", "mean_error"]);
    for r in &report.rows {
        t.push(vec![
            r.n.to_string(),
            fmt_f64(r.sup_error),
            fmt_f64(r.mean_error),
        ]);
    }
    t
}

/// `m,n,sup_error,mean_error` rows for a list of residual reports.
pub fn residual_table(reports: &[ConvergenceReport]) -> Table {
    let mut t = Table::new(&["m", "n", "sup_error", "mean_error"]);
    for (m, rep) in reports.iter().enumerate() {
        for r in &rep.rows {
            t.push(vec![
                m.to_string(),
                r.n.to_string(),
                fmt_f64(r.sup_error),
                fmt_f64(r.mean_error),
            ]);
        }
    }
    t
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn report_from_json(text: &str) -> Result<ConvergenceReport, serde_json::Error> {
    serde_json::from_str(text)
}

/// `<stem>.<ext>`, keeping any directories of the stem.
pub fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| CliError::Io {
            path: parent.to_owned(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// One-line summary of a report for stdout.
pub fn summary_line(label: &str, report: &ConvergenceReport) -> String {
    let mut s = String::new();
    let _ = write!(s, "{label}: target = {}", report.target_description);
    match (report.fitted_slope, report.r_squared) {
        (Some(slope), Some(r2)) => {
            let _ = write!(s, ", fitted slope = {slope:.4}, r^2 = {r2:.5}");
        }
        _ => s.push_str(", fit skipped"),
    }
    s
}
