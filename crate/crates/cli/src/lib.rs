//! Batch experiment runner for `qinterp-core`.
//!
//! Owns everything that touches `std`: argument and config-file parsing,
//! CSV and JSON report files, and the mapping from failures to exit codes.

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{Command, ExperimentConfig, OutputFormat};
pub use error::CliError;
pub use run::{execute, Outcome};
