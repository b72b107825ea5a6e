use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors raised by construction and evaluation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside its admissible domain.
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// Vector length does not match the configured dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// Evaluation point outside the domain of a function or chart.
    OutOfDomain { what: &'static str, detail: String },
    /// Requested derivative order is above what the preset provides.
    DerivativeOrder { requested: usize, available: String },
    /// Too few usable rows to fit a convergence slope.
    InsufficientData { usable: usize, required: usize },
    /// A numerical procedure failed its own convergence check.
    Diagnostic(String),
    /// Unknown preset or chart name.
    UnknownName { kind: &'static str, name: String },
    /// An error raised while evaluating at a specific grid point.
    AtPoint { point: Vec<f64>, source: Box<Error> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                expected,
            } => write!(f, "invalid {name} = {value}: expected {expected}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::OutOfDomain { what, detail } => write!(f, "{what} out of domain: {detail}"),
            Error::DerivativeOrder {
                requested,
                available,
            } => write!(
                f,
                "derivative of order {requested} requested, preset provides {available}"
            ),
            Error::InsufficientData { usable, required } => write!(
                f,
                "need at least {required} rows with positive error to fit, got {usable}"
            ),
            Error::Diagnostic(msg) => write!(f, "numerical diagnostic failure: {msg}"),
            Error::UnknownName { kind, name } => write!(f, "unknown {kind} '{name}'"),
            Error::AtPoint { point, source } => write!(f, "at x = {point:?}: {source}"),
        }
    }
}

impl Error {
    /// Strips [`Error::AtPoint`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPoint { source, .. } => source.root(),
            other => other,
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::AtPoint { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}
