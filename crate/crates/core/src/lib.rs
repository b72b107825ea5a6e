//! Quasi-interpolation operators built from the parametrized hyperbolic
//! tangent `h(x) = (e^{ax} - q e^{-ax}) / ((1+q) e^{ax} + (1-q) e^{-ax})`.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerics:
//!
//! * [`activation`] evaluates the activation, its derivative and its limits.
//! * [`kernel`] builds the partition-of-unity density `psi`, the product
//!   kernel `Z` and the discrete moments `M_alpha(x, n)`.
//! * [`operators`] implements the basic, Kantorovich and fractional
//!   operators and the Voronovskaya correction sum.
//! * [`fractional`] provides the Gamma function and a Riemann-Liouville
//!   derivative of order `beta` in `(0, 1)`.
//! * [`manifold`] holds chart presets (Euclidean, flat torus, Poincare
//!   half-plane) and the metric-weighted operator.
//! * [`analysis`] measures sup-norm errors and fits log-log convergence
//!   slopes.
//!
//! File formats, report serialization and the command line live in the
//! `qinterp` companion crate.
#![no_std]
// `!(x > 0.0)` rejects NaN alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod activation;
pub mod analysis;
mod error;
pub mod fractional;
pub mod kernel;
pub mod manifold;
pub mod operators;
pub mod preset;
pub mod quadrature;

pub use activation::ActivationParams;
pub use analysis::{ConvergenceReport, EvalGrid, ReportRow};
pub use error::Error;
pub use fractional::{gamma_fn, power_rule_oracle, rl_derivative, FracConfig};
pub use kernel::{DensityKernel, MultiIndex};
pub use manifold::{Chart, ChartKind, MetricKernel, Renormalization};
pub use operators::{OperatorConfig, OperatorKind};
pub use preset::{FunctionPreset, Smoothness};

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
