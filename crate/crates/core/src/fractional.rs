//! Gamma function and a Riemann-Liouville derivative of order `beta` in
//! `(0, 1)`.
//!
//! The derivative is evaluated through the identity
//! `D^b f(x) = D^b_C f(x) + f(0) x^{-b} / Gamma(1 - b)` with the Caputo part
//! `D^b_C` discretised by the L1 scheme on a uniform grid:
//!
//! ```text
//! D^b_C f(x_M) ~ tau^{-b} / Gamma(2 - b) * sum_{j=0}^{M-1} b_j (f(x_{M-j}) - f(x_{M-j-1}))
//! b_j = (j+1)^{1-b} - j^{1-b}
//! ```
//!
//! The scheme is exact for piecewise-linear `f` and converges as
//! `O(tau^{2-b})` for `f` in `C^2`.

use core::cell::Cell;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::preset::FunctionPreset;
use crate::{Error, Result};

pub const DEFAULT_GRID_STEP: f64 = 1e-3;
/// Upper bound on L1 grid points per evaluation.
pub const MAX_GRID_POINTS: f64 = 1e7;

// Lanczos coefficients for g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for `x > 0`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter {
            name: "gamma argument",
            value: x,
            expected: "finite x > 0",
        });
    }
    Ok(gamma_positive(x))
}

pub(crate) fn gamma_positive(x: f64) -> f64 {
    if x == libm::floor(x) && x <= 171.0 {
        return (1..x as u32).map(f64::from).product();
    }
    if x < 0.5 {
        // reflection
        return PI / (libm::sin(PI * x) * gamma_positive(1.0 - x));
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    // t^{z+1/2} split in halves so large arguments do not overflow early
    let half = libm::pow(t, 0.5 * (z + 0.5));
    libm::sqrt(2.0 * PI) * half * libm::exp(-t) * half * a
}

/// Exact Riemann-Liouville derivative of `t^p`:
/// `Gamma(p+1) / Gamma(p+1-b) * x^{p-b}`.
pub fn power_rule_oracle(p: f64, beta: f64, x: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            expected: "p >= 0",
        });
    }
    check_beta(beta)?;
    if !(x > 0.0) {
        return Err(Error::OutOfDomain {
            what: "fractional derivative point",
            detail: alloc::format!("x = {x}, need x > 0"),
        });
    }
    let denom_arg = p + 1.0 - beta;
    if denom_arg <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "p + 1 - beta",
            value: denom_arg,
            expected: "positive",
        });
    }
    Ok(gamma_positive(p + 1.0) / gamma_positive(denom_arg) * libm::pow(x, p - beta))
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            expected: "0 < beta < 1",
        })
    }
}

/// Order and grid step of the L1 discretisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracConfig {
    beta: f64,
    grid_step: f64,
}

impl FracConfig {
    pub fn new(beta: f64, grid_step: f64) -> Result<Self> {
        check_beta(beta)?;
        if !(grid_step > 0.0 && grid_step <= 0.1) {
            return Err(Error::InvalidParameter {
                name: "fractional grid step",
                value: grid_step,
                expected: "0 < h <= 0.1",
            });
        }
        Ok(Self { beta, grid_step })
    }

    /// Config with the default step `1e-3`.
    pub fn with_beta(beta: f64) -> Result<Self> {
        Self::new(beta, DEFAULT_GRID_STEP)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }
}

/// Riemann-Liouville derivative `D^b f(x)` for `x > 0`.
///
/// The grid on `[0, x]` has `M = ceil(x / h)` cells of width `x / M <= h`.
pub fn rl_derivative(cfg: &FracConfig, f: impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::OutOfDomain {
            what: "fractional derivative point",
            detail: alloc::format!("x = {x}, need x > 0"),
        });
    }
    let cells = libm::ceil(x / cfg.grid_step);
    if cells + 1.0 > MAX_GRID_POINTS {
        return Err(Error::InvalidParameter {
            name: "fractional grid points",
            value: cells + 1.0,
            expected: "at most 1e7 grid points",
        });
    }
    let beta = cfg.beta;
    let m = cells as usize;
    let tau = x / cells;
    let one_minus = 1.0 - beta;

    // Walk j = 0..M-1 with f(x_{M-j}) - f(x_{M-j-1}); x_i = i * tau.
    let mut sum = 0.0;
    let mut upper = f(x);
    let mut pow_j = 0.0; // j^{1-b}
    for j in 0..m {
        let i = m - j - 1;
        let lower = if i == 0 { f(0.0) } else { f(i as f64 * tau) };
        let pow_next = libm::pow((j + 1) as f64, one_minus);
        sum += (pow_next - pow_j) * (upper - lower);
        pow_j = pow_next;
        upper = lower;
    }
    let caputo = libm::pow(tau, -beta) / gamma_positive(2.0 - beta) * sum;
    let f0 = f(0.0);
    let initial = if f0 == 0.0 {
        0.0
    } else {
        f0 * libm::pow(x, -beta) / gamma_positive(one_minus)
    };
    Ok(caputo + initial)
}

/// [`rl_derivative`] of a preset; evaluation errors of the preset on
/// `[0, x]` are passed through.
pub fn rl_derivative_of(cfg: &FracConfig, f: &FunctionPreset, x: f64) -> Result<f64> {
    let failed: Cell<Option<Error>> = Cell::new(None);
    let v = rl_derivative(
        cfg,
        |t| match f.eval_1d(t) {
            Ok(v) => v,
            Err(e) => {
                failed.set(Some(e));
                0.0
            }
        },
        x,
    )?;
    match failed.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}
