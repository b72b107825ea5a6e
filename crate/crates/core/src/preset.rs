//! Test functions with analytic derivatives up to order four.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::kernel::MultiIndex;
use crate::{Error, Result};

/// Highest derivative order any preset provides.
pub const MAX_DERIVATIVE_ORDER: usize = 4;

/// Smoothness class `C^m` of a preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Smoothness {
    Finite(u32),
    Infinite,
}

impl Smoothness {
    pub fn admits(&self, order: usize) -> bool {
        match self {
            Smoothness::Infinite => true,
            Smoothness::Finite(m) => order <= *m as usize,
        }
    }
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Smoothness::Finite(m) => write!(f, "{m}"),
            Smoothness::Infinite => f.write_str("inf"),
        }
    }
}

/// Evaluable test function.
///
/// One-dimensional presets take a single coordinate; `SinExp` and
/// `Quadratic2d` are functions of `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionPreset {
    /// Polynomial with ascending coefficients.
    Polynomial {
        name: String,
        coeffs: Vec<f64>,
    },
    Sin,
    Exp,
    /// `1 / (1 + 25 t^2)`.
    Runge,
    /// `|t - c|^p`, in `C^floor(p)` only.
    AbsPower {
        centre: f64,
        exponent: f64,
    },
    /// `t^p` on `t >= 0`.
    Power(f64),
    /// `sin(x) e^{-y}`.
    SinExp,
    /// `x^2 + x y + y^2`.
    Quadratic2d,
}

/// Every name accepted by [`FunctionPreset::from_name`] (`pow<p>` takes
/// any real `p >= 0`).
pub const PRESET_NAMES: &[&str] = &[
    "zero",
    "constant",
    "linear",
    "quadratic",
    "cubic",
    "sin",
    "exp",
    "runge",
    "abspow",
    "pow<p>",
    "sin-exp",
    "quadratic-2d",
];

impl FunctionPreset {
    pub fn from_name(name: &str) -> Result<Self> {
        let poly = |coeffs: &[f64]| FunctionPreset::Polynomial {
            name: String::from(name),
            coeffs: coeffs.to_vec(),
        };
        Ok(match name {
            "constant" => poly(&[1.0]),
            "zero" => poly(&[0.0]),
            "linear" => poly(&[0.0, 1.0]),
            "quadratic" => poly(&[1.0, -1.0, 2.0]),
            "cubic" => poly(&[0.0, -1.0, 0.0, 1.0]),
            "sin" => FunctionPreset::Sin,
            "exp" => FunctionPreset::Exp,
            "runge" => FunctionPreset::Runge,
            "abspow" => FunctionPreset::AbsPower {
                centre: 0.5,
                exponent: 2.5,
            },
            "sin-exp" => FunctionPreset::SinExp,
            "quadratic-2d" => FunctionPreset::Quadratic2d,
            other => match other.strip_prefix("pow").map(str::parse::<f64>) {
                Some(Ok(p)) if p >= 0.0 && p.is_finite() => FunctionPreset::Power(p),
                _ => {
                    return Err(Error::UnknownName {
                        kind: "preset",
                        name: String::from(other),
                    })
                }
            },
        })
    }

    /// Constant function `c`.
    pub fn constant(c: f64) -> Self {
        FunctionPreset::Polynomial {
            name: format!("constant({c})"),
            coeffs: alloc::vec![c],
        }
    }

    pub fn name(&self) -> String {
        match self {
            FunctionPreset::Polynomial { name, .. } => name.clone(),
            FunctionPreset::Sin => "sin".into(),
            FunctionPreset::Exp => "exp".into(),
            FunctionPreset::Runge => "runge".into(),
            FunctionPreset::AbsPower { centre, exponent } if *centre == 0.5 && *exponent == 2.5 => {
                "abspow".into()
            }
            FunctionPreset::AbsPower { centre, exponent } => format!("abspow({centre},{exponent})"),
            FunctionPreset::Power(p) => format!("pow{p}"),
            FunctionPreset::SinExp => "sin-exp".into(),
            FunctionPreset::Quadratic2d => "quadratic-2d".into(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FunctionPreset::SinExp | FunctionPreset::Quadratic2d => 2,
            _ => 1,
        }
    }

    pub fn smoothness(&self) -> Smoothness {
        match self {
            FunctionPreset::AbsPower { exponent, .. } => {
                Smoothness::Finite(libm::floor(*exponent) as u32)
            }
            FunctionPreset::Power(p) if *p != libm::floor(*p) => {
                Smoothness::Finite(libm::floor(*p) as u32)
            }
            _ => Smoothness::Infinite,
        }
    }

    /// Human-readable domain restriction, if any.
    pub fn domain_note(&self) -> &'static str {
        match self {
            FunctionPreset::Power(p) if *p != libm::floor(*p) => "t >= 0",
            FunctionPreset::Power(_) => "t >= 0 for fractional use",
            FunctionPreset::SinExp | FunctionPreset::Quadratic2d => "R^2",
            _ => "R",
        }
    }

    /// Exponent `p` when the preset is a pure power `t^p`.
    pub fn power_exponent(&self) -> Option<f64> {
        match self {
            FunctionPreset::Power(p) => Some(*p),
            FunctionPreset::Polynomial { coeffs, .. } => {
                let nz: Vec<usize> = (0..coeffs.len()).filter(|&i| coeffs[i] != 0.0).collect();
                match nz.as_slice() {
                    [i] if coeffs[*i] == 1.0 => Some(*i as f64),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// `true` when the preset is identically zero.
    pub fn is_zero(&self) -> bool {
        matches!(self, FunctionPreset::Polynomial { coeffs, .. } if coeffs.iter().all(|&c| c == 0.0))
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        match self {
            FunctionPreset::SinExp => Ok(libm::sin(x[0]) * libm::exp(-x[1])),
            FunctionPreset::Quadratic2d => Ok(x[0] * x[0] + x[0] * x[1] + x[1] * x[1]),
            _ => self.eval_1d(x[0]),
        }
    }

    /// One-dimensional evaluation.
    pub fn eval_1d(&self, t: f64) -> Result<f64> {
        self.derivative_1d(0, t)
    }

    /// `D^a f(x)` for `|a| <= 4`, within the preset's smoothness.
    pub fn derivative(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        if alpha.dim() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: alpha.dim(),
            });
        }
        let order = alpha.order();
        self.check_order(order)?;
        let a = alpha.entries();
        match self {
            FunctionPreset::SinExp => {
                let sign_y = if a[1].is_multiple_of(2) { 1.0 } else { -1.0 };
                Ok(sin_derivative(a[0], x[0]) * sign_y * libm::exp(-x[1]))
            }
            FunctionPreset::Quadratic2d => Ok(match (a[0], a[1]) {
                (0, 0) => x[0] * x[0] + x[0] * x[1] + x[1] * x[1],
                (1, 0) => 2.0 * x[0] + x[1],
                (0, 1) => x[0] + 2.0 * x[1],
                (2, 0) | (0, 2) => 2.0,
                (1, 1) => 1.0,
                _ => 0.0,
            }),
            _ => self.derivative_1d(a[0] as usize, x[0]),
        }
    }

    fn check_order(&self, order: usize) -> Result<()> {
        if order > MAX_DERIVATIVE_ORDER || !self.smoothness().admits(order) {
            let cap = match self.smoothness() {
                Smoothness::Infinite => MAX_DERIVATIVE_ORDER,
                Smoothness::Finite(m) => (m as usize).min(MAX_DERIVATIVE_ORDER),
            };
            return Err(Error::DerivativeOrder {
                requested: order,
                available: format!("orders up to {cap}"),
            });
        }
        Ok(())
    }

    /// `f^{(k)}(t)` for one-dimensional presets.
    pub fn derivative_1d(&self, k: usize, t: f64) -> Result<f64> {
        if self.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: 1,
            });
        }
        self.check_order(k)?;
        Ok(match self {
            FunctionPreset::Polynomial { coeffs, .. } => poly_derivative(coeffs, k, t),
            FunctionPreset::Sin => sin_derivative(k as u32, t),
            FunctionPreset::Exp => libm::exp(t),
            FunctionPreset::Runge => runge_derivative(k, t),
            FunctionPreset::AbsPower { centre, exponent } => {
                let d = t - centre;
                let s = if d < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
                falling(*exponent, k) * s * libm::pow(libm::fabs(d), exponent - k as f64)
            }
            FunctionPreset::Power(p) => {
                if t < 0.0 && *p != libm::floor(*p) {
                    return Err(Error::OutOfDomain {
                        what: "power preset argument",
                        detail: format!("t = {t}, need t >= 0"),
                    });
                }
                let c = falling(*p, k);
                if c == 0.0 {
                    0.0
                } else {
                    c * libm::pow(t, p - k as f64)
                }
            }
            FunctionPreset::SinExp | FunctionPreset::Quadratic2d => unreachable!(),
        })
    }
}

// p (p-1) ... (p-k+1)
fn falling(p: f64, k: usize) -> f64 {
    (0..k).map(|i| p - i as f64).product()
}

fn poly_derivative(coeffs: &[f64], k: usize, t: f64) -> f64 {
    // Horner over the k-th derivative coefficients
    let mut acc = 0.0;
    for (i, &c) in coeffs.iter().enumerate().skip(k).rev() {
        acc = acc * t + c * falling(i as f64, k);
    }
    acc
}

fn sin_derivative(k: u32, t: f64) -> f64 {
    match k % 4 {
        0 => libm::sin(t),
        1 => libm::cos(t),
        2 => -libm::sin(t),
        _ => -libm::cos(t),
    }
}

// 1/(1+a^2 t^2) = Re[1/(1 + i a t)], so
// f^{(k)} = Re[(-1)^k k! (i a)^k (1 + i a t)^{-(k+1)}].
fn runge_derivative(k: usize, t: f64) -> f64 {
    const A: f64 = 5.0;
    let w = (1.0, A * t);
    let norm = w.0 * w.0 + w.1 * w.1;
    let inv = (w.0 / norm, -w.1 / norm);
    let mut acc = inv;
    for _ in 0..k {
        acc = cmul(acc, inv);
    }
    // (i a)^k
    let mut ia = (1.0, 0.0);
    for _ in 0..k {
        ia = cmul(ia, (0.0, A));
    }
    let r = cmul(acc, ia);
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * fact * r.0
}

#[inline]
fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}
