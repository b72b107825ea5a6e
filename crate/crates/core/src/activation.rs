//! The parametrized hyperbolic-tangent activation
//!
//! ```text
//! h(x) = (e^{ax} - q e^{-ax}) / ((1+q) e^{ax} + (1-q) e^{-ax})
//! ```
//!
//! restricted to `0 < q < 1`, `a > 0`. On that domain the denominator never
//! vanishes and `h` is a strictly increasing sigmoid with range
//! `(-q/(1-q), 1/(1+q))`.
//!
//! Note that `h` is *not* odd: `h(0) = (1-q)/2`. It is an affine image of
//! `tanh(a(x - x0))` centred at `x0 = ln((1-q)/(1+q)) / (2a)`.
//!
//! The derivative is `2a(1+q^2) / D(x)^2` with `D` the denominator above.
//! The frequently quoted numerator `2a(1-q^2)` does not match a direct
//! differentiation and fails a finite-difference check.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Validated `(q, alpha)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ActivationParams {
    q: f64,
    alpha: f64,
}

impl ActivationParams {
    pub fn new(q: f64, alpha: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q,
                expected: "0 < q < 1",
            });
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                expected: "finite alpha > 0",
            });
        }
        Ok(Self { q, alpha })
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Evaluates `h(x)`.
    ///
    /// For `x >= 0` numerator and denominator are divided by `e^{ax}`, for
    /// `x < 0` by `e^{-ax}`, so only `e^{-2a|x|} <= 1` is ever formed.
    pub fn eval(&self, x: f64) -> f64 {
        let q = self.q;
        let u = libm::exp(-2.0 * self.alpha * libm::fabs(x));
        if x >= 0.0 {
            (1.0 - q * u) / ((1.0 + q) + (1.0 - q) * u)
        } else {
            (u - q) / ((1.0 + q) * u + (1.0 - q))
        }
    }

    /// Analytic derivative `2a(1+q^2) / D(x)^2`.
    pub fn derivative(&self, x: f64) -> f64 {
        let (u, d) = self.scaled_denominator(x);
        2.0 * self.alpha * (1.0 + self.q * self.q) * u / (d * d)
    }

    /// `(inf h, sup h) = (-q/(1-q), 1/(1+q))`.
    pub fn limits(&self) -> (f64, f64) {
        (-self.q / (1.0 - self.q), 1.0 / (1.0 + self.q))
    }

    /// `sup |h|`, i.e. `max(1/(1+q), q/(1-q))`.
    pub fn bound(&self) -> f64 {
        let (lo, hi) = self.limits();
        hi.max(-lo)
    }

    /// Centre of symmetry `x0` of the sigmoid: `h(x0 + t) + h(x0 - t)` is
    /// constant in `t`.
    pub fn centre(&self) -> f64 {
        libm::log((1.0 - self.q) / (1.0 + self.q)) / (2.0 * self.alpha)
    }

    /// Returns `(e^{-2a|x|}, d)` with `D(x) = e^{a|x|} * d`.
    #[inline]
    pub(crate) fn scaled_denominator(&self, x: f64) -> (f64, f64) {
        let q = self.q;
        let u = libm::exp(-2.0 * self.alpha * libm::fabs(x));
        let d = if x >= 0.0 {
            (1.0 + q) + (1.0 - q) * u
        } else {
            (1.0 + q) * u + (1.0 - q)
        };
        (u, d)
    }
}

#[derive(Deserialize)]
struct RawParams {
    q: f64,
    alpha: f64,
}

impl TryFrom<RawParams> for ActivationParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ActivationParams::new(raw.q, raw.alpha)
    }
}

/// Free-function form of [`ActivationParams::eval`].
pub fn h_eval(params: &ActivationParams, x: f64) -> f64 {
    params.eval(x)
}

/// Free-function form of [`ActivationParams::derivative`].
pub fn h_derivative(params: &ActivationParams, x: f64) -> f64 {
    params.derivative(x)
}

/// Free-function form of [`ActivationParams::limits`].
pub fn h_limits(params: &ActivationParams) -> (f64, f64) {
    params.limits()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec;

    fn p(q: f64, a: f64) -> ActivationParams {
        ActivationParams::new(q, a).unwrap()
    }

    // Fourth-order central difference.
    fn central_diff(f: impl Fn(f64) -> f64, x: f64, step: f64) -> f64 {
        (-f(x + 2.0 * step) + 8.0 * f(x + step) - 8.0 * f(x - step) + f(x - 2.0 * step))
            / (12.0 * step)
    }

    #[test]
    fn rejects_out_of_domain_params() {
        for (q, a) in [
            (0.0, 1.0),
            (1.0, 1.0),
            (1.5, 1.0),
            (-0.2, 1.0),
            (0.5, 0.0),
            (0.5, -1.0),
        ] {
            assert!(ActivationParams::new(q, a).is_err(), "q={q} a={a}");
        }
        assert!(ActivationParams::new(f64::NAN, 1.0).is_err());
        assert!(ActivationParams::new(0.5, f64::INFINITY).is_err());
    }

    #[test]
    fn eval_examples() {
        let hp = p(0.5, 1.0);
        assert!((hp.eval(0.0) - 0.25).abs() < 1e-15);
        assert!((hp.eval(40.0) - 2.0 / 3.0).abs() < 1e-12);
        assert!((hp.eval(-40.0) + 1.0).abs() < 1e-12);
        // no overflow far out
        assert!((hp.eval(700.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((hp.eval(-1e6) + 1.0).abs() < 1e-15);
        assert!(hp.derivative(1e6).is_finite());
    }

    #[test]
    fn h_at_zero_is_not_odd() {
        for q in [0.1, 0.3, 0.5, 0.9] {
            let hp = p(q, 1.3);
            assert!((hp.eval(0.0) - (1.0 - q) / 2.0).abs() <= 1e-15);
            assert!(hp.eval(0.0) != 0.0);
        }
    }

    #[test]
    fn derivative_examples() {
        let hp = p(0.5, 1.0);
        assert!((hp.derivative(0.0) - 0.625).abs() < 1e-15);
        // the (1 - q^2) numerator would give 0.375 and disagrees with FD
        let fd = central_diff(|x| hp.eval(x), 0.0, 1e-3);
        assert!((fd - 0.625).abs() < 1e-9);
        assert!((fd - 0.375).abs() > 0.2);

        let hp = p(0.3, 2.0);
        let fd = central_diff(|x| hp.eval(x), 0.7, 1e-3);
        let an = hp.derivative(0.7);
        assert!(((an - fd) / an).abs() <= 1e-8);
    }

    #[test]
    fn derivative_matches_finite_differences_on_grid() {
        for &q in &[0.1, 0.3, 0.5, 0.9] {
            for &a in &[0.5, 1.0, 2.0] {
                let hp = p(q, a);
                for i in 0..1000 {
                    let x = -10.0 + 20.0 * (i as f64 + 0.5) / 1000.0;
                    let an = hp.derivative(x);
                    let fd = central_diff(|t| hp.eval(t), x, 1e-3);
                    assert!(an > 0.0);
                    assert!(
                        (an - fd).abs() / an.abs().max(1.0) <= 1e-8,
                        "q={q} a={a} x={x}"
                    );
                }
            }
        }
    }

    #[test]
    fn limits_examples() {
        let (lo, hi) = p(0.5, 1.0).limits();
        assert!((lo + 1.0).abs() < 1e-15 && (hi - 2.0 / 3.0).abs() < 1e-15);
        let (lo, hi) = p(1.0 / 3.0, 1.0).limits();
        assert!((lo + 0.5).abs() < 1e-15 && (hi - 0.75).abs() < 1e-15);
        let (lo, hi) = p(1e-12, 1.0).limits();
        assert!(lo.abs() < 1e-11 && (hi - 1.0).abs() < 1e-11);
    }

    #[test]
    fn monotone_and_within_range() {
        for &q in &[0.1, 0.3, 0.5, 0.9] {
            for &a in &[0.5, 1.0, 2.0] {
                let hp = p(q, a);
                let (lo, hi) = hp.limits();
                // stay inside the interval where h is resolvable from its limits
                let xs: Vec<f64> = (0..1000).map(|i| -20.0 + 40.0 * i as f64 / 999.0).collect();
                let span = 8.0 / a;
                for w in xs.windows(2) {
                    if (w[1] - hp.centre()).abs() < span && (w[0] - hp.centre()).abs() < span {
                        assert!(hp.eval(w[0]) < hp.eval(w[1]));
                    } else {
                        assert!(hp.eval(w[0]) <= hp.eval(w[1]));
                    }
                }
                for &x in &xs {
                    let v = hp.eval(x);
                    assert!(lo <= v && v <= hi);
                    if x.abs() < span {
                        assert!(lo < v && v < hi);
                    }
                }
            }
        }
    }

    #[test]
    fn centre_is_symmetry_point() {
        let hp = p(0.3, 1.7);
        let c = hp.centre();
        let s0 = hp.eval(c + 0.1) + hp.eval(c - 0.1);
        for t in [0.5, 1.0, 2.0] {
            assert!((hp.eval(c + t) + hp.eval(c - t) - s0).abs() < 1e-14);
        }
    }
}
