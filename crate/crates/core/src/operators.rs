//! Basic, Kantorovich and fractional quasi-interpolation operators
//!
//! ```text
//! A_n(f; x) = sum_k f(k/n) Z(nx - k)
//! K_n(f; x) = sum_k (n^N int_{[k/n, (k+1)/n]^N} f) Z(nx - k)
//! Q_n(f; x) = sum_{k >= 1} D^b f(k/n) psi(nx - k) / S(x)
//! ```
//!
//! and the Voronovskaya correction
//! `sum_{1 <= |a| <= m} D^a f(x) / a! * M_a(x, n)`.
//!
//! All sums run over the truncated box `|k_i - n x_i| <= W` in ascending
//! lexicographic `k` order, so results do not depend on who calls them.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::fractional::{rl_derivative_of, FracConfig, DEFAULT_GRID_STEP};
use crate::kernel::{DensityKernel, MultiIndex};
use crate::preset::{FunctionPreset, Smoothness, MAX_DERIVATIVE_ORDER};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

pub const DEFAULT_QUADRATURE_NODES: usize = 5;
/// Largest correction order accepted by [`voronovskaya_correction`].
pub const MAX_CORRECTION_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum OperatorKind {
    Basic,
    Kantorovich,
    Fractional { beta: f64 },
}

/// Operator selection plus its discretisation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorConfig {
    pub kind: OperatorKind,
    pub n: u32,
    pub kernel: DensityKernel,
    /// Gauss-Legendre nodes per axis for Kantorovich cell averages.
    pub quadrature_nodes: usize,
    /// L1 grid step for the fractional derivative.
    pub fractional_step: f64,
}

impl OperatorConfig {
    pub fn new(kind: OperatorKind, n: u32, kernel: DensityKernel) -> Result<Self> {
        let cfg = Self {
            kind,
            n,
            kernel,
            quadrature_nodes: DEFAULT_QUADRATURE_NODES,
            fractional_step: DEFAULT_GRID_STEP,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_quadrature_nodes(mut self, nodes: usize) -> Result<Self> {
        self.quadrature_nodes = nodes;
        self.validate()?;
        Ok(self)
    }

    pub fn with_fractional_step(mut self, step: f64) -> Result<Self> {
        self.fractional_step = step;
        self.validate()?;
        Ok(self)
    }

    /// Same config at a different `n`.
    pub fn at(&self, n: u32) -> Result<Self> {
        let mut c = self.clone();
        c.n = n;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: 0.0,
                expected: "n >= 1",
            });
        }
        if self.quadrature_nodes < 2 {
            return Err(Error::InvalidParameter {
                name: "quadrature nodes",
                value: self.quadrature_nodes as f64,
                expected: "nodes >= 2",
            });
        }
        if let OperatorKind::Fractional { beta } = self.kind {
            FracConfig::new(beta, self.fractional_step)?;
        }
        Ok(())
    }

    /// Dispatches on `kind`. The fractional operator takes `x.len() == 1`.
    pub fn apply(&self, f: &FunctionPreset, x: &[f64]) -> Result<f64> {
        match self.kind {
            OperatorKind::Basic => apply_basic(self, f, x),
            OperatorKind::Kantorovich => apply_kantorovich(self, f, x),
            OperatorKind::Fractional { .. } => {
                if x.len() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        found: x.len(),
                    });
                }
                apply_fractional(self, f, x[0])
            }
        }
    }
}

/// Calls `visit(k, Z(nx - k))` for every `k` in the truncated box, in
/// ascending lexicographic order.
pub(crate) fn for_each_lattice_point(
    kernel: &DensityKernel,
    x: &[f64],
    n: u32,
    mut visit: impl FnMut(&[i64], f64) -> Result<()>,
) -> Result<()> {
    let nf = f64::from(n);
    let axes: Vec<Vec<(i64, f64)>> = x
        .iter()
        .map(|&xi| {
            let u = nf * xi;
            kernel
                .lattice_range(u)
                .map(|k| (k, kernel.psi(u - k as f64)))
                .collect()
        })
        .collect();
    let dim = axes.len();
    let mut idx = alloc::vec![0usize; dim];
    let mut k = alloc::vec![0i64; dim];
    loop {
        let mut z = 1.0;
        for d in 0..dim {
            let (kd, w) = axes[d][idx[d]];
            k[d] = kd;
            z *= w;
        }
        visit(&k, z)?;
        // odometer, last axis fastest
        let mut d = dim;
        loop {
            if d == 0 {
                return Ok(());
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}

fn check_point(f: &FunctionPreset, x: &[f64]) -> Result<()> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::OutOfDomain {
            what: "evaluation point",
            detail: alloc::format!("{x:?} is not finite"),
        });
    }
    Ok(())
}

/// `A_n(f; x)`.
pub fn apply_basic(cfg: &OperatorConfig, f: &FunctionPreset, x: &[f64]) -> Result<f64> {
    check_point(f, x)?;
    let nf = f64::from(cfg.n);
    let mut node = alloc::vec![0.0; x.len()];
    let mut sum = 0.0;
    for_each_lattice_point(&cfg.kernel, x, cfg.n, |k, z| {
        for (c, &ki) in node.iter_mut().zip(k) {
            *c = ki as f64 / nf;
        }
        sum += f.eval(&node)? * z;
        Ok(())
    })?;
    Ok(sum)
}

/// `K_n(f; x)` with tensor-product Gauss-Legendre cell averages.
pub fn apply_kantorovich(cfg: &OperatorConfig, f: &FunctionPreset, x: &[f64]) -> Result<f64> {
    check_point(f, x)?;
    let gl = GaussLegendre::new(cfg.quadrature_nodes)?;
    let dim = x.len();
    let nf = f64::from(cfg.n);
    // offsets within a unit cell and the matching weights (sum to 1)
    let offsets: Vec<f64> = gl.nodes.iter().map(|t| 0.5 * (1.0 + t)).collect();
    let weights: Vec<f64> = gl.weights.iter().map(|w| 0.5 * w).collect();
    let q = gl.len();
    let total = q.pow(dim as u32);
    let mut node = alloc::vec![0.0; dim];
    let mut sum = 0.0;
    for_each_lattice_point(&cfg.kernel, x, cfg.n, |k, z| {
        let mut avg = 0.0;
        for flat in 0..total {
            let mut rem = flat;
            let mut w = 1.0;
            for d in (0..dim).rev() {
                let j = rem % q;
                rem /= q;
                node[d] = (k[d] as f64 + offsets[j]) / nf;
                w *= weights[j];
            }
            avg += w * f.eval(&node)?;
        }
        sum += avg * z;
        Ok(())
    })?;
    Ok(sum)
}

/// `Q_n(f; x)` on the half-lattice `k >= 1` with renormalised weights.
///
/// `k = 0` is left out: the derivative at the origin only exists as a limit.
pub fn apply_fractional(cfg: &OperatorConfig, f: &FunctionPreset, x: f64) -> Result<f64> {
    let OperatorKind::Fractional { beta } = cfg.kind else {
        return Err(Error::InvalidParameter {
            name: "operator kind",
            value: 0.0,
            expected: "fractional",
        });
    };
    let frac = FracConfig::new(beta, cfg.fractional_step)?;
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: f.dim(),
        });
    }
    let nf = f64::from(cfg.n);
    fractional_sum(&cfg.kernel, cfg.n, x, |k| {
        rl_derivative_of(&frac, f, k as f64 / nf)
    })
}

/// Half-lattice sum `sum_{k >= 1} s(k) psi(nx - k) / sum_{k >= 1} psi(nx - k)`
/// with `s(k)` supplied by the caller.
pub fn fractional_sum(
    kernel: &DensityKernel,
    n: u32,
    x: f64,
    mut sample: impl FnMut(i64) -> Result<f64>,
) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::OutOfDomain {
            what: "fractional operator point",
            detail: alloc::format!("x = {x}, need x >= 0"),
        });
    }
    let u = f64::from(n) * x;
    let range = kernel.lattice_range(u);
    let lo = (*range.start()).max(1);
    let mut num = 0.0;
    let mut den = 0.0;
    for k in lo..=*range.end() {
        let w = kernel.psi(u - k as f64);
        num += sample(k)? * w;
        den += w;
    }
    if den <= 0.0 {
        return Err(Error::Diagnostic(alloc::format!(
            "no lattice weight on k >= 1 at x = {x}"
        )));
    }
    Ok(num / den)
}

fn check_correction_order(f: &FunctionPreset, m: usize) -> Result<()> {
    if !(1..=MAX_CORRECTION_ORDER).contains(&m) {
        return Err(Error::InvalidParameter {
            name: "correction order m",
            value: m as f64,
            expected: "1 <= m <= 4",
        });
    }
    if !f.smoothness().admits(m) {
        return Err(Error::DerivativeOrder {
            requested: m,
            available: alloc::format!("smoothness C^{}", f.smoothness()),
        });
    }
    Ok(())
}

/// Voronovskaya correction `sum_{1 <= |a| <= m} D^a f(x) / a! * M_a(x, n)`.
pub fn voronovskaya_correction(
    kernel: &DensityKernel,
    f: &FunctionPreset,
    x: &[f64],
    n: u32,
    m: usize,
) -> Result<f64> {
    check_correction_order(f, m)?;
    let parts = correction_by_order(kernel, f, x, n, m)?;
    Ok(parts.iter().sum())
}

/// `R_m = A_n(f; x) - f(x) - correction_m`; `m = 0` gives the plain error.
pub fn voronovskaya_residual(
    kernel: &DensityKernel,
    f: &FunctionPreset,
    x: &[f64],
    n: u32,
    m: usize,
) -> Result<f64> {
    Ok(residuals_up_to(kernel, f, x, n, m)?[m])
}

/// `[R_0, R_1, ..., R_m]` from one operator evaluation and one set of moments.
pub fn residuals_up_to(
    kernel: &DensityKernel,
    f: &FunctionPreset,
    x: &[f64],
    n: u32,
    m: usize,
) -> Result<Vec<f64>> {
    if m > 0 {
        check_correction_order(f, m)?;
    }
    let cfg = OperatorConfig::new(OperatorKind::Basic, n, *kernel)?;
    let base = apply_basic(&cfg, f, x)? - f.eval(x)?;
    let parts = correction_by_order(kernel, f, x, n, m)?;
    let mut out = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    out.push(base);
    for p in parts {
        acc += p;
        out.push(base - acc);
    }
    Ok(out)
}

// Per-order correction terms [order 1, ..., order m].
fn correction_by_order(
    kernel: &DensityKernel,
    f: &FunctionPreset,
    x: &[f64],
    n: u32,
    m: usize,
) -> Result<Vec<f64>> {
    check_point(f, x)?;
    debug_assert!(m <= MAX_DERIVATIVE_ORDER);
    // one-dimensional moments per axis, orders 0..=m
    let axis_moments: Vec<Vec<f64>> = x
        .iter()
        .map(|&xi| (0..=m as u32).map(|p| kernel.moment_1d(p, xi, n)).collect())
        .collect();
    let mut out = Vec::with_capacity(m);
    for order in 1..=m {
        let mut term = 0.0;
        for alpha in MultiIndex::of_order(x.len(), order) {
            let d = f.derivative(&alpha, x)?;
            let moment: f64 = alpha
                .entries()
                .iter()
                .enumerate()
                .map(|(axis, &p)| axis_moments[axis][p as usize])
                .product();
            term += d / alpha.factorial() * moment;
        }
        out.push(term);
    }
    Ok(out)
}

/// Smoothness-aware cap on the correction order for a preset.
pub fn max_correction_order(f: &FunctionPreset) -> usize {
    match f.smoothness() {
        Smoothness::Infinite => MAX_CORRECTION_ORDER,
        Smoothness::Finite(m) => (m as usize).min(MAX_CORRECTION_ORDER),
    }
}
