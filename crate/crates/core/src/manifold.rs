//! Chart presets and the metric-weighted operator.
//!
//! Every preset uses the identity coordinate map, so a point is given by
//! its chart coordinates directly. Lattice nodes `k/n` live in the same
//! coordinates.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::activation::ActivationParams;
use crate::kernel::DensityKernel;
use crate::operators::for_each_lattice_point;
use crate::preset::FunctionPreset;
use crate::quadrature::simpson_weights;
use crate::{Error, Result};

/// Names accepted by [`ChartKind::from_name`].
pub const CHART_NAMES: &[&str] = &["euclidean", "torus", "poincare-half-plane"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartKind {
    /// `g = I` on `R^N`.
    Euclidean,
    /// `g = I` with period 1 on every axis.
    Torus,
    /// `g = y^{-2} I` on `{(x, y) : y > 0}`.
    PoincareHalfPlane,
}

impl ChartKind {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "euclidean" => Ok(ChartKind::Euclidean),
            "torus" => Ok(ChartKind::Torus),
            "poincare-half-plane" => Ok(ChartKind::PoincareHalfPlane),
            other => Err(Error::UnknownName {
                kind: "chart",
                name: String::from(other),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChartKind::Euclidean => "euclidean",
            ChartKind::Torus => "torus",
            ChartKind::PoincareHalfPlane => "poincare-half-plane",
        }
    }
}

/// A chart preset of fixed dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    kind: ChartKind,
    dim: usize,
}

impl Chart {
    pub fn new(kind: ChartKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "chart dimension",
                value: 0.0,
                expected: "dim >= 1",
            });
        }
        if kind == ChartKind::PoincareHalfPlane && dim != 2 {
            return Err(Error::InvalidParameter {
                name: "chart dimension",
                value: dim as f64,
                expected: "dim = 2 for the half-plane",
            });
        }
        Ok(Self { kind, dim })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(ChartKind::Euclidean, dim)
    }

    pub fn torus(dim: usize) -> Result<Self> {
        Self::new(ChartKind::Torus, dim)
    }

    pub fn poincare_half_plane() -> Self {
        Self {
            kind: ChartKind::PoincareHalfPlane,
            dim: 2,
        }
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Coordinate box of the chart domain, per axis `(lo, hi)`.
    /// The half-plane's lower `y` bound is open.
    pub fn domain(&self) -> Vec<(f64, f64)> {
        match self.kind {
            ChartKind::Euclidean => alloc::vec![(f64::NEG_INFINITY, f64::INFINITY); self.dim],
            ChartKind::Torus => alloc::vec![(0.0, 1.0); self.dim],
            ChartKind::PoincareHalfPlane => {
                alloc::vec![(f64::NEG_INFINITY, f64::INFINITY), (0.0, f64::INFINITY)]
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x.iter().all(|v| v.is_finite())
            && match self.kind {
                ChartKind::PoincareHalfPlane => x[1] > 0.0,
                _ => true,
            }
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        if !self.contains(x) {
            return Err(Error::OutOfDomain {
                what: "chart point",
                detail: alloc::format!("{x:?} outside the {} chart", self.name()),
            });
        }
        Ok(())
    }

    /// Chart coordinates of `x`; the torus wraps into `[0, 1)`.
    pub fn coordinates(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(match self.kind {
            ChartKind::Torus => x.iter().map(|v| v - libm::floor(*v)).collect(),
            _ => x.to_vec(),
        })
    }

    /// Metric components `g_ij(x)`, row-major `N x N`.
    pub fn metric(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        let n = self.dim;
        let scale = match self.kind {
            ChartKind::PoincareHalfPlane => 1.0 / (x[1] * x[1]),
            _ => 1.0,
        };
        let mut g = alloc::vec![0.0; n * n];
        for i in 0..n {
            g[i * n + i] = scale;
        }
        Ok(g)
    }

    /// `sqrt(det g(x))` in closed form.
    pub fn sqrt_det_g(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(match self.kind {
            ChartKind::PoincareHalfPlane => 1.0 / (x[1] * x[1]),
            _ => 1.0,
        })
    }
}

/// `prod_i h(c_i)` over the chart coordinates `c` of `x`.
pub fn localized_activation(chart: &Chart, params: &ActivationParams, x: &[f64]) -> Result<f64> {
    Ok(chart
        .coordinates(x)?
        .iter()
        .map(|&c| params.eval(c))
        .product())
}

/// How lattice weights are normalised on a chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Renormalization {
    /// Weights `Z(nx - k)` as on flat space. The `1/sqrt(det g)` factor of
    /// the density cancels against the volume element, so the telescoping
    /// normalisation is kept.
    AnalyticFlat,
    /// Weights `Z(nx - k) / sqrt(det g(k/n))` divided by their sum.
    Discrete,
}

/// Density kernel attached to a chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricKernel {
    pub kernel: DensityKernel,
    pub chart: Chart,
    pub mode: Renormalization,
}

const VOLUME_MIN_NODES: usize = 129;
const VOLUME_MAX_EVALUATIONS: usize = 1 << 24;
const VOLUME_REL_TOL: f64 = 1e-8;

impl MetricKernel {
    pub fn new(kernel: DensityKernel, chart: Chart, mode: Renormalization) -> Self {
        Self {
            kernel,
            chart,
            mode,
        }
    }

    /// `(1 / sqrt(det g(x))) prod_i psi(x_i)`.
    pub fn density(&self, x: &[f64]) -> Result<f64> {
        let s = self.chart.sqrt_det_g(x)?;
        Ok(x.iter().map(|&v| self.kernel.psi(v)).product::<f64>() / s)
    }

    /// Constant `c` with `c * int_region density dV = 1`, using tensor
    /// Simpson quadrature from 129 nodes per axis, doubling the cell count
    /// until the relative change drops below `1e-8`.
    pub fn volume_normalize(&self, region: &[(f64, f64)]) -> Result<f64> {
        let dim = self.chart.dim();
        if region.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: region.len(),
            });
        }
        for &(lo, hi) in region {
            if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "region extent",
                    value: hi - lo,
                    expected: "finite box with positive volume",
                });
            }
        }
        let corner_lo: Vec<f64> = region.iter().map(|r| r.0).collect();
        let corner_hi: Vec<f64> = region.iter().map(|r| r.1).collect();
        if !self.chart.contains(&corner_lo) || !self.chart.contains(&corner_hi) {
            return Err(Error::OutOfDomain {
                what: "integration region",
                detail: alloc::format!("{region:?} leaves the {} chart", self.chart.name()),
            });
        }
        let mut nodes = VOLUME_MIN_NODES;
        let mut prev = self.tensor_simpson(region, nodes)?;
        loop {
            let next_nodes = 2 * nodes - 1;
            if next_nodes
                .checked_pow(dim as u32)
                .is_none_or(|t| t > VOLUME_MAX_EVALUATIONS)
            {
                return Err(Error::Diagnostic(alloc::format!(
                    "volume quadrature did not converge to {VOLUME_REL_TOL} within {nodes} nodes per axis"
                )));
            }
            let cur = self.tensor_simpson(region, next_nodes)?;
            nodes = next_nodes;
            if cur <= 0.0 {
                return Err(Error::Diagnostic("region carries no kernel mass".into()));
            }
            let change = ((cur - prev) / cur).abs();
            prev = cur;
            if change <= VOLUME_REL_TOL {
                return Ok(1.0 / cur);
            }
        }
    }

    fn tensor_simpson(&self, region: &[(f64, f64)], nodes: usize) -> Result<f64> {
        let dim = region.len();
        let weights: Vec<Vec<f64>> = region
            .iter()
            .map(|&(lo, hi)| simpson_weights(lo, hi, nodes))
            .collect();
        let steps: Vec<f64> = region
            .iter()
            .map(|&(lo, hi)| (hi - lo) / (nodes - 1) as f64)
            .collect();
        let total = nodes.pow(dim as u32);
        let mut x = alloc::vec![0.0; dim];
        let mut sum = 0.0;
        for flat in 0..total {
            let mut rem = flat;
            let mut w = 1.0;
            for d in (0..dim).rev() {
                let j = rem % nodes;
                rem /= nodes;
                x[d] = region[d].0 + steps[d] * j as f64;
                w *= weights[d][j];
            }
            sum += w * self.density(&x)? * self.chart.sqrt_det_g(&x)?;
        }
        Ok(sum)
    }

    /// Lattice weights `(k, w_k(x))` in ascending `k` order, per
    /// [`Renormalization`]. Fails if a node `k/n` leaves the chart.
    pub fn weights(&self, n: u32, x: &[f64]) -> Result<Vec<(Vec<i64>, f64)>> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: 0.0,
                expected: "n >= 1",
            });
        }
        self.chart.check(x)?;
        let nf = f64::from(n);
        let mut node = alloc::vec![0.0; x.len()];
        let mut out = Vec::new();
        for_each_lattice_point(&self.kernel, x, n, |k, z| {
            for (c, &ki) in node.iter_mut().zip(k) {
                *c = ki as f64 / nf;
            }
            if !self.chart.contains(&node) {
                return Err(Error::OutOfDomain {
                    what: "lattice support",
                    detail: alloc::format!(
                        "node {node:?} needed at x = {x:?}, n = {n} leaves the {} chart; increase n or shrink the evaluation box",
                        self.chart.name()
                    ),
                });
            }
            let w = match self.mode {
                Renormalization::AnalyticFlat => z,
                Renormalization::Discrete => z / self.chart.sqrt_det_g(&node)?,
            };
            out.push((k.to_vec(), w));
            Ok(())
        })?;
        if self.mode == Renormalization::Discrete {
            let total: f64 = out.iter().map(|(_, w)| w).sum();
            for (_, w) in &mut out {
                *w /= total;
            }
        }
        Ok(out)
    }

    /// `sum_k f(k/n) w_k(x)`; on the torus `f` is sampled at wrapped nodes.
    pub fn operator_on_chart(&self, f: &FunctionPreset, n: u32, x: &[f64]) -> Result<f64> {
        if f.dim() != self.chart.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.chart.dim(),
                found: f.dim(),
            });
        }
        let nf = f64::from(n);
        let mut sum = 0.0;
        for (k, w) in self.weights(n, x)? {
            let node: Vec<f64> = k.iter().map(|&ki| ki as f64 / nf).collect();
            sum += f.eval(&self.chart.coordinates(&node)?)? * w;
        }
        Ok(sum)
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(matrix: &[f64], n: usize) -> f64 {
    let mut a = matrix.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap_or(col);
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for i in col + 1..n {
            let factor = a[i * n + col] / p;
            for j in col..n {
                a[i * n + j] -= factor * a[col * n + j];
            }
        }
    }
    det
}
