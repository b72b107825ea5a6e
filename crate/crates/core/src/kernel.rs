//! Partition-of-unity density built from the activation.
//!
//! `psi(x) = [h(x+1) - h(x-1)] / C` with `C = 2(1+q^2)/(1-q^2)`. Summing
//! integer translates telescopes to `2 (sup h - inf h) / C = 1`, and the same
//! constant gives `int psi = 1`. Simplifying the difference of the two
//! fractions gives the closed form used for evaluation,
//!
//! ```text
//! psi(x) = (1 - q^2) sinh(2a) / (D(x+1) D(x-1))
//! ```
//!
//! which is positive and free of cancellation. `psi` is symmetric about the
//! activation centre `x0 = ln((1-q)/(1+q)) / (2a)`, not about 0, so its first
//! moment does not vanish.
//!
//! The N-dimensional kernel is the product `Z(x) = prod_i psi(x_i)`.
//! Lattice sums are truncated to the box `|k_i - n x_i| <= W`.

use alloc::vec::Vec;
use core::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::activation::ActivationParams;
use crate::{Error, Result};

pub const DEFAULT_TRUNCATION_TOLERANCE: f64 = 1e-12;
/// Highest moment order served by [`DensityKernel::moment`].
pub const MAX_MOMENT_ORDER: usize = 6;

const MAX_RADIUS: f64 = 1048576.0;

/// Multi-index `(a_1, ..., a_N)` of non-negative integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(alloc::vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|a| = sum a_i`.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    /// `a! = prod a_i!`.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&a| (1..=a).map(f64::from).product::<f64>())
            .product()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// All multi-indices of length `dim` and order exactly `order`, in
    /// ascending lexicographic order.
    pub fn of_order(dim: usize, order: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = alloc::vec![0u32; dim];
        fill(&mut out, &mut cur, 0, order as u32);
        out
    }
}

fn fill(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    if cur.is_empty() {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    for a in 0..=remaining {
        cur[pos] = a;
        fill(out, cur, pos + 1, remaining - a);
    }
}

/// One-dimensional density `psi` with its truncation radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityKernel {
    params: ActivationParams,
    normalization: f64,
    radius: f64,
    tolerance: f64,
}

impl DensityKernel {
    /// Kernel with the default truncation tolerance `1e-12`.
    pub fn new(params: ActivationParams) -> Self {
        Self::with_tolerance(params, DEFAULT_TRUNCATION_TOLERANCE)
            .expect("default tolerance is valid")
    }

    pub fn with_tolerance(params: ActivationParams, tolerance: f64) -> Result<Self> {
        let radius = truncation_radius(&params, tolerance)?;
        let q = params.q();
        Ok(Self {
            params,
            normalization: 2.0 * (1.0 + q * q) / (1.0 - q * q),
            radius,
            tolerance,
        })
    }

    pub fn params(&self) -> &ActivationParams {
        &self.params
    }

    /// `C = 2(1+q^2)/(1-q^2)`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Truncation radius `W` in lattice units.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `psi(x)`.
    pub fn psi(&self, x: f64) -> f64 {
        psi_closed_form(&self.params, x)
    }

    /// `Z(x) = prod psi(x_i)`.
    pub fn z(&self, x: &[f64]) -> Result<f64> {
        if x.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        Ok(x.iter().map(|&xi| self.psi(xi)).product())
    }

    /// Integer `k` with `|k - u| <= W`.
    pub fn lattice_range(&self, u: f64) -> RangeInclusive<i64> {
        let lo = libm::ceil(u - self.radius) as i64;
        let hi = libm::floor(u + self.radius) as i64;
        lo..=hi
    }

    /// Truncated partition sum `sum_k psi(u - k)`.
    pub fn partition_sum(&self, u: f64) -> f64 {
        self.lattice_range(u).map(|k| self.psi(u - k as f64)).sum()
    }

    /// Discrete moment `M_a(x, n) = sum_k (k/n - x)^a Z(nx - k)` over the
    /// truncated lattice. The box lattice factorises, so this is the
    /// product of one-dimensional moments.
    pub fn moment(&self, alpha: &MultiIndex, x: &[f64], n: u32) -> Result<f64> {
        if alpha.dim() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: alpha.dim(),
                found: x.len(),
            });
        }
        if alpha.order() > MAX_MOMENT_ORDER {
            return Err(Error::InvalidParameter {
                name: "moment order",
                value: alpha.order() as f64,
                expected: "|alpha| <= 6",
            });
        }
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: 0.0,
                expected: "n >= 1",
            });
        }
        Ok(alpha
            .entries()
            .iter()
            .zip(x)
            .map(|(&p, &xi)| self.moment_1d(p, xi, n))
            .product())
    }

    /// One-dimensional moment `sum_k (k/n - x)^p psi(nx - k)`.
    pub fn moment_1d(&self, p: u32, x: f64, n: u32) -> f64 {
        let nf = f64::from(n);
        let u = nf * x;
        self.lattice_range(u)
            .map(|k| {
                let t = (k as f64 - u) / nf;
                powi(t, p) * self.psi(u - k as f64)
            })
            .sum()
    }
}

#[inline]
pub(crate) fn powi(x: f64, p: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..p {
        acc *= x;
    }
    acc
}

fn psi_closed_form(params: &ActivationParams, x: f64) -> f64 {
    let q = params.q();
    let a = params.alpha();
    let (_, dp) = params.scaled_denominator(x + 1.0);
    let (_, dm) = params.scaled_denominator(x - 1.0);
    // sinh(2a) e^{-a s} with s = |x+1| + |x-1| >= 2
    let s = libm::fabs(x + 1.0) + libm::fabs(x - 1.0);
    let scaled_sinh = 0.5 * (libm::exp(-a * (s - 2.0)) - libm::exp(-a * (s + 2.0)));
    (1.0 - q * q) * scaled_sinh / (dp * dm)
}

/// Smallest `W` in `{2, 4, 8, ...}` with `psi(W) < eps` and `psi(-W) < eps`
/// that also lies at least one unit past the centre of `psi`.
///
/// Beyond the centre `psi` falls off like `e^{-2a|x|}`, so the mass dropped
/// by the partition sum is at most `eps / (1 - e^{-2a})` per side, which is
/// below `4 eps W` for every `W >= 2`.
pub fn truncation_radius(params: &ActivationParams, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter {
            name: "truncation tolerance",
            value: eps,
            expected: "0 < eps < 1",
        });
    }
    let centre = libm::fabs(params.centre());
    let mut w = 2.0;
    while w <= MAX_RADIUS {
        if w >= centre + 1.0
            && psi_closed_form(params, w) < eps
            && psi_closed_form(params, -w) < eps
        {
            return Ok(w);
        }
        w *= 2.0;
    }
    Err(Error::Diagnostic(alloc::format!(
        "no truncation radius up to {MAX_RADIUS} reaches tolerance {eps}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::simpson;

    fn kernel(q: f64, a: f64, eps: f64) -> DensityKernel {
        DensityKernel::with_tolerance(ActivationParams::new(q, a).unwrap(), eps).unwrap()
    }

    // Definition route: difference of shifted activations.
    fn psi_by_difference(k: &DensityKernel, x: f64) -> f64 {
        let h = k.params();
        (h.eval(x + 1.0) - h.eval(x - 1.0)) / k.normalization()
    }

    #[test]
    fn closed_form_matches_difference_definition() {
        for &(q, a) in &[(0.1, 0.5), (0.5, 1.0), (0.9, 2.0), (0.3, 3.0)] {
            let k = kernel(q, a, 1e-12);
            for i in 0..400 {
                let x = -10.0 + 20.0 * i as f64 / 399.0;
                let d = psi_by_difference(&k, x);
                assert!((k.psi(x) - d).abs() < 1e-14, "q={q} a={a} x={x}");
            }
        }
    }

    #[test]
    fn psi_examples() {
        let k = kernel(0.5, 1.0, 1e-12);
        assert!((k.normalization() - 10.0 / 3.0).abs() < 1e-15);
        // [h(1) - h(-1)] * 3/10, evaluated independently
        let e = libm::exp(1.0);
        let h1 = (e - 0.5 / e) / (1.5 * e + 0.5 / e);
        let hm1 = (1.0 / e - 0.5 * e) / (1.5 / e + 0.5 * e);
        let want = (h1 - hm1) * 0.3;
        assert!((k.psi(0.0) - want).abs() < 1e-15);
        assert!((k.psi(0.0) - 0.334_035_030_623_798_8).abs() < 1e-15);
        assert!(k.psi(25.0) > 0.0 && k.psi(-25.0) > 0.0);
        let s: f64 = (-(k.radius() as i64)..=k.radius() as i64)
            .map(|j| k.psi(0.37 - j as f64))
            .sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn z_examples() {
        let k = kernel(0.5, 1.0, 1e-12);
        assert_eq!(k.z(&[0.3]).unwrap(), k.psi(0.3));
        assert!((k.z(&[0.0, 0.0]).unwrap() - k.psi(0.0).powi(2)).abs() < 1e-16);
        assert!(k.z(&[]).is_err());
        // brute-force two-dimensional lattice sum
        let x = [0.3, 0.8];
        let w = k.radius() as i64;
        let mut s = 0.0;
        for k1 in -w..=w {
            for k2 in -w..=w {
                s += k.z(&[x[0] - k1 as f64, x[1] - k2 as f64]).unwrap();
            }
        }
        assert!((s - 1.0).abs() < 2e-12);
    }

    #[test]
    fn truncation_radius_examples() {
        let p = |q, a| ActivationParams::new(q, a).unwrap();
        let w_small = truncation_radius(&p(0.5, 0.5), 1e-10).unwrap();
        let w_mid = truncation_radius(&p(0.5, 1.0), 1e-10).unwrap();
        let w_big = truncation_radius(&p(0.5, 2.0), 1e-10).unwrap();
        assert!(w_small >= w_mid && w_mid >= w_big);
        assert!(truncation_radius(&p(0.5, 1.0), 1e-12).unwrap() <= 32.0);
        assert_eq!(truncation_radius(&p(0.5, 1.0), 0.5).unwrap(), 2.0);
        assert!(truncation_radius(&p(0.5, 1.0), 1.0).is_err());
        assert!(truncation_radius(&p(0.5, 1.0), 0.0).is_err());
        assert!(truncation_radius(&p(0.5, 1.0), -1.0).is_err());
        // off-centre kernels are still bracketed
        let off = p(0.9, 0.01);
        let w = truncation_radius(&off, 1e-6).unwrap();
        assert!(w > off.centre().abs());
    }

    #[test]
    fn psi_below_tolerance_outside_radius() {
        for &(q, a) in &[(0.1, 0.5), (0.5, 1.0), (0.9, 2.0)] {
            let k = kernel(q, a, 1e-12);
            let w = k.radius();
            for i in 0..200 {
                let x = w + i as f64 * 0.25;
                assert!(k.psi(x) <= 1e-12 && k.psi(-x) <= 1e-12);
            }
        }
    }

    #[test]
    fn partition_of_unity() {
        for &q in &[0.1, 0.3, 0.5, 0.9] {
            for &a in &[0.5, 1.0, 2.0] {
                let k = kernel(q, a, 1e-14);
                for i in 0..=100 {
                    let x = i as f64 / 100.0;
                    assert!(
                        (k.partition_sum(x) - 1.0).abs() <= 1e-12,
                        "q={q} a={a} x={x}"
                    );
                }
            }
        }
    }

    #[test]
    fn positive_on_support() {
        let k = kernel(0.9, 0.5, 1e-12);
        let w = k.radius();
        for i in 0..10_000 {
            let x = -w + 2.0 * w * i as f64 / 9999.0;
            assert!(k.psi(x) > 0.0);
        }
    }

    #[test]
    fn unit_mass() {
        for &(q, a) in &[(0.1, 0.5), (0.5, 1.0), (0.9, 2.0)] {
            let k = kernel(q, a, 1e-12);
            let w = k.radius();
            let mass = simpson(|x| k.psi(x), -w, w, 8193);
            assert!((mass - 1.0).abs() < 1e-8, "q={q} a={a} mass={mass}");
        }
    }

    #[test]
    fn moment_examples() {
        let k = kernel(0.5, 1.0, 1e-12);
        assert!((k.moment(&MultiIndex::zeros(1), &[0.41], 32).unwrap() - 1.0).abs() <= 1e-12);
        let a = MultiIndex::new(alloc::vec![1]);
        let m1 = 8.0 * k.moment(&a, &[0.25], 8).unwrap();
        let m2 = 16.0 * k.moment(&a, &[0.125], 16).unwrap();
        assert!((m1 - m2).abs() <= 1e-10);
        let w = k.radius();
        for p in 1..=6u32 {
            let a = MultiIndex::new(alloc::vec![p]);
            for n in [8u32, 16, 32, 64, 128, 256, 512] {
                for x in [0.0, 0.13, 0.5, 0.77] {
                    let m = k.moment(&a, &[x], n).unwrap();
                    assert!(m.abs() <= libm::pow(w / n as f64, p as f64));
                }
            }
        }
        assert!(k
            .moment(&MultiIndex::new(alloc::vec![7]), &[0.1], 8)
            .is_err());
        assert!(k
            .moment(&MultiIndex::new(alloc::vec![1, 0]), &[0.1], 8)
            .is_err());
    }

    #[test]
    fn moment_matches_brute_force_lattice_sum() {
        let k = kernel(0.3, 1.5, 1e-13);
        let alpha = MultiIndex::new(alloc::vec![2, 1]);
        let x = [0.31, -0.47];
        let n = 16u32;
        let nf = n as f64;
        let mut brute = 0.0;
        for k1 in k.lattice_range(nf * x[0]) {
            for k2 in k.lattice_range(nf * x[1]) {
                let d0 = (k1 as f64 - nf * x[0]) / nf;
                let d1 = (k2 as f64 - nf * x[1]) / nf;
                brute += d0
                    * d0
                    * d1
                    * k.z(&[nf * x[0] - k1 as f64, nf * x[1] - k2 as f64])
                        .unwrap();
            }
        }
        let m = k.moment(&alpha, &x, n).unwrap();
        assert!((m - brute).abs() < 1e-15);
    }

    #[test]
    fn scaled_moments_bounded_and_periodic() {
        let k = kernel(0.5, 1.0, 1e-12);
        let w = k.radius();
        for p in 1..=4u32 {
            let a = MultiIndex::new(alloc::vec![p]);
            for n in [8u32, 16, 32, 64, 128, 256, 512] {
                let sup = (0..=50)
                    .map(|i| k.moment(&a, &[i as f64 / 50.0], n).unwrap().abs())
                    .fold(0.0, f64::max);
                assert!(sup * libm::pow(n as f64, p as f64) <= libm::pow(w, p as f64));
            }
        }
        // same fractional part of nx
        let a = MultiIndex::new(alloc::vec![1]);
        let frac = 0.3;
        let base = 8.0 * k.moment(&a, &[(3.0 + frac) / 8.0], 8).unwrap();
        for n in [16u32, 64, 256] {
            let x = (7.0 + frac) / n as f64;
            let v = n as f64 * k.moment(&a, &[x], n).unwrap();
            assert!((v - base).abs() <= 1e-10);
        }
    }

    #[test]
    fn multi_index_enumeration() {
        let all = MultiIndex::of_order(2, 2);
        let entries: Vec<Vec<u32>> = all.iter().map(|m| m.0.clone()).collect();
        assert_eq!(
            entries,
            alloc::vec![alloc::vec![0, 2], alloc::vec![1, 1], alloc::vec![2, 0]]
        );
        assert_eq!(MultiIndex::of_order(3, 2).len(), 6);
        assert_eq!(MultiIndex::new(alloc::vec![2, 3]).factorial(), 12.0);
        assert_eq!(MultiIndex::new(alloc::vec![2, 3]).order(), 5);
    }
}
