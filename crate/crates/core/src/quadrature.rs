//! Composite Simpson and Gauss-Legendre rules.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

/// Composite Simpson rule on `[a, b]` with `nodes` points (odd, >= 3).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, nodes: usize) -> f64 {
    let w = simpson_weights(a, b, nodes);
    let step = (b - a) / (nodes - 1) as f64;
    w.iter()
        .enumerate()
        .map(|(i, wi)| wi * f(a + step * i as f64))
        .sum()
}

/// Simpson weights for `nodes` equispaced points on `[a, b]`.
///
/// # Panics
/// If `nodes` is even or below 3.
pub fn simpson_weights(a: f64, b: f64, nodes: usize) -> Vec<f64> {
    assert!(
        nodes >= 3 && nodes % 2 == 1,
        "simpson needs an odd node count >= 3"
    );
    let step = (b - a) / (nodes - 1) as f64;
    (0..nodes)
        .map(|i| {
            let c = if i == 0 || i == nodes - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * step / 3.0
        })
        .collect()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `n >= 2` points, exact for polynomials of degree `2n - 1`.
    ///
    /// Roots of `P_n` come from Newton iteration started at the Chebyshev
    /// estimate `cos(pi (i + 3/4) / (n + 1/2))`.
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=64).contains(&n) {
            return Err(Error::InvalidParameter {
                name: "quadrature nodes",
                value: n as f64,
                expected: "2 <= nodes <= 64",
            });
        }
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
