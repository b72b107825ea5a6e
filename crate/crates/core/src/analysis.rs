//! Sup-norm error measurement and log-log convergence fits.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::fractional::{power_rule_oracle, rl_derivative_of, FracConfig};
use crate::kernel::DensityKernel;
use crate::operators::{fractional_sum, residuals_up_to};
use crate::preset::FunctionPreset;
use crate::{Error, Result};

/// Default sweep `n = 16, 32, ..., 512`.
pub const DEFAULT_SWEEP: [u32; 6] = [16, 32, 64, 128, 256, 512];
/// Errors below this are treated as round-off and left out of fits.
pub const ERROR_FLOOR: f64 = 1e-13;
pub const MIN_FIT_ROWS: usize = 3;
/// Norm statement attached to every report.
pub const NORM_DESCRIPTION: &str =
    "sup-norm over the evaluation grid (max |error| over grid points)";

/// Uniform midpoint grid on an axis-aligned box.
///
/// Axis `d` has nodes `lo_d + (i + 1/2) (hi_d - lo_d) / P` for
/// `i = 0..P`; on `[0, 1]` with `P = 101` this is the offset `1/202` from
/// the box edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalGrid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub points_per_axis: usize,
}

impl EvalGrid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, points_per_axis: usize) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: lo.len().max(1),
                found: hi.len(),
            });
        }
        if points_per_axis == 0 {
            return Err(Error::InvalidParameter {
                name: "grid points",
                value: 0.0,
                expected: "points per axis >= 1",
            });
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a.is_finite() && b.is_finite() && b >= a) {
                return Err(Error::InvalidParameter {
                    name: "grid box",
                    value: b - a,
                    expected: "finite bounds with hi >= lo",
                });
            }
        }
        Ok(Self {
            lo,
            hi,
            points_per_axis,
        })
    }

    /// One-dimensional grid on `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64, points: usize) -> Result<Self> {
        Self::new(alloc::vec![lo], alloc::vec![hi], points)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// All grid points, last axis fastest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let p = self.points_per_axis;
        let dim = self.dim();
        let total = p.pow(dim as u32);
        (0..total)
            .map(|flat| {
                let mut rem = flat;
                let mut x = alloc::vec![0.0; dim];
                for d in (0..dim).rev() {
                    let i = rem % p;
                    rem /= p;
                    x[d] = self.lo[d] + (i as f64 + 0.5) * (self.hi[d] - self.lo[d]) / p as f64;
                }
                x
            })
            .collect()
    }
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `(max, mean)` of `|apply(x) - target(x)|` over the grid points.
pub fn sup_error(
    mut apply: impl FnMut(&[f64]) -> Result<f64>,
    mut target: impl FnMut(&[f64]) -> Result<f64>,
    grid: &EvalGrid,
) -> Result<(f64, f64)> {
    let points = grid.points();
    let mut errors = Vec::with_capacity(points.len());
    for x in &points {
        let at = |e: Error| Error::AtPoint {
            point: x.clone(),
            source: alloc::boxed::Box::new(e),
        };
        let v = apply(x).map_err(at)?;
        let t = target(x).map_err(at)?;
        errors.push(libm::fabs(v - t));
    }
    Ok(summarize(&errors))
}

fn summarize(errors: &[f64]) -> (f64, f64) {
    let sup = errors.iter().copied().fold(0.0, f64::max);
    let mean = pairwise_sum(errors) / errors.len() as f64;
    (sup, mean)
}

/// Least-squares fit of `ln(error)` against `ln(1/n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Empirical order `r` in `error ~ C n^{-r}`.
    pub slope: f64,
    /// `ln C`.
    pub intercept: f64,
    pub r_squared: f64,
    pub used: usize,
    pub excluded: usize,
}

/// Fits the convergence order of `(n, error)` rows. Rows with error below
/// [`ERROR_FLOOR`] are excluded and counted.
pub fn rate_fit(rows: &[(u32, f64)]) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, e)| *e >= ERROR_FLOOR && e.is_finite())
        .map(|&(n, e)| (-libm::log(f64::from(n)), libm::log(e)))
        .collect();
    let excluded = rows.len() - pts.len();
    if pts.len() < MIN_FIT_ROWS {
        return Err(Error::InsufficientData {
            usable: pts.len(),
            required: MIN_FIT_ROWS,
        });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData {
            usable: 1,
            required: MIN_FIT_ROWS,
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        used: pts.len(),
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: u32,
    pub sup_error: f64,
    pub mean_error: f64,
}

/// Per-`n` errors of one experiment with the fitted slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Echo of the experiment configuration.
    pub config: BTreeMap<String, String>,
    pub rows: Vec<ReportRow>,
    pub fitted_slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
    /// Limit object the errors are measured against.
    pub target_description: String,
    pub norm: String,
    /// Exponent claimed in the literature for this experiment, as text.
    pub claimed_exponent: Option<String>,
    pub claimed_exponent_value: Option<f64>,
    /// Rows whose sup error fell below the fit floor.
    pub excluded_rows: usize,
    pub notes: Vec<String>,
}

impl ConvergenceReport {
    /// Sorts rows by `n` and fits the sup errors. A failed fit leaves the
    /// fit fields empty and adds a note.
    pub fn from_rows(
        config: BTreeMap<String, String>,
        mut rows: Vec<ReportRow>,
        target_description: impl Into<String>,
    ) -> Self {
        rows.sort_by_key(|r| r.n);
        let pairs: Vec<(u32, f64)> = rows.iter().map(|r| (r.n, r.sup_error)).collect();
        let excluded_rows = pairs.iter().filter(|p| !(p.1 >= ERROR_FLOOR)).count();
        let mut notes = Vec::new();
        let (fitted_slope, intercept, r_squared) = match rate_fit(&pairs) {
            Ok(fit) => (Some(fit.slope), Some(fit.intercept), Some(fit.r_squared)),
            Err(e) => {
                notes.push(format!(
                    "fit skipped: {e} (errors below {ERROR_FLOOR:e} are excluded)"
                ));
                (None, None, None)
            }
        };
        if excluded_rows > 0 {
            notes.push(format!(
                "{excluded_rows} row(s) below the {ERROR_FLOOR:e} round-off floor"
            ));
        }
        Self {
            config,
            rows,
            fitted_slope,
            intercept,
            r_squared,
            target_description: target_description.into(),
            norm: String::from(NORM_DESCRIPTION),
            claimed_exponent: None,
            claimed_exponent_value: None,
            excluded_rows,
            notes,
        }
    }
}

/// Runs `apply(n, x)` against `target(x)` for every `n` of the sweep.
pub fn convergence_sweep(
    mut apply: impl FnMut(u32, &[f64]) -> Result<f64>,
    mut target: impl FnMut(&[f64]) -> Result<f64>,
    grid: &EvalGrid,
    sweep: &[u32],
    config: BTreeMap<String, String>,
    target_description: &str,
) -> Result<ConvergenceReport> {
    check_sweep(sweep)?;
    let mut rows = Vec::with_capacity(sweep.len());
    for &n in sweep {
        let (sup, mean) = sup_error(|x| apply(n, x), &mut target, grid)?;
        rows.push(ReportRow {
            n,
            sup_error: sup,
            mean_error: mean,
        });
    }
    Ok(ConvergenceReport::from_rows(
        config,
        rows,
        target_description,
    ))
}

fn check_sweep(sweep: &[u32]) -> Result<()> {
    if sweep.is_empty() || sweep.contains(&0) {
        return Err(Error::InvalidParameter {
            name: "n sweep",
            value: sweep.len() as f64,
            expected: "non-empty list of n >= 1",
        });
    }
    Ok(())
}

/// One report per `m = 0..=m_max` of `sup |R_m(x, n)|` over the grid,
/// where `R_m = A_n f - f - (Voronovskaya correction of order m)`.
pub fn residual_orders(
    kernel: &DensityKernel,
    f: &FunctionPreset,
    grid: &EvalGrid,
    sweep: &[u32],
    m_max: usize,
    config: BTreeMap<String, String>,
) -> Result<Vec<ConvergenceReport>> {
    check_sweep(sweep)?;
    if !(1..=crate::operators::MAX_CORRECTION_ORDER).contains(&m_max) {
        return Err(Error::InvalidParameter {
            name: "m_max",
            value: m_max as f64,
            expected: "1 <= m_max <= 4",
        });
    }
    if grid.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: grid.dim(),
        });
    }
    let points = grid.points();
    let mut rows: Vec<Vec<ReportRow>> = alloc::vec![Vec::new(); m_max + 1];
    for &n in sweep {
        let mut per_m: Vec<Vec<f64>> = alloc::vec![Vec::with_capacity(points.len()); m_max + 1];
        for x in &points {
            let res = residuals_up_to(kernel, f, x, n, m_max).map_err(|e| Error::AtPoint {
                point: x.clone(),
                source: alloc::boxed::Box::new(e),
            })?;
            for (m, r) in res.into_iter().enumerate() {
                per_m[m].push(libm::fabs(r));
            }
        }
        for (m, errs) in per_m.iter().enumerate() {
            let (sup, mean) = summarize(errs);
            rows[m].push(ReportRow {
                n,
                sup_error: sup,
                mean_error: mean,
            });
        }
    }
    let mut reports: Vec<ConvergenceReport> = rows
        .into_iter()
        .enumerate()
        .map(|(m, r)| {
            let mut cfg = config.clone();
            cfg.insert("m".into(), format!("{m}"));
            let target = if m == 0 {
                String::from("f (uncorrected error A_n f - f)")
            } else {
                format!("residual order m = {m} (A_n f - f - correction)")
            };
            let mut rep = ConvergenceReport::from_rows(cfg, r, target);
            rep.claimed_exponent = Some(format!("{}", m + 1));
            rep.claimed_exponent_value = Some((m + 1) as f64);
            rep
        })
        .collect();
    for m in 1..reports.len() {
        if let (Some(a), Some(b)) = (reports[m - 1].fitted_slope, reports[m].fitted_slope) {
            if b < a - 0.1 {
                let note = format!(
                    "slope decreased from m = {} ({a:.3}) to m = {m} ({b:.3})",
                    m - 1
                );
                reports[m].notes.push(note);
            }
        }
    }
    Ok(reports)
}

/// `sup |Q_n(f; x) - D^b f(x)|` over a one-dimensional grid, with `D^b f`
/// from the power rule. `f` must be `t^p` (or identically zero).
pub fn fractional_rate(
    kernel: &DensityKernel,
    f: &FunctionPreset,
    frac: &FracConfig,
    grid: &EvalGrid,
    sweep: &[u32],
    config: BTreeMap<String, String>,
) -> Result<ConvergenceReport> {
    if grid.dim() != 1 || f.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: grid.dim().max(f.dim()),
        });
    }
    if grid.lo[0] < 0.0 {
        return Err(Error::OutOfDomain {
            what: "fractional grid",
            detail: format!("lower bound {} < 0", grid.lo[0]),
        });
    }
    let zero = f.is_zero();
    let p = match f.power_exponent() {
        Some(p) => p,
        None if zero => 0.0,
        None => {
            return Err(Error::InvalidParameter {
                name: "fractional preset",
                value: f64::NAN,
                expected: "a power preset t^p or zero (closed-form target)",
            })
        }
    };
    let beta = frac.beta();
    let target = |x: &[f64]| -> Result<f64> {
        if zero {
            Ok(0.0)
        } else {
            power_rule_oracle(p, beta, x[0])
        }
    };
    // D^b f(k/n) is shared by neighbouring grid points; memoise per n.
    let mut report = convergence_sweep(
        {
            let mut cache: BTreeMap<(u32, i64), f64> = BTreeMap::new();
            move |n, x| {
                fractional_sum(kernel, n, x[0], |k| {
                    if let Some(v) = cache.get(&(n, k)) {
                        return Ok(*v);
                    }
                    let v = rl_derivative_of(frac, f, k as f64 / f64::from(n))?;
                    cache.insert((n, k), v);
                    Ok(v)
                })
            }
        },
        target,
        grid,
        sweep,
        config,
        "D^beta f (oracle)",
    )?;
    let m = f.smoothness();
    report.claimed_exponent = Some(format!("m - beta (m = {m}, beta = {beta})"));
    report.claimed_exponent_value = match m {
        crate::Smoothness::Finite(m) => Some(f64::from(m) - beta),
        crate::Smoothness::Infinite => None,
    };
    report.notes.push(String::from(
        "errors are measured against D^beta f, the zeroth-order limit of Q_n; the claimed exponent is echoed, not asserted",
    ));
    Ok(report)
}
