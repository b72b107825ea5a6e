//! Experiment execution.

use std::collections::BTreeMap;
use std::path::PathBuf;

use qinterp_core::analysis::{convergence_sweep, fractional_rate, residual_orders};
use qinterp_core::kernel::MultiIndex;
use qinterp_core::operators::{OperatorConfig, OperatorKind};
use qinterp_core::{
    ActivationParams, Chart, ChartKind, ConvergenceReport, FracConfig, MetricKernel,
};
use serde::{Deserialize, Serialize};

use crate::config::{Command, OperatorChoice, OutputFormat, Settings};
use crate::error::CliError;
use crate::output::{self, fmt_f64, Table};

/// Files written and human-readable summary lines.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

/// JSON body of `kernel-dump`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDump {
    pub activation: ActivationParams,
    pub normalization: f64,
    pub truncation_radius: f64,
    pub truncation_tolerance: f64,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Config echo stored in every report (the output location is left out).
pub fn config_echo(settings: &Settings) -> BTreeMap<String, String> {
    let mut cfg = settings.to_config();
    cfg.output = None;
    cfg.format = None;
    let value = serde_json::to_value(&cfg).expect("config serializes");
    value
        .as_object()
        .expect("config is an object")
        .iter()
        .map(|(k, v)| {
            let s = match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            (k.clone(), s)
        })
        .collect()
}

pub fn execute(settings: &Settings) -> Result<Outcome, CliError> {
    match settings.command {
        Command::Converge => converge(settings),
        Command::Voronovskaya => voronovskaya(settings),
        Command::Frac => frac(settings),
        Command::KernelDump => kernel_dump(settings),
        Command::Manifold => manifold(settings),
    }
}

fn converge(s: &Settings) -> Result<Outcome, CliError> {
    let kernel = s.kernel()?;
    let f = s.preset_fn()?;
    let grid = s.grid()?;
    let kind = match s.operator {
        OperatorChoice::Basic => OperatorKind::Basic,
        OperatorChoice::Kantorovich => OperatorKind::Kantorovich,
    };
    let base =
        OperatorConfig::new(kind, s.n[0], kernel)?.with_quadrature_nodes(s.quadrature_nodes)?;
    let report = convergence_sweep(
        |n, x| base.at(n)?.apply(&f, x),
        |x| f.eval(x),
        &grid,
        &s.n,
        config_echo(s),
        "f",
    )?;
    write_single(s, &report)
}

fn manifold(s: &Settings) -> Result<Outcome, CliError> {
    let kernel = s.kernel()?;
    let f = s.preset_fn()?;
    let grid = s.grid()?;
    let chart = Chart::new(ChartKind::from_name(&s.chart)?, f.dim())?;
    let mk = MetricKernel::new(kernel, chart, s.renormalization.into());
    let target = format!("f on the {} chart", chart.name());
    let report = convergence_sweep(
        |n, x| mk.operator_on_chart(&f, n, x),
        |x| f.eval(&chart.coordinates(x)?),
        &grid,
        &s.n,
        config_echo(s),
        &target,
    )?;
    write_single(s, &report)
}

fn frac(s: &Settings) -> Result<Outcome, CliError> {
    let kernel = s.kernel()?;
    let f = s.preset_fn()?;
    let grid = s.grid()?;
    let beta = s.beta.ok_or(CliError::MissingFlag("beta"))?;
    let cfg = FracConfig::new(beta, s.frac_step)?;
    let report = fractional_rate(&kernel, &f, &cfg, &grid, &s.n, config_echo(s))?;
    write_single(s, &report)
}

fn voronovskaya(s: &Settings) -> Result<Outcome, CliError> {
    let kernel = s.kernel()?;
    let f = s.preset_fn()?;
    let grid = s.grid()?;
    let reports = residual_orders(&kernel, &f, &grid, &s.n, s.m_max, config_echo(s))?;
    let mut out = Outcome::default();
    if s.format == OutputFormat::Csv {
        let path = output::with_ext(&s.output, "csv");
        output::write_file(&path, &output::residual_table(&reports).to_csv())?;
        out.files.push(path);
    }
    let path = output::with_ext(&s.output, "json");
    output::write_file(&path, &output::to_json(&reports))?;
    out.files.push(path);
    for (m, r) in reports.iter().enumerate() {
        out.summary
            .push(output::summary_line(&format!("m = {m}"), r));
    }
    Ok(out)
}

fn kernel_dump(s: &Settings) -> Result<Outcome, CliError> {
    let kernel = s.kernel()?;
    let grid = s.grid()?;
    let columns = ["n", "x", "frac_nx", "psi", "m0", "m1", "m2", "m3", "n_m1"];
    let mut table = Table::new(&columns);
    let mut rows = Vec::new();
    for &n in &s.n {
        for x in grid.points() {
            let xv = x[0];
            let u = f64::from(n) * xv;
            let frac = u - u.floor();
            let mut moments = [0.0; 4];
            for (p, slot) in moments.iter_mut().enumerate() {
                *slot = kernel.moment(&MultiIndex::new(vec![p as u32]), &x, n)?;
            }
            let row = vec![
                f64::from(n),
                xv,
                frac,
                kernel.psi(xv),
                moments[0],
                moments[1],
                moments[2],
                moments[3],
                f64::from(n) * moments[1],
            ];
            let mut cells = vec![n.to_string()];
            cells.extend(row[1..].iter().map(|v| fmt_f64(*v)));
            table.push(cells);
            rows.push(row);
        }
    }
    let dump = KernelDump {
        activation: *kernel.params(),
        normalization: kernel.normalization(),
        truncation_radius: kernel.radius(),
        truncation_tolerance: kernel.tolerance(),
        columns: columns.iter().map(|c| c.to_string()).collect(),
        rows,
    };
    let mut out = Outcome::default();
    if s.format == OutputFormat::Csv {
        let path = output::with_ext(&s.output, "csv");
        output::write_file(&path, &table.to_csv())?;
        out.files.push(path);
    }
    let path = output::with_ext(&s.output, "json");
    output::write_file(&path, &output::to_json(&dump))?;
    out.files.push(path);
    out.summary.push(format!(
        "kernel-dump: C = {}, W = {}, {} rows",
        kernel.normalization(),
        kernel.radius(),
        table.rows.len()
    ));
    Ok(out)
}

fn write_single(s: &Settings, report: &ConvergenceReport) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    if s.format == OutputFormat::Csv {
        let path = output::with_ext(&s.output, "csv");
        output::write_file(&path, &output::sweep_table(report).to_csv())?;
        out.files.push(path);
    }
    let path = output::with_ext(&s.output, "json");
    output::write_file(&path, &output::to_json(report))?;
    out.files.push(path);
    out.summary
        .push(output::summary_line(s.command.name(), report));
    Ok(out)
}
