//! Command-line flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Command, ExperimentConfig, ModeChoice, OperatorChoice, OutputFormat};

#[derive(Debug, Parser)]
#[command(
    name = "qinterp",
    version,
    about = "Convergence experiments for hyperbolic-tangent quasi-interpolation operators",
    long_about = "Runs convergence experiments and writes <output>.csv (sweep rows) and \
                  <output>.json (report). Flags override values from --config, which \
                  override per-command defaults."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Sup-norm error of the basic or Kantorovich operator against f over an n sweep.
    Converge(Flags),
    /// Voronovskaya residuals R_m = A_n f - f - correction for m = 0..=m-max.
    #[command(after_help = "CSV columns: m,n,sup_error,mean_error")]
    Voronovskaya(Flags),
    /// Fractional operator Q_n against the closed-form D^beta f of a power preset.
    Frac(Flags),
    /// Kernel samples psi(x) and moments M_0..M_3 at every (n, x).
    #[command(after_help = "CSV columns:\n  \
        n       lattice scale\n  \
        x       grid point\n  \
        frac_nx fractional part of n*x\n  \
        psi     density psi(x)\n  \
        m0..m3  moments M_p(x, n) = sum_k (k/n - x)^p psi(nx - k)\n  \
        n_m1    n * M_1(x, n), a function of frac_nx only")]
    KernelDump(Flags),
    /// Metric-weighted operator on a chart preset (euclidean, torus, poincare-half-plane).
    Manifold(Flags),
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// JSON config file; its keys match the long flag names with '_' for '-'.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Print the resolved config as JSON and exit without running.
    #[arg(long)]
    pub print_config: bool,
    /// Activation deformation q, 0 < q < 1 [default: 0.5].
    #[arg(long)]
    pub q: Option<f64>,
    /// Activation steepness alpha > 0 [default: 1].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Operator for `converge` [default: basic].
    #[arg(long, value_enum)]
    pub operator: Option<OperatorChoice>,
    /// Fractional order, 0 < beta < 1 (required by `frac`).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Gauss-Legendre nodes per axis for Kantorovich cells, 2..=64 [default: 5].
    #[arg(long = "nodes")]
    pub quadrature_nodes: Option<usize>,
    /// L1 grid step for D^beta, 0 < h <= 0.1 [default: 1e-3].
    #[arg(long)]
    pub frac_step: Option<f64>,
    /// Function preset: zero, constant, linear, quadratic, cubic, sin, exp, runge,
    /// abspow, pow<p> (p >= 0), sin-exp, quadratic-2d.
    #[arg(long)]
    pub preset: Option<String>,
    /// Chart for `manifold`: euclidean, torus, poincare-half-plane [default: poincare-half-plane].
    #[arg(long)]
    pub chart: Option<String>,
    /// Weight normalisation on charts [default: discrete].
    #[arg(long = "mode", value_enum)]
    pub renormalization: Option<ModeChoice>,
    /// Comma-separated lattice scales n >= 1 [default: 16,32,64,128,256,512;
    /// manifold: 32,64,128,256].
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u32>>,
    /// Comma-separated lower grid corner, one value per axis [default: 0; frac: 0.2;
    /// half-plane: -1,1].
    #[arg(long = "lo", value_delimiter = ',', allow_negative_numbers = true)]
    pub grid_lo: Option<Vec<f64>>,
    /// Comma-separated upper grid corner [default: 1; half-plane: 1,2].
    #[arg(long = "hi", value_delimiter = ',', allow_negative_numbers = true)]
    pub grid_hi: Option<Vec<f64>>,
    /// Grid points per axis, >= 1 [default: 101; 2-D: 21].
    #[arg(long = "points")]
    pub grid_points: Option<usize>,
    /// Kernel truncation tolerance, 0 < eps < 1 [default: 1e-12].
    #[arg(long = "eps")]
    pub truncation_tolerance: Option<f64>,
    /// Highest Voronovskaya correction order, 1..=4 [default: 2].
    #[arg(long)]
    pub m_max: Option<usize>,
    /// Output path stem; writes <stem>.csv and <stem>.json [default: command name].
    #[arg(long, value_name = "STEM")]
    pub output: Option<PathBuf>,
    /// csv writes the table plus a JSON sidecar; json writes the report only [default: csv].
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

impl Sub {
    pub fn split(&self) -> (Command, &Flags) {
        match self {
            Sub::Converge(f) => (Command::Converge, f),
            Sub::Voronovskaya(f) => (Command::Voronovskaya, f),
            Sub::Frac(f) => (Command::Frac, f),
            Sub::KernelDump(f) => (Command::KernelDump, f),
            Sub::Manifold(f) => (Command::Manifold, f),
        }
    }
}

impl Flags {
    pub fn to_config(&self, command: Command) -> ExperimentConfig {
        ExperimentConfig {
            command: Some(command),
            q: self.q,
            alpha: self.alpha,
            operator: self.operator,
            beta: self.beta,
            quadrature_nodes: self.quadrature_nodes,
            frac_step: self.frac_step,
            preset: self.preset.clone(),
            chart: self.chart.clone(),
            renormalization: self.renormalization,
            n: self.n.clone(),
            grid_lo: self.grid_lo.clone(),
            grid_hi: self.grid_hi.clone(),
            grid_points: self.grid_points,
            truncation_tolerance: self.truncation_tolerance,
            m_max: self.m_max,
            output: self.output.clone(),
            format: self.format,
        }
    }
}
