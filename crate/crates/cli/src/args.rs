use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Almost-periodic Fourier series toolkit.
///
/// Every numeric flag can also be set in a `--config` file (`key = value`,
/// keys are the long flag names). Command-line flags win over the config file,
/// which wins over the built-in defaults.
#[derive(Debug, Parser)]
#[command(name = "apfourier", version)]
pub struct Cli {
    /// Output format [default: json]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every random quantity [default: 42]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads [default: machine parallelism]
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Config file in the key = value format
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stepanov norm, Besicovitch semi-norm, Fourier coefficient or Bessel check
    Norm(NormArgs),
    /// Partial sums at one point or on a grid
    Eval(EvalArgs),
    /// Maximal function of the partial sums on a grid
    Maximal(MaximalArgs),
    /// Sufficient convergence conditions
    Check(CheckArgs),
    /// Reduce a series to Dirichlet form (u = floor(2^lambda))
    Reduce(ReduceArgs),
    /// Quadruple triangle-kernel sum M of the frequencies
    Quad(QuadArgs),
    /// Sidon test for integer frequencies
    Sidon(FreqArgs),
    /// Numerical Fourier transform of the Fejér density
    Tau(TauArgs),
    /// Seeded Monte-Carlo experiments
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// Series file
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Section of the series file to read
    #[arg(long)]
    pub section: Option<String>,
    /// Read a dilated series (sections [outer] and [inner])
    #[arg(long)]
    pub dilated: bool,
}

#[derive(Debug, Args)]
pub struct StepanovArgs {
    /// First window start [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    /// Last window start [default: 100]
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    /// Window start step [default: 0.05]
    #[arg(long)]
    pub x_step: Option<f64>,
    /// Sample step inside a window [default: 0.001]
    #[arg(long)]
    pub t_step: Option<f64>,
    /// Quadrature rule, trapezoid or simpson [default: simpson]
    #[arg(long)]
    pub rule: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Stepanov,
    Besicovitch,
    Coefficient,
    Bessel,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[command(flatten)]
    pub input: SeriesArgs,
    #[command(flatten)]
    pub stepanov: StepanovArgs,
    /// Quantity to estimate [default: stepanov]
    #[arg(long, value_enum)]
    pub measure: Option<Measure>,
    /// Apply the Stepanov norm to the maximal function of the partial sums
    #[arg(long)]
    pub maximal: bool,
    /// Number of outer terms [default: all]
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Inner truncation of a dilated series [default: all]
    #[arg(long)]
    pub inner_trunc: Option<usize>,
    /// Comma-separated increasing horizons [default: 100,316.2...,1000,3162.2...,10000]
    #[arg(long)]
    pub horizons: Option<String>,
    /// Frequency of the Fourier coefficient
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Horizon T of the coefficient mean [default: 10000]
    #[arg(long)]
    pub t_horizon: Option<f64>,
    /// Relative tolerance of the Bessel check [default: 0.05]
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Grid start [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    /// Grid end [default: 10]
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    /// Grid step [default: 0.01]
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub input: SeriesArgs,
    /// Single evaluation point (otherwise the grid flags are used)
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Number of terms [default: all]
    #[arg(long)]
    pub n: Option<usize>,
    /// Treat the coefficients as a Dirichlet series, sum a_k k^{it}
    #[arg(long)]
    pub dirichlet: bool,
    /// Inner truncation of a dilated series [default: all]
    #[arg(long)]
    pub inner_trunc: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MaximalArgs {
    #[command(flatten)]
    pub input: SeriesArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Largest partial sum index [default: all]
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Condition {
    Wiener,
    Hs,
    Interp,
    All,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub which: Condition,
    #[command(flatten)]
    pub input: SeriesArgs,
    /// Exponent on the outer block sums [default: 4/3]
    #[arg(long)]
    pub p: Option<f64>,
    /// Exponent on the inner block sums [default: 4/3]
    #[arg(long)]
    pub q: Option<f64>,
    /// Tolerance on 1/p + 1/q = 3/2 [default: 1e-6]
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub input: SeriesArgs,
}

#[derive(Debug, Args)]
pub struct FreqArgs {
    /// Series file whose frequencies are used
    #[arg(long)]
    pub freq: Option<PathBuf>,
    /// Section of the file to read
    #[arg(long)]
    pub section: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Naive,
    Fast,
}

#[derive(Debug, Args)]
pub struct QuadArgs {
    #[command(flatten)]
    pub input: FreqArgs,
    /// Algorithm [default: fast]
    #[arg(long, value_enum)]
    pub method: Option<Method>,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    /// Transform variable
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Integration horizon T [default: 10000]
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Quadrature step [default: 0.01]
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(subcommand)]
    pub which: Experiment,
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Grid sup of Rademacher Dirichlet polynomials against n / ln(n+1)
    Halasz(HalaszArgs),
    /// Divergent Wiener sums with Stepanov-convergent dyadic blocks
    Prop27(Prop27Args),
    /// Empirical LHS/RHS ratios of the maximal inequalities
    Constants(ConstantsArgs),
}

#[derive(Debug, Args)]
pub struct HalaszArgs {
    /// Comma-separated polynomial lengths [default: 64,256,1024]
    #[arg(long)]
    pub n: Option<String>,
    /// Monte-Carlo trials [default: 64]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Grid start [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    /// Grid end [default: 200]
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    /// Grid step [default: 0.005]
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Prop27Args {
    /// Number of coefficients [default: 65536]
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Largest dyadic block whose Stepanov norm is estimated [default: 10]
    #[arg(long)]
    pub max_block: Option<u32>,
    #[command(flatten)]
    pub stepanov: StepanovArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InequalityArg {
    Gen,
    Dilated,
    Interp,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    /// Inequality [default: gen]
    #[arg(long, value_enum)]
    pub inequality: Option<InequalityArg>,
    /// Outer exponent for interp [default: 4/3]
    #[arg(long)]
    pub p: Option<f64>,
    /// Inner exponent for interp [default: 4/3]
    #[arg(long)]
    pub q: Option<f64>,
    /// Random instances [default: 50]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Terms per instance (outer terms for dilated) [default: 128, or 32 for dilated]
    #[arg(long)]
    pub n: Option<usize>,
    /// Inner terms for dilated instances [default: 8]
    #[arg(long)]
    pub inner_n: Option<usize>,
    #[command(flatten)]
    pub stepanov: StepanovArgs,
}
