//! Argument definitions for the `quotail` binary.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

/// Simulation and density analysis for quotients of jump-diffusion legs.
#[derive(Debug, Parser)]
#[command(name = "quotail", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw leg pairs, quotients, or transformed relative changes to CSV.
    Simulate(SimulateArgs),
    /// Evaluate the quotient density at points or over a grid.
    Density(DensityArgs),
    /// Fit a tail exponent to a sample file.
    Tail(TailArgs),
    /// Report the aggregate leg correlation and its attainable band.
    Corr(CorrArgs),
    /// Simulate a price path driven by a model, a grid, or a GBM baseline.
    Path(PathArgs),
    /// Fit the price-function exponent from supply/demand observations.
    Calibrate(CalibrateArgs),
}

/// What `simulate` writes per draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmitKind {
    /// Raw legs and jump counts: columns `r1,r2,k1,k2`.
    Batch,
    /// Scaled quotients: a single `value` column.
    Quotient,
    /// Relative price changes `G_eps(quotient)`: a single `value` column.
    Rc,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Model parameters (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Number of draws.
    #[arg(long)]
    pub n: usize,
    /// RNG seed.
    #[arg(long)]
    pub seed: u64,
    /// RNG stream id, for disjoint parallel runs under one seed.
    #[arg(long, default_value_t = 0)]
    pub stream_id: u64,
    /// Worker threads for the draw (output is identical for any count).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output kind.
    #[arg(long, value_enum, default_value_t = EmitKind::Batch)]
    pub emit: EmitKind,
    /// Keep only draws with both legs positive (quotient and rc only).
    #[arg(long)]
    pub condition_positive: bool,
    /// Price-function parameters (JSON); required for --emit rc.
    #[arg(long, required_if_eq("emit", "rc"))]
    pub pf: Option<PathBuf>,
    /// Output CSV path; a `.meta.json` and `.manifest.json` sit beside it.
    #[arg(long)]
    pub out: PathBuf,
}

/// Which density evaluator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Mixture-of-rays quadrature (conditionally correlated models).
    Quadrature,
    /// Leading-order tail approximation, valid for large |x|.
    Asymptotic,
    /// Density conditioned on both legs positive.
    Conditional,
    /// Closed-form mixture (anti-correlated models).
    Exact,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("points").required(true).args(["x", "grid"])))]
pub struct DensityArgs {
    /// Model parameters (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Evaluator.
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Single evaluation point.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Evenly spaced sweep: START STOP COUNT.
    #[arg(long, num_args = 3, allow_hyphen_values = true, value_names = ["START", "STOP", "COUNT"])]
    pub grid: Option<Vec<f64>>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Which tail estimator to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    /// Hill estimator over the largest order statistics.
    Hill,
    /// Least squares on the log-log empirical survival function.
    LoglogSurvival,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    /// Input CSV with a `value` column.
    #[arg(long)]
    pub input: PathBuf,
    /// Estimator.
    #[arg(long, value_enum)]
    pub estimator: EstimatorArg,
    /// Tail order statistics for the Hill estimator (default scales with n).
    #[arg(long, conflicts_with_all = ["x_min", "x_max"])]
    pub top_k: Option<usize>,
    /// Lower edge of the survival-fit window.
    #[arg(long, required_if_eq("estimator", "loglog-survival"))]
    pub x_min: Option<f64>,
    /// Upper edge of the survival-fit window.
    #[arg(long, required_if_eq("estimator", "loglog-survival"))]
    pub x_max: Option<f64>,
    /// Fit |value| instead of value.
    #[arg(long)]
    pub absolute: bool,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrArgs {
    /// Model parameters (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Also report the aggregate correlation at this constant jump-level
    /// correlation.
    #[arg(long, allow_hyphen_values = true)]
    pub jump_rho: Option<f64>,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("driver").required(true).args(["config", "gbm_sigma"])))]
pub struct PathArgs {
    /// Path configuration (JSON) holding the price function and a model or
    /// grid driver.
    #[arg(long, conflicts_with_all = ["gbm_mu", "gbm_sigma", "gbm_dt", "p0", "steps"])]
    pub config: Option<PathBuf>,
    /// RNG seed.
    #[arg(long)]
    pub seed: u64,
    /// RNG stream id.
    #[arg(long, default_value_t = 0)]
    pub stream_id: u64,
    /// GBM baseline drift.
    #[arg(long, allow_hyphen_values = true, requires_all = ["gbm_sigma", "gbm_dt", "p0", "steps"])]
    pub gbm_mu: Option<f64>,
    /// GBM baseline volatility.
    #[arg(long, requires_all = ["gbm_mu", "gbm_dt", "p0", "steps"])]
    pub gbm_sigma: Option<f64>,
    /// GBM baseline step size.
    #[arg(long)]
    pub gbm_dt: Option<f64>,
    /// GBM baseline starting price.
    #[arg(long)]
    pub p0: Option<f64>,
    /// GBM baseline step count.
    #[arg(long)]
    pub steps: Option<u32>,
    /// Output CSV path with columns `step,price,snapped`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Input CSV with columns `demand,supply,rel_change`.
    #[arg(long)]
    pub input: PathBuf,
    /// Model parameters (JSON), needed for the drawdown probability.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also report the probability of a single-step relative drop below
    /// this negative threshold, under the fitted price function.
    #[arg(long, allow_hyphen_values = true, requires = "config")]
    pub drawdown_threshold: Option<f64>,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}
