use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Tail probabilities of C/I and C/(I+N) in shotgun cellular systems.
#[derive(Debug, Parser)]
#[command(name = "scs", version, about)]
pub struct Cli {
    /// Cap on worker threads; defaults to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tail curves by one or more methods, plus a comparison table.
    Tail(TailArgs),
    /// Write the equivalent spec after fading absorption, path-loss or noise
    /// canonicalization, or the full reduction.
    Transform(TransformArgs),
    /// Tail curves while one parameter varies, in long format.
    Sweep(SweepArgs),
    /// Repeat the run recorded in a manifest.
    Rerun(RerunArgs),
}

/// Spec file and overrides. Flags take precedence over the file.
#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// System spec in JSON.
    #[arg(long)]
    pub spec: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Override the intensity of a homogeneous density.
    #[arg(long)]
    pub lambda0: Option<f64>,
    /// Override the exponent of a power-law path loss.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Override the noise power N.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Override the transmit gain K.
    #[arg(long)]
    pub gain: Option<f64>,
    /// Replace the fading by log-normal fading with this deviation in dB.
    #[arg(long)]
    pub sigma_db: Option<f64>,
}

/// Threshold grid: explicit values, or log-spaced points.
#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.1)]
    pub eta_min: f64,
    #[arg(long, default_value_t = 50.0)]
    pub eta_max: f64,
    #[arg(long, default_value_t = 20)]
    pub eta_points: usize,
    /// Also evaluate at eta = 0.
    #[arg(long)]
    pub eta_zero: bool,
    /// Comma-separated thresholds; replaces the log-spaced grid.
    #[arg(long, value_delimiter = ',')]
    pub eta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 20_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Simulation radius; chosen automatically when absent.
    #[arg(long)]
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Analytic,
    Mc,
    Fewbs,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct TailArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
    pub method: MethodArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Fading,
    Pathloss,
    Noise,
    Reduce,
}

#[derive(Debug, Clone, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, value_enum)]
    pub which: Which,
    /// Simulate the original and the transformed system and compare.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Parameter {
    Epsilon,
    Noise,
    Lambda0,
    Sigma,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, value_enum)]
    pub parameter: Parameter,
    /// Comma-separated parameter values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
    pub method: MethodArg,
}

#[derive(Debug, Clone, Args)]
pub struct RerunArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
    /// Write into this directory instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
