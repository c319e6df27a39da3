use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(
    name = "irp",
    version,
    about = "Binary inductive randomness predictors"
)]
pub struct Cli {
    /// TOML file with default values for any flag (flags win).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Asymptotic numerators a_k of the IRP incertitude against the ICP's k+1.
    Table(TableArgs),
    /// Binary IRP p-value for k ones among m calibration summaries.
    Pvalue(PvalueArgs),
    /// Hedged predictions for every row of a test CSV.
    Predict(PredictArgs),
    /// Exact p-variable audits or a Monte Carlo coverage run.
    Validate(ValidateArgs),
    /// Check that the threshold construction strictly dominates the ICP.
    Dominate(DominateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskArg {
    Regression,
    Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Irp,
    Icp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EngineArgs {
    /// Points in each maximization grid (>= 64).
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Golden-section stopping width.
    #[arg(long)]
    pub refine_tol: Option<f64>,
    /// Bisection stopping width for asymptotic constants.
    #[arg(long)]
    pub constant_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_name = "K")]
    pub k_max: Option<u32>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Same as --format json.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct PvalueArgs {
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    /// Exact finite-m p-value (default).
    #[arg(long, conflicts_with = "asymptotic")]
    pub finite: bool,
    /// Large-m approximation a_k / m.
    #[arg(long)]
    pub asymptotic: bool,
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Training CSV: feature columns then a label column.
    #[arg(long, value_name = "FILE")]
    pub train: Option<PathBuf>,
    /// Number l of leading training rows used as the proper training set.
    #[arg(long, value_name = "L")]
    pub split_at: Option<usize>,
    /// Test CSV: the same feature columns, optionally followed by a label.
    #[arg(long, value_name = "FILE")]
    pub test: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub task: Option<TaskArg>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Seed for the classifier's initialization.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub regularization: Option<f64>,
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Calibration size.
    #[arg(long)]
    pub m: Option<usize>,
    /// Proper training size (Monte Carlo only).
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Threshold of the dominating p-variable (exact mode).
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_enum)]
    pub task: Option<TaskArg>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Noise half-width (regression) or label-flip probability
    /// (classification) of the generator.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct DominateArgs {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub json: bool,
}
