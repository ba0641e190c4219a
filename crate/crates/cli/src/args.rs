use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{invalid, CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "acciht", version, about = "Accelerated IHT solvers and convergence analysis")]
pub struct Cli {
    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the solver on a generated or saved instance.
    Solve(SolveArgs),
    /// Classify convergence over a grid of momentum values.
    TauSweep(SweepArgs),
    /// Contraction system, momentum range and error bounds.
    Analyze(AnalyzeArgs),
    /// The line-search momentum counterexample.
    Counterexample(CounterexampleArgs),
    /// Generate an instance and save it to a directory.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Iid,
    Ar1,
    Completion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Acc,
    Iht,
}

/// Where the problem comes from: a generator or an instance directory.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SourceArgs {
    #[arg(long, value_enum)]
    pub gen: Option<Generator>,
    /// Instance directory written by `gen` (a train/test pair is loaded together).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Signal length (columns for completion).
    #[arg(long)]
    pub n: Option<usize>,
    /// Measurements.
    #[arg(long)]
    pub m: Option<usize>,
    /// Sparsity.
    #[arg(long)]
    pub k: Option<usize>,
    /// Noise standard deviation (iid).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Rows before the train/test split (ar1).
    #[arg(long)]
    pub m_total: Option<usize>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub snr: Option<f64>,
    /// Matrix rows (completion).
    #[arg(long)]
    pub p: Option<usize>,
    /// Rank (completion).
    #[arg(long)]
    pub r: Option<usize>,
    /// Observed fraction (completion).
    #[arg(long)]
    pub frac: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Solver settings; `--mu` takes a number, `auto` or `line-search`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub debias: bool,
    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,
    /// Restricted condition number, for the momentum-range warning.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Projection budget above the true sparsity (overshoot).
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveArgs {
    /// JSON file with any of these options; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Output directory for trace.csv, trace.json, metrics.json and config.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Independent runs with seeds seed, seed+1, ...
    #[arg(long)]
    pub reps: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Comma-separated momentum values.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub taus: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau_max: Option<f64>,
    #[arg(long)]
    pub tau_steps: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write one trace CSV per grid point.
    #[arg(long)]
    pub traces: bool,
    #[arg(long)]
    pub reps: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalyzeArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Design matrix file; RIP constants are enumerated at levels 2k and 3k.
    #[arg(long)]
    pub phi: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Use extreme Hessian eigenvalues instead of enumeration.
    #[arg(long)]
    pub surrogate: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// ‖x★‖.
    #[arg(long)]
    pub x_norm: Option<f64>,
    /// ‖ε‖.
    #[arg(long)]
    pub eps_norm: Option<f64>,
    /// Coefficient of ‖ε‖ per iteration (derived from the RIP constants when --phi is given).
    #[arg(long)]
    pub noise_coef: Option<f64>,
    /// Target accuracy for the iteration bound.
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CounterexampleArgs {
    /// Grid points on τ ∈ [0, 1].
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct GenArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replace an existing output directory.
    #[arg(long)]
    pub force: bool,
}

fn strip_unset(v: Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(
            map.into_iter()
                .filter(|(_, v)| !matches!(v, Value::Null | Value::Bool(false)))
                .collect(),
        ),
        other => other,
    }
}

/// Overlays the flags that were set onto the options in `config`.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> CliResult<T> {
    let Some(path) = config else {
        return Ok(serde_json::from_value(serde_json::to_value(flags)?)?);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let base: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let Value::Object(mut base) = base else {
        return invalid(format!("{}: expected a JSON object", path.display()));
    };
    if let Value::Object(over) = strip_unset(serde_json::to_value(flags)?) {
        base.extend(over);
    }
    serde_json::from_value(Value::Object(base))
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// The effective options, without unset fields, as written to `config.json`.
pub fn echo<T: Serialize>(args: &T) -> CliResult<Value> {
    Ok(strip_unset(serde_json::to_value(args)?))
}
