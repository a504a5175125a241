use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::LearnerKind;

#[derive(Debug, Parser)]
#[command(name = "sampboost", version, about = "Sampled boosting: training, verification and benchmarks")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "SAMPBOOST_OUT", default_value = "sampboost-out")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a voting classifier; writes the model, the trace and metrics.
    Train(TrainArgs),
    /// Check the proof identities of a stored trace, or audit fresh runs.
    Audit(AuditArgs),
    /// Run a named stability suite.
    Stability(StabilityArgs),
    /// Learning curve of one algorithm.
    Curve(SweepArgs),
    /// Learning curves of several algorithms side by side.
    Compare(SweepArgs),
    /// Encode a run, rebuild it from the encoding, compare pointwise.
    CompressCheck(CompressArgs),
    /// Re-run a command from its config echo.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TaskArg {
    Threshold,
    Interval,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    Warn,
    Abort,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AlgorithmArg {
    SampledBoost,
    Adaboost,
    BestStump,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV dataset: feature columns then a `label` column.
    #[arg(long, conflicts_with = "task")]
    pub data: Option<PathBuf>,
    /// Generate a synthetic task instead of reading a CSV.
    #[arg(long, value_enum)]
    pub task: Option<TaskArg>,
    /// Training size of the generated task.
    #[arg(long, requires = "task")]
    pub n: Option<usize>,
    /// Test size of the generated task (default 10 n).
    #[arg(long, requires = "task")]
    pub n_test: Option<usize>,
    /// Seed of the generated task (default: --seed).
    #[arg(long, requires = "task")]
    pub task_seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Half-width of the empty band around the task boundaries.
    #[arg(long)]
    pub band: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LearnerArgs {
    #[arg(long, value_enum, default_value = "stump")]
    pub learner: LearnerKind,
    /// VC dimension declared by the planted learner (default: that of stumps).
    #[arg(long)]
    pub vc_dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BoostArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Guaranteed weak-learner advantage, in (0, 1/2].
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Upper bound N on the sample size (default n).
    #[arg(long)]
    pub upper_bound_n: Option<u64>,
    /// Constant of the subsample size.
    #[arg(long)]
    pub a_const: Option<f64>,
    #[arg(long)]
    pub k_override: Option<usize>,
    #[arg(long)]
    pub m_override: Option<usize>,
    /// Cap on the formula ensemble size.
    #[arg(long)]
    pub k_cap: Option<usize>,
    #[arg(long, value_enum, default_value = "warn")]
    pub violation_policy: PolicyArg,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[command(flatten)]
    pub boost: BoostArgs,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// Trace to check; omit to audit fresh runs.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Number of fresh runs.
    #[arg(long, default_value_t = 20)]
    pub seeds: usize,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    /// Boosting settings of fresh runs; `--gamma` is required for them.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long)]
    pub upper_bound_n: Option<u64>,
    #[arg(long)]
    pub a_const: Option<f64>,
    #[arg(long)]
    pub k_override: Option<usize>,
    #[arg(long)]
    pub m_override: Option<usize>,
    #[arg(long)]
    pub k_cap: Option<usize>,
    #[arg(long, value_enum, default_value = "warn")]
    pub violation_policy: PolicyArg,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    /// One of k1-family, k2-family, standard, stump-k2.
    #[arg(long)]
    pub suite: String,
    /// Runs per arm.
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4096)]
    pub exact_limit: usize,
    #[arg(long, default_value_t = 0.001)]
    pub significance: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "interval")]
    pub task: TaskArg,
    /// Training sizes, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub grid: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Algorithms, comma separated (curve: sampled-boost; compare: all).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub algorithms: Vec<AlgorithmArg>,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Weak-learner advantage; estimated from a probe of the task if absent.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long)]
    pub a_const: Option<f64>,
    #[arg(long)]
    pub k_override: Option<usize>,
    /// Cap on the formula ensemble size.
    #[arg(long, default_value_t = sampboost::bench::DEFAULT_K_CAP, conflicts_with = "uncapped")]
    pub k_cap: usize,
    /// Use the formula ensemble size without a cap.
    #[arg(long)]
    pub uncapped: bool,
    #[arg(long, default_value_t = 100)]
    pub adaboost_rounds: usize,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, value_enum, default_value = "warn")]
    pub violation_policy: PolicyArg,
    /// Constant of the sample-complexity bound overlay.
    #[arg(long, default_value_t = 1.0)]
    pub bound_constant: f64,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[command(flatten)]
    pub boost: BoostArgs,
    /// Off-sample probe points.
    #[arg(long, default_value_t = 1000)]
    pub probes: usize,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// A `config-echo.json` written by an earlier run.
    #[arg(long)]
    pub config: PathBuf,
}
