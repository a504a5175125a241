//! Resolved run configurations. Each command is driven entirely by one of
//! these; the same value is written to `config-echo.json` and read back by
//! `replay`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use sampboost::bench::{Algorithm, CurveOptions, TaskSpec};
use sampboost::boost::BoostConfig;
use sampboost::verify::StabilityOptions;

pub const ECHO_FILE: &str = "config-echo.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    pub schema: u32,
    pub version: String,
    pub run: RunConfig,
}

impl ConfigEcho {
    pub fn new(run: RunConfig) -> Self {
        ConfigEcho { schema: sampboost::SCHEMA_VERSION, version: env!("CARGO_PKG_VERSION").to_string(), run }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RunConfig {
    Train(TrainConfig),
    Audit(AuditConfig),
    Stability(StabilityConfig),
    Curve(SweepConfig),
    Compare(SweepConfig),
    CompressCheck(CompressConfig),
}

impl RunConfig {
    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::Train(_) => "train",
            RunConfig::Audit(_) => "audit",
            RunConfig::Stability(_) => "stability",
            RunConfig::Curve(_) => "curve",
            RunConfig::Compare(_) => "compare",
            RunConfig::CompressCheck(_) => "compress-check",
        }
    }
}

/// A CSV file pinned by its content digest, or a generated task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Csv { path: PathBuf, digest: String },
    Task(TaskSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    /// ERM decision stump.
    Stump,
    /// Fixed-advantage learner planted on the true labelling.
    Planted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerConfig {
    pub kind: LearnerKind,
    /// VC dimension declared by the planted learner.
    pub vc_dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub data: DataSource,
    pub learner: LearnerConfig,
    pub boost: BoostConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AuditConfig {
    /// Identity checks over a stored trace.
    Trace { trace: PathBuf, data: DataSource },
    /// Margin audit over fresh runs.
    Fresh { data: DataSource, learner: LearnerConfig, boost: BoostConfig, seeds: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    pub suite: String,
    pub options: StabilityOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub options: CurveOptions,
    pub algorithms: Vec<Algorithm>,
    pub grid: Vec<usize>,
    pub trials: usize,
    pub bound_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressConfig {
    pub data: DataSource,
    pub learner: LearnerConfig,
    pub boost: BoostConfig,
    /// Random off-sample points on which the reconstruction is compared.
    pub probes: usize,
}
