use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tasks::{estimate_gamma, gen_task, TaskKind, TaskSpec};
use crate::boost::{adaboost, sampled_boost_streaming, BoostConfig, Ensemble, ViolationPolicy, VotingClassifier};
use crate::dataset::Dataset;
use crate::rng::derive_stream_id;
use crate::weak::{Hypothesis, StumpLearner};
use crate::{Error, Result};

/// Default cap on the formula ensemble size in sweeps.
pub const DEFAULT_K_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    SampledBoost,
    #[serde(rename = "adaboost")]
    AdaBoost,
    BestStump,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::SampledBoost, Algorithm::AdaBoost, Algorithm::BestStump];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SampledBoost => "sampled_boost",
            Algorithm::AdaBoost => "adaboost",
            Algorithm::BestStump => "best_stump",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm {s:?}")))
    }

    fn id(self) -> u64 {
        self as u64 + 1
    }
}

/// Settings shared by every point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveOptions {
    pub task: TaskKind,
    pub dim: usize,
    pub master_seed: u64,
    /// Weak-learner advantage; estimated from a probe of the task when absent.
    pub gamma: Option<f64>,
    pub delta: f64,
    pub a_const: f64,
    pub k_override: Option<usize>,
    pub k_cap: Option<usize>,
    pub adaboost_rounds: usize,
    pub violation_policy: ViolationPolicy,
}

impl CurveOptions {
    pub fn new(task: TaskKind, master_seed: u64) -> Self {
        CurveOptions {
            task,
            dim: 1,
            master_seed,
            gamma: None,
            delta: 0.1,
            a_const: crate::boost::DEFAULT_A_CONST,
            k_override: None,
            k_cap: Some(DEFAULT_K_CAP),
            adaboost_rounds: 100,
            violation_policy: ViolationPolicy::Warn,
        }
    }

    /// The configured advantage, or the probe estimate.
    pub fn resolve_gamma(&self) -> Result<f64> {
        match self.gamma {
            Some(g) => Ok(g),
            None => estimate_gamma(self.task, self.dim, derive_stream_id(&[self.master_seed, PROBE_TAG])),
        }
    }
}

const PROBE_TAG: u64 = 0x7072_6f62_65;
const DATA_TAG: u64 = 0x6461_7461;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub algorithm: Algorithm,
    pub n: usize,
    pub trial: usize,
    pub train_error: Option<f64>,
    pub test_error: Option<f64>,
    /// Binomial standard error of the test error.
    pub test_error_se: Option<f64>,
    pub min_margin: Option<f64>,
    /// Number of base hypotheses in the output.
    pub rounds: Option<usize>,
    pub wall_time_ms: f64,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub options: CurveOptions,
    pub gamma: f64,
    pub points: Vec<CurvePoint>,
}

/// Runs every `(n, trial, algorithm)` combination. Train and test sets are
/// drawn per `(n, trial)` and shared by the algorithms; each algorithm owns a
/// stream derived from `(master seed, algorithm, n, trial)`. Points come
/// back in grid order whatever the scheduling.
pub fn learning_curve(options: &CurveOptions, algorithms: &[Algorithm], grid: &[usize], trials: usize) -> Result<Curve> {
    if grid.is_empty() {
        return Err(Error::invalid("n grid is empty"));
    }
    if algorithms.is_empty() {
        return Err(Error::invalid("no algorithms selected"));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if let Some(&n) = grid.iter().find(|&&n| n == 0) {
        return Err(Error::invalid(format!("grid size {n} must be at least 1")));
    }
    let gamma = options.resolve_gamma()?;
    boost_config(options, gamma, Algorithm::SampledBoost, 1, 0).validate()?;
    if options.adaboost_rounds == 0 {
        return Err(Error::invalid("AdaBoost needs at least one round"));
    }

    let cells: Vec<(usize, usize)> = grid.iter().flat_map(|&n| (0..trials).map(move |t| (n, t))).collect();
    let points = cells
        .par_iter()
        .flat_map_iter(|&(n, trial)| run_cell(options, gamma, algorithms, n, trial))
        .collect();
    Ok(Curve { options: options.clone(), gamma, points })
}

fn run_cell(options: &CurveOptions, gamma: f64, algorithms: &[Algorithm], n: usize, trial: usize) -> Vec<CurvePoint> {
    let spec = TaskSpec {
        dim: options.dim,
        seed: derive_stream_id(&[options.master_seed, DATA_TAG, n as u64, trial as u64]),
        ..TaskSpec::new(options.task, n, 0)
    };
    let task = gen_task(&spec);
    algorithms
        .iter()
        .map(|&alg| {
            let start = Instant::now();
            let outcome = task.as_ref().map_err(|e| e.to_string()).and_then(|t| {
                fit_and_score(options, gamma, alg, n, trial, &t.train, &t.test).map_err(|e| e.to_string())
            });
            let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
            match outcome {
                Ok(s) => CurvePoint {
                    algorithm: alg,
                    n,
                    trial,
                    train_error: Some(s.train_error),
                    test_error: Some(s.test_error),
                    test_error_se: Some((s.test_error * (1.0 - s.test_error) / s.n_test as f64).sqrt()),
                    min_margin: Some(s.min_margin),
                    rounds: Some(s.rounds),
                    wall_time_ms,
                    failure: None,
                },
                Err(msg) => CurvePoint {
                    algorithm: alg,
                    n,
                    trial,
                    train_error: None,
                    test_error: None,
                    test_error_se: None,
                    min_margin: None,
                    rounds: None,
                    wall_time_ms,
                    failure: Some(msg),
                },
            }
        })
        .collect()
}

fn boost_config(options: &CurveOptions, gamma: f64, alg: Algorithm, n: usize, trial: usize) -> BoostConfig {
    BoostConfig {
        a_const: options.a_const,
        k_override: options.k_override,
        k_cap: options.k_cap,
        violation_policy: options.violation_policy,
        stream: derive_stream_id(&[alg.id(), n as u64, trial as u64]),
        ..BoostConfig::new(gamma, options.delta, options.master_seed)
    }
}

struct Scores {
    train_error: f64,
    test_error: f64,
    min_margin: f64,
    rounds: usize,
    n_test: usize,
}

fn score<E: Ensemble>(model: &E, rounds: usize, train: &Dataset, test: &Dataset) -> Scores {
    Scores {
        train_error: model.training_error(train),
        test_error: model.training_error(test),
        min_margin: model.min_margin(train),
        rounds,
        n_test: test.len(),
    }
}

fn fit_and_score(
    options: &CurveOptions,
    gamma: f64,
    alg: Algorithm,
    n: usize,
    trial: usize,
    train: &Dataset,
    test: &Dataset,
) -> Result<Scores> {
    let learner = StumpLearner::new(gamma, train.dim())?;
    match alg {
        Algorithm::SampledBoost => {
            let config = boost_config(options, gamma, alg, n, trial);
            let mut hypotheses = Vec::new();
            sampled_boost_streaming(train, &learner, &config, |r| {
                hypotheses.push(r.hypothesis.clone());
                Ok(())
            })?;
            let vc = VotingClassifier::new(hypotheses)?;
            Ok(score(&vc, vc.len(), train, test))
        }
        Algorithm::AdaBoost => {
            let (vc, _) = adaboost(train, &learner, options.adaboost_rounds)?;
            Ok(score(&vc, vc.len(), train, test))
        }
        Algorithm::BestStump => {
            let (s, _) = crate::weak::train_stump_weighted(train, &vec![1.0 / n as f64; n])?;
            let vc = VotingClassifier::new(vec![Hypothesis::Stump(s)])?;
            Ok(score(&vc, 1, train, test))
        }
    }
}
