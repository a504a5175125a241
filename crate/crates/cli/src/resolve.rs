//! Flags to run configurations.

use sampboost::bench::{Algorithm, CurveOptions, TaskKind, TaskSpec};
use sampboost::boost::{BoostConfig, ViolationPolicy, DEFAULT_A_CONST};
use sampboost::verify::StabilityOptions;

use crate::args::*;
use crate::commands::load_csv;
use crate::config::*;
use crate::{CliError, CliResult};

pub fn resolve(command: Command) -> CliResult<RunConfig> {
    Ok(match command {
        Command::Train(a) => RunConfig::Train(TrainConfig {
            data: data_source(&a.data, a.boost.seed)?,
            learner: learner(&a.learner),
            boost: boost(&a.boost),
        }),
        Command::Audit(a) => RunConfig::Audit(audit(a)?),
        Command::Stability(a) => RunConfig::Stability(StabilityConfig {
            suite: a.suite,
            options: StabilityOptions {
                trials: a.trials,
                seed: a.seed,
                exact_limit: a.exact_limit,
                significance: a.significance,
            },
        }),
        Command::Curve(a) => RunConfig::Curve(sweep(a, &[Algorithm::SampledBoost])),
        Command::Compare(a) => RunConfig::Compare(sweep(a, &Algorithm::ALL)),
        Command::CompressCheck(a) => RunConfig::CompressCheck(CompressConfig {
            data: data_source(&a.data, a.boost.seed)?,
            learner: learner(&a.learner),
            boost: boost(&a.boost),
            probes: a.probes,
        }),
        Command::Replay(_) => unreachable!("replay is resolved from its echo"),
    })
}

fn task_kind(t: TaskArg) -> TaskKind {
    match t {
        TaskArg::Threshold => TaskKind::Threshold,
        TaskArg::Interval => TaskKind::Interval,
    }
}

fn policy(p: PolicyArg) -> ViolationPolicy {
    match p {
        PolicyArg::Warn => ViolationPolicy::Warn,
        PolicyArg::Abort => ViolationPolicy::Abort,
    }
}

fn data_source(a: &DataArgs, seed: u64) -> CliResult<DataSource> {
    match (&a.data, a.task) {
        (Some(path), None) => {
            let data = load_csv(path)?;
            let path = path
                .canonicalize()
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            Ok(DataSource::Csv { path, digest: data.digest() })
        }
        (None, Some(task)) => {
            let n = a.n.ok_or_else(|| CliError::config("--task needs --n"))?;
            let mut spec = TaskSpec::new(task_kind(task), n, a.task_seed.unwrap_or(seed));
            spec.dim = a.dim;
            if let Some(t) = a.n_test {
                spec.n_test = t;
            }
            if let Some(b) = a.band {
                spec.band = b;
            }
            Ok(DataSource::Task(spec))
        }
        _ => Err(CliError::config("give exactly one of --data or --task")),
    }
}

fn learner(a: &LearnerArgs) -> LearnerConfig {
    LearnerConfig { kind: a.learner, vc_dim: a.vc_dim }
}

fn boost(a: &BoostArgs) -> BoostConfig {
    BoostConfig {
        stream: a.stream,
        upper_bound_n: a.upper_bound_n,
        a_const: a.a_const.unwrap_or(DEFAULT_A_CONST),
        k_override: a.k_override,
        m_override: a.m_override,
        k_cap: a.k_cap,
        violation_policy: policy(a.violation_policy),
        ..BoostConfig::new(a.gamma, a.delta, a.seed)
    }
}

fn audit(a: AuditArgs) -> CliResult<AuditConfig> {
    if let Some(trace) = a.trace {
        let trace = trace
            .canonicalize()
            .map_err(|e| CliError::config(format!("trace {}: {e}", trace.display())))?;
        return Ok(AuditConfig::Trace { trace, data: data_source(&a.data, a.seed)? });
    }
    let gamma = a.gamma.ok_or_else(|| CliError::config("fresh audits need --gamma (or pass --trace)"))?;
    let boost = BoostConfig {
        stream: a.stream,
        upper_bound_n: a.upper_bound_n,
        a_const: a.a_const.unwrap_or(DEFAULT_A_CONST),
        k_override: a.k_override,
        m_override: a.m_override,
        k_cap: a.k_cap,
        violation_policy: policy(a.violation_policy),
        ..BoostConfig::new(gamma, a.delta, a.seed)
    };
    Ok(AuditConfig::Fresh { data: data_source(&a.data, a.seed)?, learner: learner(&a.learner), boost, seeds: a.seeds })
}

fn sweep(a: SweepArgs, default_algorithms: &[Algorithm]) -> SweepConfig {
    let algorithms = if a.algorithms.is_empty() {
        default_algorithms.to_vec()
    } else {
        a.algorithms
            .iter()
            .map(|alg| match alg {
                AlgorithmArg::SampledBoost => Algorithm::SampledBoost,
                AlgorithmArg::Adaboost => Algorithm::AdaBoost,
                AlgorithmArg::BestStump => Algorithm::BestStump,
            })
            .collect()
    };
    let options = CurveOptions {
        dim: a.dim,
        gamma: a.gamma,
        delta: a.delta,
        a_const: a.a_const.unwrap_or(DEFAULT_A_CONST),
        k_override: a.k_override,
        k_cap: (!a.uncapped).then_some(a.k_cap),
        adaboost_rounds: a.adaboost_rounds,
        violation_policy: policy(a.violation_policy),
        ..CurveOptions::new(task_kind(a.task), a.seed)
    };
    SweepConfig { options, algorithms, grid: a.grid, trials: a.trials, bound_constant: a.bound_constant }
}
