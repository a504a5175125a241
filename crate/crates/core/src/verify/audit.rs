use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::approx::{deviation_from_counts, HypothesisClass, APPROX_TOLERANCE};
use super::identities::{telescoping_residual, zk_closed_form, TELESCOPING_TOLERANCE, ZK_TOLERANCE};
use crate::boost::{alpha_of, sampled_boost_streaming, BoostConfig};
use crate::dataset::Dataset;
use crate::rng::derive_stream_id;
use crate::weak::WeakLearner;
use crate::{Error, Result, SCHEMA_VERSION};

/// One audited boosting run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunAudit {
    pub stream: u64,
    /// `min_i y_i f(x_i)`.
    pub min_margin: f64,
    pub train_error: f64,
    /// Rounds whose subsample is not a `gamma/2`-approximation of `D_k`.
    pub approx_failures: usize,
    /// Rounds where the learner missed its advantage on the subsample.
    pub violations: usize,
    pub telescoping_residual: f64,
    pub zk_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginAuditReport {
    pub schema: u32,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub gamma: f64,
    pub delta: f64,
    pub seed: u64,
    /// `gamma / 128`.
    pub margin_threshold: f64,
    /// `gamma^2 K / 16`.
    pub approx_failure_budget: f64,
    pub runs: Vec<RunAudit>,
    pub fraction_margin_met: f64,
    pub fraction_zero_train_error: f64,
    pub fraction_over_budget: f64,
    pub max_telescoping_residual: f64,
    pub max_zk_deviation: f64,
    pub identities_pass: bool,
}

/// Stream used for audit run `index` under `base_stream`.
pub fn audit_stream(base_stream: u64, index: u64) -> u64 {
    derive_stream_id(&[base_stream, index])
}

/// Runs sampled boosting `n_seeds` times on independent streams and audits
/// each run: training margins, the approximation property of every
/// subsample against the stump grid of the dataset, and both proof
/// identities.
pub fn margin_audit<L: WeakLearner + ?Sized>(
    data: &Dataset,
    learner: &L,
    config: &BoostConfig,
    n_seeds: usize,
) -> Result<MarginAuditReport> {
    if n_seeds == 0 {
        return Err(Error::invalid("margin audit needs at least one seed"));
    }
    let sched = config.schedule(data.len(), learner.spec().vc_dim)?;
    let class = HypothesisClass::stump_grid(data);
    let runs = (0..n_seeds as u64)
        .into_par_iter()
        .map(|i| {
            let cfg = BoostConfig { stream: audit_stream(config.stream, i), capture_distributions: false, ..config.clone() };
            audit_run(data, learner, &cfg, &class)
        })
        .collect::<Result<Vec<_>>>()?;

    let threshold = config.gamma / 128.0;
    let budget = config.gamma * config.gamma * sched.k as f64 / 16.0;
    let frac = |pred: &dyn Fn(&RunAudit) -> bool| runs.iter().filter(|r| pred(r)).count() as f64 / runs.len() as f64;
    let max_telescoping_residual = runs.iter().map(|r| r.telescoping_residual).fold(0.0, f64::max);
    let max_zk_deviation = runs.iter().map(|r| r.zk_deviation).fold(0.0, f64::max);
    Ok(MarginAuditReport {
        schema: SCHEMA_VERSION,
        n: data.len(),
        m: sched.m,
        k: sched.k,
        gamma: config.gamma,
        delta: config.delta,
        seed: config.seed,
        margin_threshold: threshold,
        approx_failure_budget: budget,
        fraction_margin_met: frac(&|r| r.min_margin >= threshold),
        fraction_zero_train_error: frac(&|r| r.train_error == 0.0),
        fraction_over_budget: frac(&|r| r.approx_failures as f64 > budget),
        identities_pass: max_telescoping_residual <= TELESCOPING_TOLERANCE && max_zk_deviation <= ZK_TOLERANCE,
        max_telescoping_residual,
        max_zk_deviation,
        runs,
    })
}

fn audit_run<L: WeakLearner + ?Sized>(
    data: &Dataset,
    learner: &L,
    config: &BoostConfig,
    class: &HypothesisClass,
) -> Result<RunAudit> {
    let n = data.len();
    let labels: Vec<i8> = data.examples().iter().map(|e| e.y()).collect();
    let mut votes = vec![0i64; n];
    let mut counts = vec![0usize; n];
    let mut log_z_sum = 0.0;
    let mut zk_deviation: f64 = 0.0;
    let mut approx_failures = 0;
    let mut violations = 0;
    let alpha = alpha_of(config.gamma)?;
    let eps = config.gamma / 2.0;
    let header = sampled_boost_streaming(data, learner, config, |r| {
        for (v, &p) in votes.iter_mut().zip(r.predictions) {
            *v += i64::from(p);
        }
        log_z_sum += r.z.ln();
        zk_deviation = zk_deviation.max((r.z - zk_closed_form(r.weak_error, alpha)).abs());
        counts.iter_mut().for_each(|c| *c = 0);
        for &i in r.subsample {
            counts[i] += 1;
        }
        let dev = deviation_from_counts(&labels, r.distribution.weights(), &counts, r.subsample.len(), data, class);
        if dev > eps + APPROX_TOLERANCE {
            approx_failures += 1;
        }
        violations += usize::from(r.violation);
        Ok(())
    })?;
    let k = header.k as f64;
    let min_margin = votes.iter().zip(&labels).map(|(&v, &y)| f64::from(y) * v as f64 / k).fold(f64::INFINITY, f64::min);
    let wrong = votes.iter().zip(&labels).filter(|(&v, &y)| (if v >= 0 { 1 } else { -1 }) != y).count();
    Ok(RunAudit {
        stream: config.stream,
        min_margin,
        train_error: wrong as f64 / n as f64,
        approx_failures,
        violations,
        telescoping_residual: telescoping_residual(&votes, &labels, header.alpha, log_z_sum),
        zk_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weak::{Hypothesis, PlantedLearner};

    fn line(n: usize) -> Dataset {
        Dataset::from_pairs((0..n).map(|i| (vec![i as f64], if i % 3 == 0 { -1 } else { 1 }))).unwrap()
    }

    #[test]
    fn perfect_learner_gives_unit_margin() {
        let data = line(12);
        let learner = PlantedLearner::new(Hypothesis::table_from(&data), 0.5, 2).unwrap();
        let cfg = BoostConfig::new(0.5, 0.1, 1).with_overrides(Some(30), None);
        let report = margin_audit(&data, &learner, &cfg, 5).unwrap();
        assert!(report.runs.iter().all(|r| r.min_margin == 1.0));
        assert_eq!(report.fraction_margin_met, 1.0);
        assert!(report.identities_pass);
    }

    #[test]
    fn single_bad_round_is_reported() {
        let data = line(12);
        // a constant +1 target errs on every negative point
        let learner = PlantedLearner::new(Hypothesis::stump(0, f64::NEG_INFINITY, 1), 0.5, 2).unwrap();
        let cfg = BoostConfig::new(0.5, 0.1, 1).with_overrides(Some(1), None);
        let report = margin_audit(&data, &learner, &cfg, 3).unwrap();
        assert!(report.runs.iter().all(|r| r.min_margin < 0.0));
        assert_eq!(report.fraction_margin_met, 0.0);
        assert!(report.runs.iter().all(|r| r.violations == 1));
    }

    #[test]
    fn planted_quarter_advantage_meets_margin() {
        let data = line(20);
        let learner = PlantedLearner::new(Hypothesis::table_from(&data), 0.25, 2).unwrap();
        let cfg = BoostConfig::new(0.25, 0.1, 7);
        let report = margin_audit(&data, &learner, &cfg, 4).unwrap();
        assert_eq!(report.fraction_margin_met, 1.0);
        assert!(report.identities_pass, "{report:?}");
        assert!(report.runs.iter().all(|r| r.violations == 0));
    }
}
