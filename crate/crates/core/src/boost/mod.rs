//! Sampled boosting and the AdaBoost baseline.
//!
//! Each round of sampled boosting draws `m` examples i.i.d. from the current
//! distribution `D_k`, trains the weak learner on that subsample under the
//! uniform distribution, and applies the exponential update with a fixed
//! step `alpha = atanh(gamma)` derived from the guaranteed advantage rather
//! than from the measured error. After `K` rounds the output is the uniform
//! vote `f = (1/K) sum_k h_k`.

mod adaboost;
mod ensemble;
mod trace;

use serde::{Deserialize, Serialize};

pub use adaboost::{adaboost, adaboost_alpha, AdaBoostRound, AdaBoostTrace, WeightedLearner};
pub use ensemble::{margin, Ensemble, VotingClassifier, WeightedTerm, WeightedVotingClassifier};
pub use trace::{BoostTrace, RoundRecord, TraceHeader};

use crate::dataset::Dataset;
use crate::dist::{draw_iid, normalize, WeightDistribution};
use crate::hexfloat;
use crate::rng::{RngStream, GENERATOR};
use crate::weak::{Hypothesis, SampleView, WeakLearner};
use crate::{ceil_tol, Error, Result, SCHEMA_VERSION};

/// `alpha = 1/2 ln((1/2 + gamma/2) / (1/2 - gamma/2))`, i.e. `atanh(gamma)`.
pub fn alpha_of(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid(format!("gamma {gamma} outside (0, 1)")));
    }
    Ok(gamma.atanh())
}

/// `m = ceil(a gamma^-2 (d + ln(1/gamma)))`, at least 1.
pub fn subsample_size(gamma: f64, d: usize, a_const: f64) -> Result<usize> {
    if !(gamma > 0.0 && gamma.is_finite()) || d == 0 || !(a_const > 0.0 && a_const.is_finite()) {
        return Err(Error::invalid("subsample size needs positive gamma, d and a"));
    }
    let m = ceil_tol(a_const / (gamma * gamma) * (d as f64 + (1.0 / gamma).ln()));
    to_count(m.max(1.0), "subsample size")
}

/// `K = ceil(32 (gamma^-2 ln(N/delta) + 1))`.
pub fn ensemble_size(gamma: f64, upper_bound_n: u64, delta: f64) -> Result<usize> {
    if !(gamma > 0.0 && gamma.is_finite()) || upper_bound_n == 0 || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("ensemble size needs positive gamma, N >= 1 and delta in (0, 1)"));
    }
    let k = ceil_tol(32.0 * ((upper_bound_n as f64 / delta).ln() / (gamma * gamma) + 1.0));
    to_count(k, "ensemble size")
}

fn to_count(v: f64, what: &str) -> Result<usize> {
    if v.is_finite() && v <= (usize::MAX >> 1) as f64 {
        Ok(v as usize)
    } else {
        Err(Error::NumericDomain(format!("{what} {v} does not fit in memory")))
    }
}

/// What to do when the weak learner misses its advantage on a subsample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationPolicy {
    /// Keep the returned hypothesis and flag the round.
    #[default]
    Warn,
    /// Stop the run with a weak-learning-violation error.
    Abort,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostConfig {
    #[serde(with = "hexfloat::scalar")]
    pub gamma: f64,
    #[serde(with = "hexfloat::scalar")]
    pub delta: f64,
    /// `N`; defaults to the dataset size.
    #[serde(default)]
    pub upper_bound_n: Option<u64>,
    /// The constant `a` in the subsample size.
    #[serde(with = "hexfloat::scalar", default = "default_a")]
    pub a_const: f64,
    #[serde(default)]
    pub k_override: Option<usize>,
    #[serde(default)]
    pub m_override: Option<usize>,
    /// Upper limit applied to the formula `K` (not to an override).
    #[serde(default)]
    pub k_cap: Option<usize>,
    #[serde(default)]
    pub violation_policy: ViolationPolicy,
    pub seed: u64,
    #[serde(default)]
    pub stream: u64,
    /// Keep every `D_k` in the returned trace.
    #[serde(default)]
    pub capture_distributions: bool,
}

fn default_a() -> f64 {
    DEFAULT_A_CONST
}

pub const DEFAULT_A_CONST: f64 = 4.0;

/// Resolved per-run sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub upper_bound_n: u64,
    pub m: usize,
    pub k: usize,
    pub alpha: f64,
}

impl BoostConfig {
    pub fn new(gamma: f64, delta: f64, seed: u64) -> Self {
        BoostConfig {
            gamma,
            delta,
            upper_bound_n: None,
            a_const: DEFAULT_A_CONST,
            k_override: None,
            m_override: None,
            k_cap: None,
            violation_policy: ViolationPolicy::Warn,
            seed,
            stream: 0,
            capture_distributions: false,
        }
    }

    pub fn with_overrides(mut self, k: Option<usize>, m: Option<usize>) -> Self {
        self.k_override = k;
        self.m_override = m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 0.5) {
            return Err(Error::invalid(format!("gamma {} outside (0, 1/2]", self.gamma)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(format!("delta {} outside (0, 1)", self.delta)));
        }
        if !(self.a_const > 0.0 && self.a_const.is_finite()) {
            return Err(Error::invalid(format!("a_const {} is not positive", self.a_const)));
        }
        if self.upper_bound_n == Some(0) || self.k_override == Some(0) || self.m_override == Some(0) || self.k_cap == Some(0)
        {
            return Err(Error::invalid("N, K, m and the K cap must be at least 1"));
        }
        Ok(())
    }

    /// Sizes for a dataset of `n` points and a learner of VC dimension `d`.
    pub fn schedule(&self, n: usize, d: usize) -> Result<Schedule> {
        self.validate()?;
        let upper_bound_n = self.upper_bound_n.unwrap_or(n as u64);
        if upper_bound_n < n as u64 {
            return Err(Error::invalid(format!("upper bound N = {upper_bound_n} is below n = {n}")));
        }
        let m = match self.m_override {
            Some(m) => m,
            None => subsample_size(self.gamma, d, self.a_const)?,
        };
        let k = match self.k_override {
            Some(k) => k,
            None => {
                let k = ensemble_size(self.gamma, upper_bound_n, self.delta)?;
                self.k_cap.map_or(k, |cap| k.min(cap))
            }
        };
        Ok(Schedule { upper_bound_n, m, k, alpha: alpha_of(self.gamma)? })
    }
}

/// `D'(i) = D(i) exp(-alpha y_i h(x_i)) / Z`. Returns `D'` and `Z`.
pub fn reweight(dist: &WeightDistribution, data: &Dataset, h: &Hypothesis, alpha: f64) -> Result<(WeightDistribution, f64)> {
    let predictions: Vec<i8> = data.examples().iter().map(|e| h.predict(e.x())).collect();
    let labels: Vec<i8> = data.examples().iter().map(|e| e.y()).collect();
    reweight_predictions(dist, &labels, &predictions, alpha)
}

pub(crate) fn reweight_predictions(
    dist: &WeightDistribution,
    labels: &[i8],
    predictions: &[i8],
    alpha: f64,
) -> Result<(WeightDistribution, f64)> {
    if dist.len() != labels.len() || labels.len() != predictions.len() {
        return Err(Error::invalid("distribution, labels and predictions differ in length"));
    }
    let down = (-alpha).exp();
    let up = alpha.exp();
    let raw = dist
        .weights()
        .iter()
        .zip(labels.iter().zip(predictions))
        .map(|(w, (y, p))| w * if y == p { down } else { up })
        .collect();
    normalize(raw)
}

/// Everything known about round `k` at the end of that round.
#[derive(Debug, Clone, Copy)]
pub struct RoundView<'a> {
    pub k: usize,
    /// `D_k`, the distribution `S_k` was drawn from.
    pub distribution: &'a WeightDistribution,
    pub subsample: &'a [usize],
    pub hypothesis: &'a Hypothesis,
    /// `h_k(x_i)` for every dataset point.
    pub predictions: &'a [i8],
    pub z: f64,
    pub weak_error: f64,
    pub sample_error: f64,
    pub violation: bool,
}

/// Runs sampled boosting and records the full trace.
pub fn sampled_boost<L: WeakLearner + ?Sized>(
    data: &Dataset,
    learner: &L,
    config: &BoostConfig,
) -> Result<(VotingClassifier, BoostTrace)> {
    let mut rounds = Vec::new();
    let header = sampled_boost_streaming(data, learner, config, |r| {
        rounds.push(RoundRecord {
            k: r.k,
            subsample: r.subsample.to_vec(),
            distribution: config.capture_distributions.then(|| r.distribution.clone()),
            hypothesis: r.hypothesis.clone(),
            z: r.z,
            weak_error: r.weak_error,
            sample_error: r.sample_error,
            violation: r.violation,
        });
        Ok(())
    })?;
    let trace = BoostTrace { header, rounds };
    Ok((trace.classifier()?, trace))
}

/// Runs sampled boosting, handing each round to `observe` and keeping
/// nothing. Used by audits that would not fit full traces in memory.
pub fn sampled_boost_streaming<L, F>(
    data: &Dataset,
    learner: &L,
    config: &BoostConfig,
    mut observe: F,
) -> Result<TraceHeader>
where
    L: WeakLearner + ?Sized,
    F: FnMut(RoundView<'_>) -> Result<()>,
{
    let spec = learner.spec();
    let sched = config.schedule(data.len(), spec.vc_dim)?;
    if let Some(e) = data.examples().first() {
        if e.x().is_empty() {
            return Err(Error::invalid("dataset has no features"));
        }
    }
    let header = TraceHeader {
        schema: SCHEMA_VERSION,
        n: data.len(),
        dim: data.dim(),
        gamma: config.gamma,
        delta: config.delta,
        upper_bound_n: sched.upper_bound_n,
        a_const: config.a_const,
        m: sched.m,
        k: sched.k,
        alpha: sched.alpha,
        seed: config.seed,
        stream: config.stream,
        generator: GENERATOR.to_string(),
        learner: learner.name().to_string(),
        vc_dim: spec.vc_dim,
        dataset_digest: data.digest(),
    };

    let labels: Vec<i8> = data.examples().iter().map(|e| e.y()).collect();
    let mut rng = RngStream::new(config.seed, config.stream);
    let mut dist = WeightDistribution::uniform(data.len())?;
    let mut predictions = vec![0i8; data.len()];

    for k in 1..=sched.k {
        let subsample = draw_iid(&dist, sched.m, &mut rng)?;
        let view = SampleView::new(data.examples(), &subsample)?;
        let h = learner.fit(view, &mut rng);
        if h.min_dim() > data.dim() {
            return Err(Error::Contract(format!("round {k} hypothesis reads beyond dimension {}", data.dim())));
        }
        for (p, e) in predictions.iter_mut().zip(data.examples()) {
            *p = h.predict(e.x());
        }
        let mistakes = subsample.iter().filter(|&&i| predictions[i] != labels[i]).count();
        let sample_error = mistakes as f64 / sched.m as f64;
        let violation = !spec.meets_advantage(sample_error);
        if violation && config.violation_policy == ViolationPolicy::Abort {
            return Err(Error::WeakLearningViolation { round: k, achieved: sample_error, required: spec.required_error() });
        }
        let weak_error: f64 = dist
            .weights()
            .iter()
            .zip(labels.iter().zip(&predictions))
            .filter(|(_, (y, p))| y != p)
            .map(|(w, _)| w)
            .sum::<f64>()
            .clamp(0.0, 1.0);
        let (next, z) = reweight_predictions(&dist, &labels, &predictions, sched.alpha)
            .map_err(|e| Error::NumericDomain(format!("round {k}: {e}")))?;
        observe(RoundView {
            k,
            distribution: &dist,
            subsample: &subsample,
            hypothesis: &h,
            predictions: &predictions,
            z,
            weak_error,
            sample_error,
            violation,
        })?;
        dist = next;
    }
    Ok(header)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weak::{PlantedLearner, StumpLearner};

    #[test]
    fn alpha_values() {
        // independent evaluation of 1/2 ln(odds)
        let oracle = |g: f64| 0.5 * ((0.5 + g / 2.0) / (0.5 - g / 2.0)).ln();
        assert!((alpha_of(0.1).unwrap() - 0.100_335_347_731_075_58).abs() < 1e-15);
        assert!((alpha_of(0.2).unwrap() - 0.202_732_554_054_082_2).abs() < 1e-15);
        for g in [1e-6, 0.05, 0.25, 0.49, 0.9] {
            assert!((alpha_of(g).unwrap() - oracle(g)).abs() < 1e-14);
        }
        assert!(alpha_of(0.0).is_err());
        assert!(alpha_of(1.0).is_err());
        assert!((alpha_of(0.6).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn alpha_at_most_two_gamma() {
        for i in 1..=4900 {
            let g = i as f64 * 1e-4;
            assert!(alpha_of(g).unwrap() <= 2.0 * g, "gamma {g}");
        }
    }

    #[test]
    fn subsample_size_examples() {
        assert_eq!(subsample_size(0.5, 2, 4.0).unwrap(), 44);
        assert_eq!(subsample_size((-0.5f64).exp(), 1, 1.0).unwrap(), 5);
        for d in 1..20 {
            assert!(subsample_size(0.1, d + 1, 4.0).unwrap() > subsample_size(0.1, d, 4.0).unwrap());
        }
        assert!(subsample_size(0.0, 1, 1.0).is_err());
    }

    #[test]
    fn ensemble_size_examples() {
        assert_eq!(ensemble_size(0.5, 100, 0.5).unwrap(), 711);
        assert_eq!(ensemble_size(1.0, 1, (-1f64).exp()).unwrap(), 64);
        let mut last = usize::MAX;
        for i in 1..100 {
            let k = ensemble_size(0.2, 50, i as f64 / 100.0).unwrap();
            assert!(k <= last);
            last = k;
        }
        assert!(ensemble_size(0.2, 50, 1.0).is_err());
    }

    #[test]
    fn reweight_example() {
        let data = Dataset::from_pairs([(vec![0.0], 1), (vec![1.0], 1)]).unwrap();
        // correct on index 0, wrong on index 1
        let h = Hypothesis::stump(0, 0.5, -1);
        let (d2, z) = reweight(&WeightDistribution::uniform(2).unwrap(), &data, &h, alpha_of(0.6).unwrap()).unwrap();
        assert!((z - 1.25).abs() < 1e-15);
        assert!((d2.weights()[0] - 0.2).abs() < 1e-15);
        assert!((d2.weights()[1] - 0.8).abs() < 1e-15);
    }

    fn line(n: usize) -> Dataset {
        Dataset::from_pairs((0..n).map(|i| (vec![i as f64], if i < n / 2 { -1 } else { 1 }))).unwrap()
    }

    #[test]
    fn one_round_on_separable_data() {
        let data = line(6);
        let learner = StumpLearner::new(0.25, 1).unwrap();
        let cfg = BoostConfig::new(0.25, 0.1, 1).with_overrides(Some(1), Some(6));
        let (vc, trace) = sampled_boost(&data, &learner, &cfg).unwrap();
        assert_eq!(vc.len(), 1);
        assert_eq!(trace.rounds.len(), 1);
        assert_eq!(trace.rounds[0].subsample.len(), 6);
        // the draw may miss points; the result is still f = h_1
        for e in data.examples() {
            assert_eq!(vc.predict(e.x()), trace.rounds[0].hypothesis.predict(e.x()));
        }
    }

    #[test]
    fn runs_are_reproducible_and_fixed_alpha() {
        let data = line(20);
        let learner = StumpLearner::new(0.2, 1).unwrap();
        let cfg = BoostConfig { capture_distributions: true, ..BoostConfig::new(0.2, 0.1, 99) }
            .with_overrides(Some(40), Some(10));
        let (a, ta) = sampled_boost(&data, &learner, &cfg).unwrap();
        let (b, tb) = sampled_boost(&data, &learner, &cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(ta, tb);
        assert_eq!(ta.alpha(), alpha_of(0.2).unwrap());
        for r in &ta.rounds {
            let d = r.distribution.as_ref().unwrap();
            assert!((d.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let other = BoostConfig { seed: 100, ..cfg };
        assert_ne!(sampled_boost(&data, &learner, &other).unwrap().1, ta);
    }

    #[test]
    fn trace_round_trips_through_ndjson() {
        let data = line(10);
        let learner = StumpLearner::new(0.2, 1).unwrap();
        let cfg = BoostConfig::new(0.2, 0.1, 5).with_overrides(Some(7), Some(4));
        let (_, trace) = sampled_boost(&data, &learner, &cfg).unwrap();
        let text = trace.to_ndjson();
        assert_eq!(text.lines().count(), 8);
        assert_eq!(BoostTrace::from_ndjson(&text).unwrap(), trace);
        let truncated: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(BoostTrace::from_ndjson(&truncated).is_err());
    }

    #[test]
    fn abort_policy_stops_on_violation() {
        // alternating labels defeat every stump at gamma 0.45
        let data = Dataset::from_pairs((0..8).map(|i| (vec![i as f64], if i % 2 == 0 { 1 } else { -1 }))).unwrap();
        let learner = StumpLearner::new(0.45, 1).unwrap();
        let cfg = BoostConfig { violation_policy: ViolationPolicy::Abort, ..BoostConfig::new(0.45, 0.1, 3) }
            .with_overrides(Some(5), Some(8));
        assert!(matches!(sampled_boost(&data, &learner, &cfg), Err(Error::WeakLearningViolation { .. })));
        let warn = BoostConfig { violation_policy: ViolationPolicy::Warn, ..cfg };
        let (_, trace) = sampled_boost(&data, &learner, &warn).unwrap();
        assert!(trace.violations() > 0);
    }

    #[test]
    fn planted_learner_reaches_margin() {
        let data = line(10);
        let target = Hypothesis::stump(0, 4.5, 1);
        let learner = PlantedLearner::new(target, 0.5, 2).unwrap();
        let cfg = BoostConfig::new(0.5, 0.1, 11).with_overrides(Some(9), None);
        let (vc, _) = sampled_boost(&data, &learner, &cfg).unwrap();
        assert_eq!(vc.min_margin(&data), 1.0);
    }

    #[test]
    fn config_rules() {
        assert!(BoostConfig::new(0.0, 0.1, 0).validate().is_err());
        assert!(BoostConfig::new(0.2, 1.0, 0).validate().is_err());
        let small_n = BoostConfig { upper_bound_n: Some(3), ..BoostConfig::new(0.2, 0.1, 0) };
        assert!(small_n.schedule(4, 1).is_err());
        let capped = BoostConfig { k_cap: Some(10), ..BoostConfig::new(0.1, 0.1, 0) };
        assert_eq!(capped.schedule(50, 2).unwrap().k, 10);
        let s = BoostConfig::new(0.25, 0.1, 0).schedule(50, 2).unwrap();
        assert_eq!((s.k, s.m, s.upper_bound_n), (ensemble_size(0.25, 50, 0.1).unwrap(), 217, 50));
        let json = serde_json::to_string(&capped).unwrap();
        assert_eq!(serde_json::from_str::<BoostConfig>(&json).unwrap(), capped);
    }
}
