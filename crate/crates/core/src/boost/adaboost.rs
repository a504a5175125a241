use serde::{Deserialize, Serialize};

use super::{WeightedTerm, WeightedVotingClassifier};
use crate::dataset::Dataset;
use crate::dist::{normalize, WeightDistribution};
use crate::hexfloat;
use crate::weak::{train_stump_weighted, Hypothesis, StumpLearner};
use crate::{Error, Result};

/// A learner that minimizes weighted error over a whole dataset.
pub trait WeightedLearner {
    /// Returns the hypothesis and its weighted error.
    fn fit_weighted(&self, data: &Dataset, weights: &WeightDistribution) -> Result<(Hypothesis, f64)>;
}

impl WeightedLearner for StumpLearner {
    fn fit_weighted(&self, data: &Dataset, weights: &WeightDistribution) -> Result<(Hypothesis, f64)> {
        let (s, err) = train_stump_weighted(data, weights.weights())?;
        Ok((Hypothesis::Stump(s), err))
    }
}

/// `alpha_t = 1/2 ln((1 - eps) / eps)`.
pub fn adaboost_alpha(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("weighted error {eps} outside (0, 1)")));
    }
    Ok(0.5 * ((1.0 - eps) / eps).ln())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostRound {
    pub hypothesis: Hypothesis,
    #[serde(with = "hexfloat::scalar")]
    pub weighted_error: f64,
    #[serde(with = "hexfloat::scalar")]
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostTrace {
    pub rounds: Vec<AdaBoostRound>,
    /// A round reached zero weighted error and the run stopped with that
    /// hypothesis as the whole ensemble.
    pub stopped_early: bool,
}

/// Classic AdaBoost for `rounds` rounds with the adaptive step.
///
/// A hypothesis with zero weighted error classifies every point correctly;
/// the run stops and returns it alone with coefficient 1. A weighted error
/// of at least 1/2 aborts with a weak-learning violation.
pub fn adaboost<L: WeightedLearner + ?Sized>(
    data: &Dataset,
    learner: &L,
    rounds: usize,
) -> Result<(WeightedVotingClassifier, AdaBoostTrace)> {
    if rounds == 0 {
        return Err(Error::invalid("AdaBoost needs at least one round"));
    }
    let mut dist = WeightDistribution::uniform(data.len())?;
    let mut trace = AdaBoostTrace { rounds: Vec::with_capacity(rounds), stopped_early: false };
    let mut terms = Vec::with_capacity(rounds);
    for t in 1..=rounds {
        let (h, eps) = learner.fit_weighted(data, &dist)?;
        if eps <= 0.0 {
            trace.rounds.push(AdaBoostRound { hypothesis: h.clone(), weighted_error: 0.0, alpha: f64::INFINITY });
            trace.stopped_early = true;
            let vc = WeightedVotingClassifier::new(vec![WeightedTerm { alpha: 1.0, hypothesis: h }])?;
            return Ok((vc, trace));
        }
        if eps >= 0.5 {
            return Err(Error::WeakLearningViolation { round: t, achieved: eps, required: 0.5 });
        }
        let alpha = adaboost_alpha(eps)?;
        let raw = data
            .examples()
            .iter()
            .zip(dist.weights())
            .map(|(e, w)| w * (-alpha * f64::from(e.y() * h.predict(e.x()))).exp())
            .collect();
        dist = normalize(raw)?.0;
        trace.rounds.push(AdaBoostRound { hypothesis: h.clone(), weighted_error: eps, alpha });
        terms.push(WeightedTerm { alpha, hypothesis: h });
    }
    Ok((WeightedVotingClassifier::new(terms)?, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boost::Ensemble;

    #[test]
    fn alpha_closed_form() {
        assert!((adaboost_alpha(0.25).unwrap() - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!((adaboost_alpha(0.25).unwrap() - 0.549_306_144_334_054_8).abs() < 1e-15);
        assert!(adaboost_alpha(0.0).is_err());
    }

    #[test]
    fn separable_data_single_round() {
        let data = Dataset::from_pairs([(vec![0.0], -1), (vec![1.0], -1), (vec![2.0], 1)]).unwrap();
        let learner = StumpLearner::new(0.25, 1).unwrap();
        let (vc, trace) = adaboost(&data, &learner, 1).unwrap();
        assert!(trace.stopped_early);
        assert_eq!(vc.len(), 1);
        assert_eq!(vc.training_error(&data), 0.0);
    }

    #[test]
    fn more_rounds_fit_alternating_points() {
        let data = Dataset::from_pairs([(vec![-2.0], -1), (vec![-1.0], 1), (vec![1.0], -1), (vec![2.0], 1)]).unwrap();
        let learner = StumpLearner::new(0.1, 1).unwrap();
        let (one, _) = adaboost(&data, &learner, 1).unwrap();
        let (ten, _) = adaboost(&data, &learner, 10).unwrap();
        assert_eq!(one.training_error(&data), 0.25);
        assert!(ten.training_error(&data) < one.training_error(&data));
    }

    #[test]
    fn coin_flip_error_aborts() {
        let data = Dataset::from_pairs([(vec![0.0], 1), (vec![1.0], -1), (vec![2.0], -1), (vec![3.0], 1)]).unwrap();
        struct Half;
        impl WeightedLearner for Half {
            fn fit_weighted(&self, _: &Dataset, _: &WeightDistribution) -> Result<(Hypothesis, f64)> {
                Ok((Hypothesis::stump(0, f64::NEG_INFINITY, 1), 0.5))
            }
        }
        assert!(matches!(adaboost(&data, &Half, 3), Err(Error::WeakLearningViolation { round: 1, .. })));
    }
}
