//! Weak learners.
//!
//! A weak learner receives a sample (a sequence of labelled examples, with
//! repetitions) and must return a hypothesis whose error on that sample,
//! weighted uniformly over the sequence, is at most `1/2 - gamma`. Samples
//! are passed as a [`SampleView`]: a pool of distinct examples plus a
//! sequence of positions into it, so boosting can hand over dataset indices
//! and reconstruction can hand over a deduplicated compression sequence
//! without copying.

mod hypothesis;
mod planted;
mod stump;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use hypothesis::{Hypothesis, Interval, Stump, TableEntry};
pub use planted::{train_planted, PlantedLearner};
pub use stump::{stump_vc_dim, train_stump, train_stump_weighted, StumpLearner};

use crate::dataset::{Dataset, LabeledExample};
use crate::dist::WeightDistribution;
use crate::rng::RngStream;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakLearnerSpec {
    /// Guaranteed advantage: sample error at most `1/2 - gamma`.
    pub gamma: f64,
    /// VC dimension of the output class, consumed only by the subsample size.
    pub vc_dim: usize,
    /// Output is a pure function of the sample sequence.
    pub deterministic: bool,
}

impl WeakLearnerSpec {
    pub fn new(gamma: f64, vc_dim: usize, deterministic: bool) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 0.5) {
            return Err(Error::invalid(format!("weak learner gamma {gamma} outside (0, 1/2]")));
        }
        if vc_dim == 0 {
            return Err(Error::invalid("vc dimension must be at least 1"));
        }
        Ok(WeakLearnerSpec { gamma, vc_dim, deterministic })
    }

    /// `1/2 - gamma`.
    pub fn required_error(&self) -> f64 {
        0.5 - self.gamma
    }

    pub fn meets_advantage(&self, sample_error: f64) -> bool {
        sample_error <= self.required_error() + ADVANTAGE_SLACK
    }
}

/// A sample as positions into a pool of examples.
#[derive(Debug, Clone, Copy)]
pub struct SampleView<'a> {
    pool: &'a [LabeledExample],
    positions: &'a [usize],
}

impl<'a> SampleView<'a> {
    /// Positions must be in range for the pool.
    pub fn new(pool: &'a [LabeledExample], positions: &'a [usize]) -> Result<Self> {
        if let Some(&p) = positions.iter().find(|&&p| p >= pool.len()) {
            return Err(Error::invalid(format!("sample position {p} out of range for pool of {}", pool.len())));
        }
        Ok(SampleView { pool, positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn pool(&self) -> &'a [LabeledExample] {
        self.pool
    }

    pub fn positions(&self) -> &'a [usize] {
        self.positions
    }

    pub fn iter(&self) -> impl Iterator<Item = &'a LabeledExample> + '_ {
        self.positions.iter().map(move |&p| &self.pool[p])
    }

    /// Number of positions `h` misclassifies.
    pub fn mistakes(&self, h: &Hypothesis) -> usize {
        self.iter().filter(|e| h.predict(e.x()) != e.y()).count()
    }
}

/// Deduplicates a raw sample into a pool and positions.
pub fn pool_sample(sample: &[LabeledExample]) -> (Vec<LabeledExample>, Vec<usize>) {
    let mut ids = HashMap::with_capacity(sample.len());
    let mut pool = Vec::new();
    let positions = sample
        .iter()
        .map(|e| {
            *ids.entry(e.key()).or_insert_with(|| {
                pool.push(e.clone());
                pool.len() - 1
            })
        })
        .collect();
    (pool, positions)
}

pub trait WeakLearner: Send + Sync {
    fn name(&self) -> &'static str;

    fn spec(&self) -> &WeakLearnerSpec;

    /// Trains on `sample` under the uniform distribution over its positions.
    /// The sample is non-empty.
    fn fit(&self, sample: SampleView<'_>, rng: &mut RngStream) -> Hypothesis;
}

#[derive(Debug, Clone)]
pub struct Trained {
    pub hypothesis: Hypothesis,
    pub sample_error: f64,
}

/// The learner missed its advantage on the sample. Carries the hypothesis
/// it returned so the caller may continue with it.
#[derive(Debug, Clone)]
pub struct WeakLearningViolation {
    pub hypothesis: Hypothesis,
    pub achieved: f64,
    pub required: f64,
}

/// Slack for comparing a sample error against `1/2 - gamma`.
const ADVANTAGE_SLACK: f64 = 1e-12;

pub fn weak_train_view<L: WeakLearner + ?Sized>(
    learner: &L,
    sample: SampleView<'_>,
    rng: &mut RngStream,
) -> Result<std::result::Result<Trained, WeakLearningViolation>> {
    if sample.is_empty() {
        return Err(Error::invalid("weak learner called on an empty sample"));
    }
    let hypothesis = learner.fit(sample, rng);
    let sample_error = sample.mistakes(&hypothesis) as f64 / sample.len() as f64;
    if !learner.spec().meets_advantage(sample_error) {
        let required = learner.spec().required_error();
        Ok(Err(WeakLearningViolation { hypothesis, achieved: sample_error, required }))
    } else {
        Ok(Ok(Trained { hypothesis, sample_error }))
    }
}

/// Trains on a raw sample sequence and checks the advantage guarantee.
pub fn weak_train<L: WeakLearner + ?Sized>(
    learner: &L,
    sample: &[LabeledExample],
    rng: &mut RngStream,
) -> Result<Trained> {
    let (pool, positions) = pool_sample(sample);
    let view = SampleView::new(&pool, &positions)?;
    match weak_train_view(learner, view, rng)? {
        Ok(t) => Ok(t),
        Err(v) => Err(Error::WeakLearningViolation { round: 0, achieved: v.achieved, required: v.required }),
    }
}

/// `sum of dist[i]` over the examples `h` misclassifies.
pub fn weighted_error(h: &Hypothesis, data: &Dataset, dist: &WeightDistribution) -> Result<f64> {
    if dist.len() != data.len() {
        return Err(Error::invalid(format!(
            "distribution over {} points does not index a dataset of {}",
            dist.len(),
            data.len()
        )));
    }
    let err = data
        .examples()
        .iter()
        .zip(dist.weights())
        .filter(|(e, _)| h.predict(e.x()) != e.y())
        .map(|(_, w)| w)
        .sum::<f64>();
    Ok(err.clamp(0.0, 1.0))
}
