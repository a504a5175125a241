use std::sync::Arc;

use super::{Hypothesis, SampleView, WeakLearner, WeakLearnerSpec};
use crate::ceil_tol;
use crate::rng::RngStream;
use crate::Result;

/// Test learner with an exactly known advantage.
///
/// Returns `target` with its prediction flipped on a set of sample points
/// chosen in order of first appearance, so that the flipped positions total
/// at most `|sample| - ceil((1/2 + gamma) |sample|)`. Distinct points are
/// flipped greedily while their multiplicity fits the remaining budget.
/// Off the sample it agrees with `target`.
#[derive(Debug, Clone)]
pub struct PlantedLearner {
    target: Arc<Hypothesis>,
    spec: WeakLearnerSpec,
}

impl PlantedLearner {
    pub fn new(target: Hypothesis, gamma: f64, vc_dim: usize) -> Result<Self> {
        Ok(PlantedLearner {
            target: Arc::new(target),
            spec: WeakLearnerSpec::new(gamma, vc_dim, true)?,
        })
    }

    pub fn target(&self) -> &Hypothesis {
        &self.target
    }
}

impl WeakLearner for PlantedLearner {
    fn name(&self) -> &'static str {
        "planted"
    }

    fn spec(&self) -> &WeakLearnerSpec {
        &self.spec
    }

    fn fit(&self, sample: SampleView<'_>, _rng: &mut RngStream) -> Hypothesis {
        train_planted(sample, &self.target, self.spec.gamma)
    }
}

pub fn train_planted(sample: SampleView<'_>, target: &Arc<Hypothesis>, gamma: f64) -> Hypothesis {
    let m = sample.len();
    let agree = ceil_tol((0.5 + gamma) * m as f64).min(m as f64) as usize;
    let mut budget = m - agree;
    if budget == 0 {
        return Hypothesis::planted(Arc::clone(target), Vec::new());
    }

    let pool = sample.pool();
    let mut count = vec![0usize; pool.len()];
    let mut order = Vec::new();
    for &p in sample.positions() {
        if count[p] == 0 {
            order.push(p);
        }
        count[p] += 1;
    }
    let mut flipped = Vec::new();
    for p in order {
        if count[p] <= budget {
            budget -= count[p];
            flipped.push(pool[p].x().to_vec());
            if budget == 0 {
                break;
            }
        }
    }
    Hypothesis::planted(Arc::clone(target), flipped)
}
