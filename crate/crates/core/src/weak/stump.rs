use std::ops::{Add, Sub};

use super::{Hypothesis, SampleView, Stump, WeakLearner, WeakLearnerSpec};
use crate::dataset::Dataset;
use crate::rng::RngStream;
use crate::{Error, Result};

/// Declared VC dimension of stumps over `dim` features with both
/// orientations: 2 in one dimension, `ceil(log2(2 dim)) + 2` above that.
pub fn stump_vc_dim(dim: usize) -> usize {
    if dim <= 1 {
        2
    } else {
        (2.0 * dim as f64).log2().ceil() as usize + 2
    }
}

/// Candidate threshold strictly between two adjacent distinct values.
/// Falls back to `lo` when the two are neighbouring floats.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let mut m = (lo + hi) / 2.0;
    if !m.is_finite() {
        m = lo / 2.0 + hi / 2.0;
    }
    if lo <= m && m < hi {
        m
    } else {
        lo
    }
}

trait Mass: Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Default {}
impl Mass for u64 {}
impl Mass for f64 {}

struct Best<W> {
    stump: Stump,
    error: W,
}

/// One sweep over the sorted values of one feature. `items` holds
/// `(value, label, mass)` sorted by value. Candidates are visited in
/// ascending threshold order, orientation +1 before -1, and only a strictly
/// smaller error replaces the incumbent.
fn sweep_feature<W: Mass>(feature: usize, items: &[(f64, i8, W)], total: W, best: &mut Option<Best<W>>) {
    // orientation +1 at threshold -inf predicts +1 everywhere
    let mut err_plus = items.iter().filter(|t| t.1 < 0).fold(W::default(), |a, t| a + t.2);
    let mut consider = |threshold: f64, err_plus: W| {
        for (orientation, err) in [(1i8, err_plus), (-1i8, total - err_plus)] {
            if best.as_ref().is_none_or(|b| err < b.error) {
                *best = Some(Best { stump: Stump { feature, threshold, orientation }, error: err });
            }
        }
    };
    consider(f64::NEG_INFINITY, err_plus);
    let mut i = 0;
    while i < items.len() {
        let v = items[i].0;
        let mut j = i;
        while j < items.len() && items[j].0 == v {
            // this point moves to the -1 side
            if items[j].1 > 0 {
                err_plus = err_plus + items[j].2;
            } else {
                err_plus = err_plus - items[j].2;
            }
            j += 1;
        }
        let threshold = if j < items.len() { midpoint(v, items[j].0) } else { f64::INFINITY };
        consider(threshold, err_plus);
        i = j;
    }
}

/// Empirical-risk-minimizing stump under uniform weights over the sample
/// positions. Returns the stump and its number of mistakes. Ties go to the
/// lowest feature, then the lowest threshold, then orientation +1.
pub fn train_stump(sample: SampleView<'_>) -> Result<(Stump, usize)> {
    if sample.is_empty() {
        return Err(Error::invalid("stump training on an empty sample"));
    }
    let dim = sample.iter().next().map(|e| e.x().len()).unwrap_or(0);
    if dim == 0 {
        return Err(Error::invalid("stump training needs at least one feature"));
    }
    let total = sample.len() as u64;
    let mut best: Option<Best<u64>> = None;
    let mut items: Vec<(f64, i8, u64)> = Vec::with_capacity(sample.len());
    for feature in 0..dim {
        items.clear();
        items.extend(sample.iter().map(|e| (e.x()[feature], e.y(), 1u64)));
        items.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        sweep_feature(feature, &items, total, &mut best);
    }
    let best = best.expect("at least one candidate");
    Ok((best.stump, best.error as usize))
}

/// Weighted ERM stump over a whole dataset, used by the AdaBoost baseline.
/// Returns the stump and its weighted error.
pub fn train_stump_weighted(data: &Dataset, weights: &[f64]) -> Result<(Stump, f64)> {
    if weights.len() != data.len() {
        return Err(Error::invalid("weights do not index the dataset"));
    }
    let total: f64 = weights.iter().sum();
    let mut best: Option<Best<f64>> = None;
    let mut items: Vec<(f64, i8, f64)> = Vec::with_capacity(data.len());
    for feature in 0..data.dim() {
        items.clear();
        items.extend(data.examples().iter().zip(weights).map(|(e, &w)| (e.x()[feature], e.y(), w)));
        items.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        sweep_feature(feature, &items, total, &mut best);
    }
    let best = best.expect("at least one candidate");
    Ok((best.stump, best.error.clamp(0.0, 1.0)))
}

/// Deterministic ERM stump learner.
#[derive(Debug, Clone)]
pub struct StumpLearner {
    spec: WeakLearnerSpec,
}

impl StumpLearner {
    /// Stump learner over `dim` features claiming advantage `gamma`.
    pub fn new(gamma: f64, dim: usize) -> Result<Self> {
        Ok(StumpLearner {
            spec: WeakLearnerSpec::new(gamma, stump_vc_dim(dim), true)?,
        })
    }
}

impl WeakLearner for StumpLearner {
    fn name(&self) -> &'static str {
        "stump"
    }

    fn spec(&self) -> &WeakLearnerSpec {
        &self.spec
    }

    fn fit(&self, sample: SampleView<'_>, _rng: &mut RngStream) -> Hypothesis {
        let (stump, _) = train_stump(sample).expect("non-empty sample with features");
        Hypothesis::Stump(stump)
    }
}
