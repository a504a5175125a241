//! Probability distributions over dataset positions and i.i.d. sampling
//! from them.

use serde::{Deserialize, Serialize};

use crate::hexfloat;
use crate::rng::RngStream;
use crate::{Error, Result};

/// Allowed deviation of the total mass from one.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightDistribution {
    #[serde(with = "hexfloat::vec")]
    weights: Vec<f64>,
}

impl WeightDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("empty distribution"));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::NumericDomain(format!("weight {w} is negative or non-finite")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::NumericDomain(format!("weights sum to {total}, not 1")));
        }
        Ok(WeightDistribution { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("uniform distribution over zero points"));
        }
        Ok(WeightDistribution {
            weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sampler(&self) -> CumulativeSampler {
        CumulativeSampler::new(&self.weights)
    }
}

/// Scales non-negative weights to unit mass. Returns the distribution and
/// the normalizer `Z = sum(raw)`.
pub fn normalize(raw: Vec<f64>) -> Result<(WeightDistribution, f64)> {
    if raw.is_empty() {
        return Err(Error::NumericDomain("cannot normalize an empty weight vector".into()));
    }
    if let Some(w) = raw.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::NumericDomain(format!("raw weight {w} is negative or non-finite")));
    }
    let z: f64 = raw.iter().sum();
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::NumericDomain(format!("normalizer {z} is not positive and finite")));
    }
    let mut weights = raw;
    for w in &mut weights {
        *w /= z;
    }
    Ok((WeightDistribution { weights }, z))
}

/// Inverse-CDF sampler over a cumulative weight array, `O(log n)` per draw.
#[derive(Debug, Clone)]
pub struct CumulativeSampler {
    cumulative: Vec<f64>,
}

impl CumulativeSampler {
    pub fn new(weights: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        CumulativeSampler { cumulative }
    }

    #[inline]
    pub fn draw(&self, rng: &mut RngStream) -> usize {
        let total = *self.cumulative.last().expect("non-empty sampler");
        let target = rng.next_f64() * total;
        // first index whose cumulative mass exceeds the target; zero-weight
        // entries share their predecessor's cumulative value and are skipped
        let i = self.cumulative.partition_point(|&c| c <= target);
        i.min(self.cumulative.len() - 1)
    }
}

/// `m` independent draws (with replacement) from `dist`, in draw order.
pub fn draw_iid(dist: &WeightDistribution, m: usize, rng: &mut RngStream) -> Result<Vec<usize>> {
    if dist.is_empty() {
        return Err(Error::invalid("cannot sample from an empty distribution"));
    }
    if m == 0 {
        return Err(Error::invalid("sample size must be positive"));
    }
    let sampler = dist.sampler();
    Ok((0..m).map(|_| sampler.draw(rng)).collect())
}
