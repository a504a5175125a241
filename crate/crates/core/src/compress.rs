//! The randomized compression scheme induced by sampled boosting.
//!
//! The encoder maps a run to the concatenation `S_1 ... S_K` of its
//! subsamples, stored by value. The decoder splits the sequence into `K`
//! groups of `m`, retrains the weak learner on each group and returns the
//! uniform vote. With a deterministic learner the decoded classifier equals
//! the run's classifier pointwise.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::boost::{BoostTrace, VotingClassifier};
use crate::dataset::{Dataset, LabeledExample};
use crate::rng::RngStream;
use crate::weak::{pool_sample, SampleView, WeakLearner};
use crate::{Error, Result, SCHEMA_VERSION};

/// `S_1 ... S_K` with its shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressionSequence {
    pub schema: u32,
    pub k: usize,
    pub m: usize,
    pub dim: usize,
    examples: Vec<LabeledExample>,
}

impl CompressionSequence {
    pub fn new(k: usize, m: usize, examples: Vec<LabeledExample>) -> Result<Self> {
        let dim = examples.first().map_or(0, |e| e.x().len());
        let seq = CompressionSequence { schema: SCHEMA_VERSION, k, m, dim, examples };
        seq.validate().map_err(|e| Error::invalid(e.to_string()))?;
        Ok(seq)
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// The `k`-th group (0-based).
    pub fn group(&self, k: usize) -> &[LabeledExample] {
        &self.examples[k * self.m..(k + 1) * self.m]
    }

    fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::parse(format!("unsupported schema version {}", self.schema)));
        }
        if self.k == 0 || self.m == 0 {
            return Err(Error::parse("K and m must be at least 1"));
        }
        if self.k.checked_mul(self.m) != Some(self.examples.len()) {
            return Err(Error::parse(format!(
                "sequence of {} examples does not have shape {} x {}",
                self.examples.len(),
                self.k,
                self.m
            )));
        }
        for e in &self.examples {
            e.validate().map_err(|e| Error::parse(e.to_string()))?;
            if e.x().len() != self.dim || self.dim == 0 {
                return Err(Error::parse("examples do not share the declared dimension"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sequences always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let seq: CompressionSequence = serde_json::from_str(text)?;
        seq.validate()?;
        Ok(seq)
    }

    /// `self ⊑ data`: every element of the sequence occurs in `data`.
    pub fn contained_in(&self, data: &Dataset) -> bool {
        let keys: HashSet<_> = data.examples().iter().map(LabeledExample::key).collect();
        self.examples.iter().all(|e| keys.contains(&e.key()))
    }
}

/// Concatenates the per-round subsamples of `trace` in round and draw order.
pub fn encode(trace: &BoostTrace, data: &Dataset) -> Result<CompressionSequence> {
    if trace.header.n != data.len() {
        return Err(Error::invalid(format!("trace is over {} points, dataset has {}", trace.header.n, data.len())));
    }
    let mut examples = Vec::with_capacity(trace.header.k * trace.header.m);
    for r in &trace.rounds {
        for &i in &r.subsample {
            let e = data.get(i).ok_or_else(|| Error::invalid(format!("round {} index {i} out of range", r.k)))?;
            examples.push(e.clone());
        }
    }
    CompressionSequence::new(trace.header.k, trace.header.m, examples)
}

/// Retrains `learner` on each group of `seq` and returns the uniform vote.
/// Only the sequence is consulted.
pub fn reconstruct<L: WeakLearner + ?Sized>(seq: &CompressionSequence, learner: &L) -> Result<VotingClassifier> {
    if !learner.spec().deterministic {
        return Err(Error::Contract(format!("learner {} is not deterministic", learner.name())));
    }
    if seq.k.checked_mul(seq.m) != Some(seq.len()) || seq.is_empty() {
        return Err(Error::invalid("sequence length is not K * m"));
    }
    let (pool, positions) = pool_sample(&seq.examples);
    // deterministic learners must not consume randomness
    let mut rng = RngStream::new(0, 0);
    let hypotheses = positions
        .chunks(seq.m)
        .map(|group| Ok(learner.fit(SampleView::new(&pool, group)?, &mut rng)))
        .collect::<Result<Vec<_>>>()?;
    VotingClassifier::new(hypotheses)
}

/// Number of distinct labelled examples in the sequence.
pub fn compression_size(seq: &CompressionSequence) -> usize {
    seq.examples.iter().map(LabeledExample::key).collect::<HashSet<_>>().len()
}

/// Generalization bound for a stable randomized scheme of size `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableBound {
    /// `C (s + ln(1/beta)) / n`.
    pub headline: f64,
    /// `2 (s ln 4 + ln(2/beta)) / n`, the constant-explicit form.
    pub explicit: f64,
}

pub fn stable_compression_bound(s: usize, n: usize, beta: f64, c: f64) -> Result<StableBound> {
    if s == 0 || n == 0 {
        return Err(Error::invalid("s and n must be at least 1"));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid(format!("beta {beta} outside (0, 1)")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("C must be positive"));
    }
    let (s, n) = (s as f64, n as f64);
    Ok(StableBound {
        headline: c * (s + (1.0 / beta).ln()) / n,
        explicit: 2.0 * (s * 4f64.ln() + (2.0 / beta).ln()) / n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundBranch {
    /// `(d + ln(1/gamma)) ln(n/delta) / (gamma^4 n)`.
    Compression,
    /// `d ln(n/d) ln(n) / (gamma^2 n) + ln(1/delta) / n`.
    Margin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleComplexityBound {
    pub value: f64,
    pub branch: BoundBranch,
    pub compression_term: f64,
    pub margin_term: f64,
}

/// Error bound for the sampled-boosting vote:
/// `C min{(d + ln(1/g)) ln(n/delta) / (g^4 n), d ln(n/d) ln(n) / (g^2 n) + ln(1/delta) / n}`.
pub fn sample_complexity_bound(gamma: f64, d: usize, n: usize, delta: f64, c: f64) -> Result<SampleComplexityBound> {
    if !(gamma > 0.0 && gamma.is_finite()) || d == 0 || !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("gamma, d and C must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta {delta} outside (0, 1)")));
    }
    if n <= d {
        return Err(Error::invalid(format!("n = {n} must exceed d = {d}")));
    }
    let (g, df, nf) = (gamma, d as f64, n as f64);
    let compression_term = c * (df + (1.0 / g).ln()) * (nf / delta).ln() / (g.powi(4) * nf);
    let margin_term = c * (df * (nf / df).ln() * nf.ln() / (g * g * nf) + (1.0 / delta).ln() / nf);
    let (value, branch) = if compression_term <= margin_term {
        (compression_term, BoundBranch::Compression)
    } else {
        (margin_term, BoundBranch::Margin)
    };
    Ok(SampleComplexityBound { value, branch, compression_term, margin_term })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boost::{sampled_boost, BoostConfig, Ensemble};
    use crate::weak::{Hypothesis, StumpLearner};

    fn ex(x: f64, y: i8) -> LabeledExample {
        LabeledExample::new(vec![x], y).unwrap()
    }

    #[test]
    fn encode_keeps_repetition_and_order() {
        let data = Dataset::from_pairs([(vec![0.0], -1), (vec![1.0], 1), (vec![2.0], 1)]).unwrap();
        let learner = StumpLearner::new(0.1, 1).unwrap();
        let cfg = BoostConfig::new(0.1, 0.1, 4).with_overrides(Some(3), Some(2));
        let (_, mut trace) = sampled_boost(&data, &learner, &cfg).unwrap();
        trace.rounds[0].subsample = vec![0, 0];
        let seq = encode(&trace, &data).unwrap();
        assert_eq!(seq.len(), 6);
        assert_eq!(seq.group(0), &[ex(0.0, -1), ex(0.0, -1)]);
        for (k, r) in trace.rounds.iter().enumerate() {
            let expect: Vec<_> = r.subsample.iter().map(|&i| data.examples()[i].clone()).collect();
            assert_eq!(seq.group(k), expect.as_slice());
        }
        assert!(seq.contained_in(&data));
        trace.rounds[1].subsample[0] = 9;
        assert!(encode(&trace, &data).is_err());
    }

    #[test]
    fn sizes() {
        let same = CompressionSequence::new(3, 2, vec![ex(1.0, 1); 6]).unwrap();
        assert_eq!(compression_size(&same), 1);
        let distinct = CompressionSequence::new(3, 2, (0..6).map(|i| ex(i as f64, 1)).collect()).unwrap();
        assert_eq!(compression_size(&distinct), 6);
        assert!(CompressionSequence::new(2, 2, vec![ex(1.0, 1); 3]).is_err());
    }

    #[test]
    fn single_group_reconstructs_its_stump() {
        let seq = CompressionSequence::new(1, 2, vec![ex(-1.0, -1), ex(1.0, 1)]).unwrap();
        let learner = StumpLearner::new(0.25, 1).unwrap();
        let vc = reconstruct(&seq, &learner).unwrap();
        assert_eq!(vc.hypotheses(), &[Hypothesis::stump(0, 0.0, 1)]);
        assert_eq!(vc.predict(&[-0.5]), -1);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let seq = CompressionSequence::new(2, 1, vec![ex(0.1, 1), ex(-1e-300, -1)]).unwrap();
        let back = CompressionSequence::from_json(&seq.to_json()).unwrap();
        assert_eq!(back, seq);
        assert!(CompressionSequence::from_json(r#"{"schema":1,"k":2,"m":1,"dim":1,"examples":[]}"#).is_err());
    }

    #[test]
    fn stable_bound_forms() {
        // beta = 2/e^2 makes ln(2/beta) = 2
        let b = stable_compression_bound(1, 2, 2.0 * (-2f64).exp(), 1.0).unwrap();
        assert!((b.explicit - (4f64.ln() + 2.0)).abs() < 1e-12);
        // beta = 2/e makes ln(2/beta) = 1
        let b = stable_compression_bound(1, 2, 2.0 * (-1f64).exp(), 1.0).unwrap();
        assert!((b.explicit - (4f64.ln() + 1.0)).abs() < 1e-12);
        assert!((b.explicit - 2.386_294_361_119_890_6).abs() < 1e-12);
        assert!((b.headline - (1.0 + 1.0 - 2f64.ln()) / 2.0).abs() < 1e-12);
        assert!(stable_compression_bound(1, 2, 1.0, 1.0).is_err());
        assert!(stable_compression_bound(1, 2, 0.0, 1.0).is_err());
        let mut last = f64::INFINITY;
        for n in 1..50 {
            let v = stable_compression_bound(3, n, 0.1, 1.0).unwrap();
            assert!(v.headline < last);
            last = v.headline;
        }
        assert!(stable_compression_bound(4, 10, 0.1, 1.0).unwrap().explicit > stable_compression_bound(3, 10, 0.1, 1.0).unwrap().explicit);
    }

    #[test]
    fn complexity_bound_branches() {
        assert!(sample_complexity_bound(0.1, 3, 3, 0.1, 1.0).is_err());
        let b = sample_complexity_bound(0.3, 2, 1000, 0.1, 1.0).unwrap();
        let d = sample_complexity_bound(0.3, 2, 1000, 0.1, 2.0).unwrap();
        assert!((d.value - 2.0 * b.value).abs() < 1e-15 * d.value);
        // small gamma favours the margin branch
        assert_eq!(sample_complexity_bound(0.01, 2, 1000, 0.1, 1.0).unwrap().branch, BoundBranch::Margin);
        // large n favours the compression branch
        assert_eq!(sample_complexity_bound(0.3, 2, 1usize << 60, 0.1, 1.0).unwrap().branch, BoundBranch::Compression);
    }
}
