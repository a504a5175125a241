use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::audit::audit_stream;
use crate::boost::{sampled_boost_streaming, BoostConfig};
use crate::dataset::{Dataset, LabeledExample};
use crate::rng::RngStream;
use crate::weak::{SampleView, WeakLearner};
use crate::{Error, Result, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureReport {
    pub schema: u32,
    pub trials: usize,
    /// Runs whose reconstructed classifier errs on some training point.
    pub failures: usize,
    pub rate: f64,
    /// Runs where the reconstruction disagreed with the run's own vote on a
    /// training point; always zero for a deterministic learner.
    pub reconstruction_mismatches: usize,
}

/// Runs the scheme `trials` times on independent streams, reconstructs each
/// encoding, and counts runs that misclassify a training point.
pub fn failure_rate_estimate<L: WeakLearner + ?Sized>(
    data: &Dataset,
    learner: &L,
    config: &BoostConfig,
    trials: usize,
) -> Result<FailureReport> {
    if trials == 0 {
        return Err(Error::invalid("failure estimate needs at least one trial"));
    }
    if !learner.spec().deterministic {
        return Err(Error::Contract(format!("learner {} is not deterministic", learner.name())));
    }
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let cfg = BoostConfig { stream: audit_stream(config.stream, i), capture_distributions: false, ..config.clone() };
            run_once(data, learner, &cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = outcomes.iter().filter(|o| o.0).count();
    Ok(FailureReport {
        schema: SCHEMA_VERSION,
        trials,
        failures,
        rate: failures as f64 / trials as f64,
        reconstruction_mismatches: outcomes.iter().filter(|o| o.1).count(),
    })
}

/// One encode-and-reconstruct cycle. Each group of the encoding is the
/// round's subsample taken by value; it is retrained as soon as the round
/// ends so that long runs never hold the whole sequence. Dataset points are
/// distinct, so deduplicating a group by index is deduplicating by value.
fn run_once<L: WeakLearner + ?Sized>(data: &Dataset, learner: &L, config: &BoostConfig) -> Result<(bool, bool)> {
    let n = data.len();
    let mut votes = vec![0i64; n];
    let mut rebuilt_votes = vec![0i64; n];
    let mut rng = RngStream::new(0, 0);
    let mut slot = vec![usize::MAX; n];
    let mut pool: Vec<LabeledExample> = Vec::new();
    let mut positions = Vec::new();
    sampled_boost_streaming(data, learner, config, |r| {
        pool.clear();
        positions.clear();
        for &i in r.subsample {
            if slot[i] == usize::MAX {
                slot[i] = pool.len();
                pool.push(data.examples()[i].clone());
            }
            positions.push(slot[i]);
        }
        for &i in r.subsample {
            slot[i] = usize::MAX;
        }
        let h = learner.fit(SampleView::new(&pool, &positions)?, &mut rng);
        for ((v, w), (&p, e)) in votes.iter_mut().zip(rebuilt_votes.iter_mut()).zip(r.predictions.iter().zip(data.examples())) {
            *v += i64::from(p);
            *w += i64::from(h.predict(e.x()));
        }
        Ok(())
    })?;
    let sign = |v: i64| if v >= 0 { 1 } else { -1 };
    let fails = rebuilt_votes.iter().zip(data.examples()).any(|(&w, e)| sign(w) != e.y());
    let mismatch = votes.iter().zip(&rebuilt_votes).any(|(&v, &w)| sign(v) != sign(w));
    Ok((fails, mismatch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weak::{Hypothesis, PlantedLearner, StumpLearner};

    fn line(n: usize) -> Dataset {
        Dataset::from_pairs((0..n).map(|i| (vec![i as f64], if (i / 3) % 2 == 0 { 1 } else { -1 }))).unwrap()
    }

    #[test]
    fn perfect_learner_never_fails() {
        let data = line(12);
        let learner = PlantedLearner::new(Hypothesis::table_from(&data), 0.5, 2).unwrap();
        let cfg = BoostConfig::new(0.5, 0.1, 2).with_overrides(Some(5), None);
        let r = failure_rate_estimate(&data, &learner, &cfg, 20).unwrap();
        assert_eq!(r.rate, 0.0);
        assert_eq!(r.reconstruction_mismatches, 0);
    }

    #[test]
    fn single_stump_on_inseparable_data_fails() {
        let data = line(12);
        let learner = StumpLearner::new(0.05, 1).unwrap();
        let cfg = BoostConfig::new(0.05, 0.1, 2).with_overrides(Some(1), Some(12));
        let r = failure_rate_estimate(&data, &learner, &cfg, 30).unwrap();
        // no single stump fits four alternating blocks
        assert_eq!(r.rate, 1.0);
        assert!((0.0..=1.0).contains(&r.rate));
    }

    #[test]
    fn streaming_matches_materialized_reconstruction() {
        use crate::boost::{sampled_boost, Ensemble};
        use crate::compress::{encode, reconstruct};
        let data = line(12);
        let learner = StumpLearner::new(0.1, 1).unwrap();
        let cfg = BoostConfig::new(0.1, 0.1, 5).with_overrides(Some(25), Some(6));
        let (_, trace) = sampled_boost(&data, &learner, &cfg).unwrap();
        let rebuilt = reconstruct(&encode(&trace, &data).unwrap(), &learner).unwrap();
        let expected = data.examples().iter().any(|e| rebuilt.predict(e.x()) != e.y());
        assert_eq!(run_once(&data, &learner, &cfg).unwrap(), (expected, false));
    }
}
