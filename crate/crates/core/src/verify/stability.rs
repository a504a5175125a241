use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boost::{reweight_predictions, sampled_boost_streaming, BoostConfig};
use crate::dataset::Dataset;
use crate::dist::WeightDistribution;
use crate::rng::{derive_stream_id, RngStream};
use crate::stats::{chi_square_two_sample, empirical_law, total_variation, ChiSquareResult};
use crate::weak::{Hypothesis, PlantedLearner, SampleView, StumpLearner, WeakLearner};
use crate::{Error, Result, SCHEMA_VERSION};

/// An outcome `T = S_1 ... S_K` as indices into the full sample `S`.
pub type Outcome = Vec<usize>;

/// Two laws closer than this in total variation count as identical.
pub const EXACT_TV_TOLERANCE: f64 = 1e-12;

/// A full sample `S`, a subsequence `S'` and the scheme parameters.
pub struct StabilityInstance {
    pub name: String,
    pub data: Dataset,
    /// Strictly increasing indices of `S'` in `S`.
    pub subsequence: Vec<usize>,
    pub learner: Arc<dyn WeakLearner>,
    /// Must carry explicit `K` and `m` overrides.
    pub config: BoostConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityOptions {
    /// Runs per arm.
    pub trials: usize,
    pub seed: u64,
    /// Largest outcome space enumerated exactly.
    pub exact_limit: usize,
    pub significance: f64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions { trials: 100_000, seed: 0, exact_limit: 4096, significance: 0.001 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescription {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub learner: String,
    pub subsequence: Vec<usize>,
}

/// Comparison of the two laws by enumerating every outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactComparison {
    pub outcomes: usize,
    /// `Pr[kappa(S) ⊑ S']`.
    pub acceptance_probability: f64,
    pub tv: f64,
    /// Total variation in exact rational arithmetic, available when `K = 1`.
    pub rational_tv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticalComparison {
    pub categories: usize,
    pub tv: f64,
    pub tv_threshold: f64,
    pub chi_square: ChiSquareResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub schema: u32,
    pub instance: InstanceDescription,
    /// Runs of the scheme on `S`.
    pub trials_full: usize,
    /// Runs of the scheme on `S'`.
    pub trials_sub: usize,
    /// Runs on `S` whose outcome lies in `S'`.
    pub accepted: usize,
    pub retried: bool,
    pub exact: Option<ExactComparison>,
    pub statistical: Option<StatisticalComparison>,
    pub verdict: Verdict,
    pub warning: Option<String>,
}

impl StabilityInstance {
    fn describe(&self) -> Result<(InstanceDescription, usize, usize)> {
        let (k, m) = match (self.config.k_override, self.config.m_override) {
            (Some(k), Some(m)) => (k, m),
            _ => return Err(Error::invalid("stability instances need explicit K and m")),
        };
        if self.subsequence.is_empty() || self.subsequence.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("S' must be a non-empty strictly increasing index list"));
        }
        if self.subsequence.last().is_some_and(|&i| i >= self.data.len()) {
            return Err(Error::invalid("S' index out of range"));
        }
        if !self.learner.spec().deterministic {
            return Err(Error::Contract("stability needs a deterministic learner".into()));
        }
        let desc = InstanceDescription {
            name: self.name.clone(),
            n: self.data.len(),
            m,
            k,
            learner: self.learner.name().to_string(),
            subsequence: self.subsequence.clone(),
        };
        Ok((desc, k, m))
    }
}

/// Compares `kappa(S')` with `kappa(S)` conditioned on `kappa(S) ⊑ S'`.
pub fn stability_test(instance: &StabilityInstance, options: &StabilityOptions) -> Result<StabilityReport> {
    let (description, k, m) = instance.describe()?;
    let sub_data = instance.data.subsequence(&instance.subsequence)?;
    // the subsample on S' must use the same N as the run on S
    let n_bound = instance.config.upper_bound_n.unwrap_or(instance.data.len() as u64);
    let config = BoostConfig { upper_bound_n: Some(n_bound), ..instance.config.clone() };
    let inside: HashSet<usize> = instance.subsequence.iter().copied().collect();

    let exact = exact_comparison(instance, &sub_data, &config, &inside, k, m, options.exact_limit)?;

    let mut retried = false;
    let mut trials_full = options.trials;
    let mut statistical = None;
    let mut accepted = 0;
    let mut trials_sub = 0;
    if options.trials > 0 {
        let mut attempt = 0u64;
        let full_counts = loop {
            let counts = sample_outcomes(&instance.data, &*instance.learner, &config, options.seed, [0, attempt], trials_full, None)?;
            let kept: BTreeMap<Outcome, u64> =
                counts.into_iter().filter(|(t, _)| t.iter().all(|i| inside.contains(i))).collect();
            if !kept.is_empty() || attempt == 1 {
                break kept;
            }
            attempt = 1;
            retried = true;
            trials_full = options.trials.saturating_mul(10);
        };
        accepted = full_counts.values().sum::<u64>() as usize;
        if accepted > 0 {
            trials_sub = options.trials;
            let sub_counts = sample_outcomes(
                &sub_data,
                &*instance.learner,
                &config,
                options.seed,
                [1, 0],
                trials_sub,
                Some(&instance.subsequence),
            )?;
            let chi_square = chi_square_two_sample(&full_counts, &sub_counts)?;
            let categories = full_counts.keys().chain(sub_counts.keys()).collect::<HashSet<_>>().len();
            let tv = total_variation(&empirical_law(&full_counts), &empirical_law(&sub_counts));
            statistical = Some(StatisticalComparison {
                categories,
                tv,
                tv_threshold: tv_threshold(categories, accepted, trials_sub, options.significance),
                chi_square,
            });
        }
    }

    let exact_ok = exact.as_ref().map(|e| e.tv <= EXACT_TV_TOLERANCE && e.rational_tv.as_deref().is_none_or(|r| r == "0"));
    let stat_ok = statistical.as_ref().map(|s| s.chi_square.p_value > options.significance && s.tv <= s.tv_threshold);
    let (verdict, warning) = match (exact_ok, stat_ok) {
        (Some(false), _) | (_, Some(false)) => (Verdict::Fail, None),
        (None, None) => (Verdict::Inconclusive, Some("no run on S landed inside S' and the instance is too large to enumerate".into())),
        (_, None) if options.trials > 0 => (Verdict::Pass, Some("no run on S landed inside S'; verdict rests on enumeration".into())),
        _ => (Verdict::Pass, None),
    };
    Ok(StabilityReport {
        schema: SCHEMA_VERSION,
        instance: description,
        trials_full,
        trials_sub,
        accepted,
        retried,
        exact,
        statistical,
        verdict,
        warning,
    })
}

/// Expected plus deviation term for the total variation between two
/// empirical laws of the same distribution over `categories` outcomes.
fn tv_threshold(categories: usize, n1: usize, n2: usize, significance: f64) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    let spread = 0.5 * (categories as f64 * (1.0 / a + 1.0 / b)).sqrt();
    let deviation = ((2.0 / significance).ln() / 2.0).sqrt() * (1.0 / a.sqrt() + 1.0 / b.sqrt());
    spread + deviation
}

fn exec_outcome<L: WeakLearner + ?Sized>(data: &Dataset, learner: &L, config: &BoostConfig) -> Result<Outcome> {
    let mut outcome = Vec::new();
    sampled_boost_streaming(data, learner, config, |r| {
        outcome.extend_from_slice(r.subsample);
        Ok(())
    })?;
    Ok(outcome)
}

/// Outcome counts of `trials` independent runs. With `map`, indices of the
/// dataset are translated through it.
fn sample_outcomes<L: WeakLearner + ?Sized>(
    data: &Dataset,
    learner: &L,
    config: &BoostConfig,
    seed: u64,
    arm: [u64; 2],
    trials: usize,
    map: Option<&[usize]>,
) -> Result<BTreeMap<Outcome, u64>> {
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let cfg = BoostConfig { seed, stream: derive_stream_id(&[arm[0], arm[1], t]), ..config.clone() };
            let mut o = exec_outcome(data, learner, &cfg)?;
            if let Some(map) = map {
                o.iter_mut().for_each(|i| *i = map[*i]);
            }
            Ok(o)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = BTreeMap::new();
    for o in outcomes {
        *counts.entry(o).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Exact law of the outcome by recursion over every subsample sequence.
/// Returns `None` if the outcome space exceeds `limit`.
pub fn outcome_law<L: WeakLearner + ?Sized>(
    data: &Dataset,
    learner: &L,
    config: &BoostConfig,
    limit: usize,
) -> Result<Option<BTreeMap<Outcome, f64>>> {
    let sched = config.schedule(data.len(), learner.spec().vc_dim)?;
    let n = data.len();
    let space = (n as f64).powf((sched.m * sched.k) as f64);
    if space > limit as f64 {
        return Ok(None);
    }
    let labels: Vec<i8> = data.examples().iter().map(|e| e.y()).collect();
    let mut law = BTreeMap::new();
    let mut prefix = Vec::with_capacity(sched.m * sched.k);
    recurse(data, learner, &labels, sched.m, sched.k, sched.alpha, &WeightDistribution::uniform(n)?, 1.0, &mut prefix, &mut law)?;
    Ok(Some(law))
}

#[allow(clippy::too_many_arguments)]
fn recurse<L: WeakLearner + ?Sized>(
    data: &Dataset,
    learner: &L,
    labels: &[i8],
    m: usize,
    rounds_left: usize,
    alpha: f64,
    dist: &WeightDistribution,
    prob: f64,
    prefix: &mut Vec<usize>,
    law: &mut BTreeMap<Outcome, f64>,
) -> Result<()> {
    if rounds_left == 0 {
        *law.entry(prefix.clone()).or_insert(0.0) += prob;
        return Ok(());
    }
    let n = data.len();
    let mut seq = vec![0usize; m];
    let mut rng = RngStream::new(0, 0);
    loop {
        let p: f64 = seq.iter().map(|&i| dist.weights()[i]).product();
        if p > 0.0 {
            let h = learner.fit(SampleView::new(data.examples(), &seq)?, &mut rng);
            let preds: Vec<i8> = data.examples().iter().map(|e| h.predict(e.x())).collect();
            let (next, _) = reweight_predictions(dist, labels, &preds, alpha)?;
            let mark = prefix.len();
            prefix.extend_from_slice(&seq);
            recurse(data, learner, labels, m, rounds_left - 1, alpha, &next, prob * p, prefix, law)?;
            prefix.truncate(mark);
        }
        // odometer over [n]^m
        let mut pos = m;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            seq[pos] += 1;
            if seq[pos] < n {
                break;
            }
            seq[pos] = 0;
        }
    }
}

fn exact_comparison(
    instance: &StabilityInstance,
    sub_data: &Dataset,
    config: &BoostConfig,
    inside: &HashSet<usize>,
    k: usize,
    m: usize,
    limit: usize,
) -> Result<Option<ExactComparison>> {
    let Some(full) = outcome_law(&instance.data, &*instance.learner, config, limit)? else {
        return Ok(None);
    };
    let Some(sub) = outcome_law(sub_data, &*instance.learner, config, limit)? else {
        return Ok(None);
    };
    let acceptance: f64 = full.iter().filter(|(t, _)| t.iter().all(|i| inside.contains(i))).map(|(_, p)| p).sum();
    let conditional: BTreeMap<Outcome, f64> = full
        .iter()
        .filter(|(t, _)| t.iter().all(|i| inside.contains(i)))
        .map(|(t, p)| (t.clone(), p / acceptance))
        .collect();
    let mapped: BTreeMap<Outcome, f64> =
        sub.into_iter().map(|(t, p)| (t.iter().map(|&i| instance.subsequence[i]).collect(), p)).collect();
    let rational_tv = (k == 1).then(|| rational_single_round_tv(instance.data.len(), &instance.subsequence, m)).flatten();
    Ok(Some(ExactComparison {
        outcomes: full.len(),
        acceptance_probability: acceptance,
        tv: total_variation(&conditional, &mapped),
        rational_tv: rational_tv.map(|r| r.to_string()),
    }))
}

/// With one round the outcome is `m` uniform draws from `S`. Returns the
/// total variation between the conditioned law and the law on `S'`, in
/// exact arithmetic.
fn rational_single_round_tv(n: usize, sub: &[usize], m: usize) -> Option<Ratio<i128>> {
    let n = i128::try_from(n).ok()?;
    let n_sub = i128::try_from(sub.len()).ok()?;
    let m32 = u32::try_from(m).ok()?;
    let p_full = Ratio::new(1, n.checked_pow(m32)?);
    let accepted = Ratio::from_integer(n_sub.checked_pow(m32)?) * p_full;
    let conditional = p_full / accepted;
    let p_sub = Ratio::new(1, n_sub.checked_pow(m32)?);
    // every accepted outcome is an outcome of S' and vice versa
    let diff = if conditional > p_sub { conditional - p_sub } else { p_sub - conditional };
    Some(diff * Ratio::from_integer(n_sub.pow(m32)) / Ratio::from_integer(2))
}

/// Named instance families.
pub fn suite(name: &str) -> Result<Vec<StabilityInstance>> {
    match name {
        "k1-family" => Ok(k1_family()),
        "k2-family" => Ok(k2_family()),
        "stump-k2" => Ok(stump_k2()),
        "standard" => {
            let mut all = k1_family();
            all.extend(k2_family());
            Ok(all)
        }
        other => Err(Error::invalid(format!("unknown stability suite {other:?}"))),
    }
}

pub const SUITES: &[&str] = &["k1-family", "k2-family", "standard", "stump-k2"];

const SUITE_GAMMA: f64 = 0.25;

fn suite_data(n: usize) -> Dataset {
    Dataset::from_pairs((0..n).map(|i| (vec![i as f64], if i % 2 == 0 { 1 } else { -1 }))).expect("distinct points")
}

/// `S'` choices: prefixes and suffixes of sizes `n - 1`, `ceil(n/2)` and
/// `m K`, capped at `n`.
fn subsequences(n: usize, mk: usize) -> Vec<Vec<usize>> {
    let mut sizes = vec![n.saturating_sub(1).max(1), n.div_ceil(2), mk.min(n)];
    sizes.sort_unstable();
    sizes.dedup();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for s in sizes {
        for cand in [(0..s).collect::<Vec<_>>(), (n - s..n).collect()] {
            if !out.contains(&cand) {
                out.push(cand);
            }
        }
    }
    out
}

fn family(prefix: &str, n: usize, k: usize, m: usize, learner: Arc<dyn WeakLearner>) -> Vec<StabilityInstance> {
    subsequences(n, m * k)
        .into_iter()
        .map(|sub| StabilityInstance {
            name: format!("{prefix}-n{n}-sub{}", sub.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("_")),
            data: suite_data(n),
            subsequence: sub,
            learner: Arc::clone(&learner),
            config: BoostConfig::new(SUITE_GAMMA, 0.1, 0).with_overrides(Some(k), Some(m)),
        })
        .collect()
}

fn stump() -> Arc<dyn WeakLearner> {
    Arc::new(StumpLearner::new(SUITE_GAMMA, 1).expect("valid gamma"))
}

fn k1_family() -> Vec<StabilityInstance> {
    [2, 3, 4].into_iter().flat_map(|n| family("k1", n, 1, 1, stump())).collect()
}

fn k2_family() -> Vec<StabilityInstance> {
    // a fixed target that errs on part of the sample makes D_2 non-uniform
    let target = Hypothesis::stump(0, 0.5, 1);
    let planted: Arc<dyn WeakLearner> = Arc::new(PlantedLearner::new(target, SUITE_GAMMA, 2).expect("valid gamma"));
    family("k2-planted", 3, 2, 1, planted)
}

fn stump_k2() -> Vec<StabilityInstance> {
    let mut all = family("k2-stump", 3, 2, 1, stump());
    all.extend(family("k2-stump-m2", 3, 2, 2, stump()));
    all
}
