//! Small statistical helpers: chi-square tests, total variation, quantiles.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

fn upper_tail(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    dist.sf(statistic)
}

/// Pearson goodness of fit of observed category counts against
/// probabilities. Categories with zero probability must have zero count;
/// they are dropped from the degrees of freedom.
pub fn chi_square_goodness_of_fit(observed: &[u64], probs: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(Error::invalid("observed and expected lengths differ or are empty"));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::invalid("no observations"));
    }
    let mut statistic = 0.0;
    let mut live = 0usize;
    for (&o, &p) in observed.iter().zip(probs) {
        if p <= 0.0 {
            if o > 0 {
                return Ok(ChiSquareResult { statistic: f64::INFINITY, dof: 0, p_value: 0.0 });
            }
            continue;
        }
        live += 1;
        let e = p * total as f64;
        statistic += (o as f64 - e).powi(2) / e;
    }
    let dof = live.saturating_sub(1);
    Ok(ChiSquareResult { statistic, dof, p_value: upper_tail(statistic, dof) })
}

/// Two-sample chi-square test of homogeneity over the union of observed
/// categories (2 x c contingency table).
pub fn chi_square_two_sample<K: Ord + Clone>(
    a: &BTreeMap<K, u64>,
    b: &BTreeMap<K, u64>,
) -> Result<ChiSquareResult> {
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    if na == 0 || nb == 0 {
        return Err(Error::invalid("both samples need at least one observation"));
    }
    let total = (na + nb) as f64;
    let mut cats: Vec<&K> = a.keys().chain(b.keys()).collect();
    cats.sort();
    cats.dedup();
    let mut statistic = 0.0;
    for k in &cats {
        let oa = *a.get(*k).unwrap_or(&0) as f64;
        let ob = *b.get(*k).unwrap_or(&0) as f64;
        let col = oa + ob;
        let ea = col * na as f64 / total;
        let eb = col * nb as f64 / total;
        statistic += (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb;
    }
    let dof = cats.len().saturating_sub(1);
    Ok(ChiSquareResult { statistic, dof, p_value: upper_tail(statistic, dof) })
}

/// Total variation distance between two (sub-)probability maps; missing keys
/// count as zero mass.
pub fn total_variation<K: Ord>(p: &BTreeMap<K, f64>, q: &BTreeMap<K, f64>) -> f64 {
    let mut sum = 0.0;
    for (k, pv) in p {
        sum += (pv - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, qv) in q {
        if !p.contains_key(k) {
            sum += qv.abs();
        }
    }
    (0.5 * sum).clamp(0.0, 1.0)
}

/// Normalizes counts into an empirical law.
pub fn empirical_law<K: Ord + Clone>(counts: &BTreeMap<K, u64>) -> BTreeMap<K, f64> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return BTreeMap::new();
    }
    counts.iter().map(|(k, &c)| (k.clone(), c as f64 / total as f64)).collect()
}

/// Linear-interpolation quantile (Hyndman-Fan type 7) of unsorted data.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

pub fn median(values: &[f64]) -> Option<f64> {
    quantile(values, 0.5)
}
