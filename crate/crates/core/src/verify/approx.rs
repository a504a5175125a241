use crate::dataset::Dataset;
use crate::dist::WeightDistribution;
use crate::weak::Hypothesis;
use crate::{Error, Result};

/// Slack on the epsilon comparison for floating-point summation.
pub const APPROX_TOLERANCE: f64 = 1e-12;

/// A finite hypothesis class over a fixed dataset.
#[derive(Debug, Clone)]
pub enum HypothesisClass {
    /// Every stump on the dataset's midpoint-threshold grid, all features,
    /// both orientations, including the two constant classifiers.
    StumpGrid(StumpGrid),
    Explicit(Vec<Hypothesis>),
}

impl HypothesisClass {
    pub fn stump_grid(data: &Dataset) -> Self {
        HypothesisClass::StumpGrid(StumpGrid::new(data))
    }

    pub fn explicit(hypotheses: Vec<Hypothesis>) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::invalid("empty hypothesis class"));
        }
        Ok(HypothesisClass::Explicit(hypotheses))
    }
}

/// Per-feature dataset order, grouped by equal values.
#[derive(Debug, Clone)]
pub struct StumpGrid {
    n: usize,
    /// For each feature, groups of dataset indices sharing a value, ascending.
    groups: Vec<Vec<Vec<usize>>>,
}

impl StumpGrid {
    pub fn new(data: &Dataset) -> Self {
        let groups = (0..data.dim())
            .map(|f| {
                let mut order: Vec<usize> = (0..data.len()).collect();
                order.sort_by(|&a, &b| data.examples()[a].x()[f].total_cmp(&data.examples()[b].x()[f]));
                let mut groups: Vec<Vec<usize>> = Vec::new();
                let mut last = None;
                for i in order {
                    let v = data.examples()[i].x()[f];
                    if last == Some(v) {
                        groups.last_mut().expect("group exists").push(i);
                    } else {
                        groups.push(vec![i]);
                        last = Some(v);
                    }
                }
                groups
            })
            .collect();
        StumpGrid { n: data.len(), groups }
    }

    /// Largest `|Pr_D[h != y] - Pr_S[h != y]|` over the grid, where `S` is
    /// given by per-point sample counts.
    fn max_deviation(&self, labels: &[i8], weights: &[f64], counts: &[usize], m: usize) -> f64 {
        let mf = m as f64;
        let mass: f64 = weights.iter().sum();
        let mut worst: f64 = 0.0;
        for groups in &self.groups {
            // threshold -inf, orientation +1: every point predicted +1
            let mut err_d: f64 = (0..self.n).filter(|&i| labels[i] < 0).map(|i| weights[i]).sum();
            let mut err_s: usize = (0..self.n).filter(|&i| labels[i] < 0).map(|i| counts[i]).sum();
            let mut check = |err_d: f64, err_s: usize| {
                let plus = (err_d - err_s as f64 / mf).abs();
                let minus = ((mass - err_d) - (m - err_s) as f64 / mf).abs();
                worst = worst.max(plus).max(minus);
            };
            check(err_d, err_s);
            for g in groups {
                for &i in g {
                    if labels[i] > 0 {
                        err_d += weights[i];
                        err_s += counts[i];
                    } else {
                        err_d -= weights[i];
                        err_s -= counts[i];
                    }
                }
                check(err_d, err_s);
            }
        }
        worst
    }
}

/// Largest deviation between the `D`-weighted and the sample error rate over
/// the class, with the dataset labels as the concept.
pub fn max_deviation(sample: &[usize], data: &Dataset, dist: &WeightDistribution, class: &HypothesisClass) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::invalid("empty sample"));
    }
    if dist.len() != data.len() {
        return Err(Error::invalid("distribution does not index the dataset"));
    }
    let mut counts = vec![0usize; data.len()];
    for &i in sample {
        *counts.get_mut(i).ok_or_else(|| Error::invalid(format!("sample index {i} out of range")))? += 1;
    }
    let labels: Vec<i8> = data.examples().iter().map(|e| e.y()).collect();
    Ok(deviation_from_counts(&labels, dist.weights(), &counts, sample.len(), data, class))
}

pub(crate) fn deviation_from_counts(
    labels: &[i8],
    weights: &[f64],
    counts: &[usize],
    m: usize,
    data: &Dataset,
    class: &HypothesisClass,
) -> f64 {
    match class {
        HypothesisClass::StumpGrid(grid) => grid.max_deviation(labels, weights, counts, m),
        HypothesisClass::Explicit(hs) => hs
            .iter()
            .map(|h| {
                let mut err_d = 0.0;
                let mut err_s = 0usize;
                for (i, e) in data.examples().iter().enumerate() {
                    if h.predict(e.x()) != labels[i] {
                        err_d += weights[i];
                        err_s += counts[i];
                    }
                }
                (err_d - err_s as f64 / m as f64).abs()
            })
            .fold(0.0, f64::max),
    }
}

/// True iff the sample's error rate is within `eps` of the `D`-weighted error
/// rate for every hypothesis in the class.
pub fn is_eps_approximation(
    sample: &[usize],
    data: &Dataset,
    dist: &WeightDistribution,
    class: &HypothesisClass,
    eps: f64,
) -> Result<bool> {
    if !(eps >= 0.0) {
        return Err(Error::invalid(format!("eps {eps} is negative")));
    }
    Ok(max_deviation(sample, data, dist, class)? <= eps + APPROX_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn six() -> Dataset {
        Dataset::from_pairs([(0.0, 1), (1.0, -1), (2.0, 1), (3.0, 1), (4.0, -1), (5.0, -1)].map(|(x, y)| (vec![x], y))).unwrap()
    }

    #[test]
    fn whole_dataset_is_exact() {
        let data = six();
        let d = WeightDistribution::uniform(6).unwrap();
        let grid = HypothesisClass::stump_grid(&data);
        let all: Vec<usize> = (0..6).collect();
        assert!(is_eps_approximation(&all, &data, &d, &grid, 0.0).unwrap());
    }

    #[test]
    fn single_hypothesis_at_half() {
        let data = Dataset::from_pairs([(vec![0.0], 1), (vec![1.0], -1)]).unwrap();
        let d = WeightDistribution::uniform(2).unwrap();
        let class = HypothesisClass::explicit(vec![Hypothesis::stump(0, f64::NEG_INFINITY, 1)]).unwrap();
        assert!(is_eps_approximation(&[0, 1], &data, &d, &class, 0.0).unwrap());
        assert!(!is_eps_approximation(&[0, 0], &data, &d, &class, 0.1).unwrap());
        assert!(HypothesisClass::explicit(vec![]).is_err());
    }

    #[test]
    fn two_point_sample_deviation() {
        let data = six();
        let d = WeightDistribution::uniform(6).unwrap();
        let grid = HypothesisClass::stump_grid(&data);
        // the constant +1 errs on 3/6 of D and 0/2 of the sample
        let dev = max_deviation(&[0, 2], &data, &d, &grid).unwrap();
        assert!(dev >= 0.5 - 1e-15);
        assert!(!is_eps_approximation(&[0, 2], &data, &d, &grid, 0.4).unwrap());
    }
}
