//! Brute-force reference implementations and random small instances.

use sampboost::dataset::{Dataset, LabeledExample};
use sampboost::rng::RngStream;
use sampboost::weak::Stump;

/// Tries every feature, every threshold at a sample value or `-inf`, and
/// both orientations, keeping the first strict improvement in the order
/// (feature, threshold ascending, +1 before -1).
pub fn brute_force_stump(sample: &[LabeledExample]) -> (Stump, usize) {
    let dim = sample[0].x().len();
    let mut best: Option<(Stump, usize)> = None;
    for feature in 0..dim {
        let mut thresholds: Vec<f64> = sample.iter().map(|e| e.x()[feature]).collect();
        thresholds.push(f64::NEG_INFINITY);
        thresholds.sort_by(f64::total_cmp);
        thresholds.dedup();
        for &threshold in &thresholds {
            for orientation in [1i8, -1] {
                let s = Stump { feature, threshold, orientation };
                let errors = sample.iter().filter(|e| s.predict(e.x()) != e.y()).count();
                if best.as_ref().is_none_or(|b| errors < b.1) {
                    best = Some((s, errors));
                }
            }
        }
    }
    best.unwrap()
}

/// Largest `|D-error - sample error|` over every stump labelling of the
/// dataset, enumerated explicitly.
pub fn brute_force_deviation(sample: &[usize], data: &Dataset, weights: &[f64]) -> f64 {
    let mut counts = vec![0usize; data.len()];
    for &i in sample {
        counts[i] += 1;
    }
    let mut worst: f64 = 0.0;
    for feature in 0..data.dim() {
        let mut thresholds: Vec<f64> = data.examples().iter().map(|e| e.x()[feature]).collect();
        thresholds.push(f64::NEG_INFINITY);
        for &threshold in &thresholds {
            for orientation in [1i8, -1] {
                let s = Stump { feature, threshold, orientation };
                let (mut err_d, mut err_s) = (0.0, 0usize);
                for (i, e) in data.examples().iter().enumerate() {
                    if s.predict(e.x()) != e.y() {
                        err_d += weights[i];
                        err_s += counts[i];
                    }
                }
                worst = worst.max((err_d - err_s as f64 / sample.len() as f64).abs());
            }
        }
    }
    worst
}

fn grid_value(rng: &mut RngStream) -> f64 {
    // a coarse grid so that ties and repeated values are common
    rng.below(7) as f64 - 3.0
}

fn label(rng: &mut RngStream) -> i8 {
    if rng.below(2) == 0 {
        1
    } else {
        -1
    }
}

/// A sample of 1 to 12 labelled points in 1 to 3 dimensions. Points may
/// repeat, as in a subsample drawn with replacement.
pub fn random_sample(seed: u64) -> Vec<LabeledExample> {
    let mut rng = RngStream::new(seed, 11);
    let dim = 1 + rng.below(3) as usize;
    let distinct = 1 + rng.below(8) as usize;
    let points: Vec<LabeledExample> = (0..distinct)
        .map(|_| LabeledExample::new((0..dim).map(|_| grid_value(&mut rng)).collect(), label(&mut rng)).unwrap())
        .collect();
    let m = 1 + rng.below(12) as usize;
    (0..m).map(|_| points[rng.below(distinct as u64) as usize].clone()).collect()
}

pub struct ApproxInstance {
    pub data: Dataset,
    pub weights: Vec<f64>,
    pub sample: Vec<usize>,
    pub eps: f64,
}

/// A duplicate-free dataset of 1 to 12 points in 1 or 2 dimensions, a random
/// distribution over it, a sample drawn from it and a tolerance.
pub fn random_approx_instance(seed: u64) -> ApproxInstance {
    let mut rng = RngStream::new(seed, 12);
    let dim = 1 + rng.below(2) as usize;
    let n = 1 + rng.below(12) as usize;
    let mut pairs: Vec<(Vec<f64>, i8)> = Vec::new();
    while pairs.len() < n {
        let x: Vec<f64> = (0..dim).map(|_| grid_value(&mut rng)).collect();
        if pairs.iter().all(|(p, _)| p != &x) {
            let y = label(&mut rng);
            pairs.push((x, y));
        }
        if pairs.len() as u64 >= 7u64.pow(dim as u32) {
            break;
        }
    }
    let data = Dataset::from_pairs(pairs).unwrap();
    let raw: Vec<f64> = (0..data.len()).map(|_| rng.next_f64() + 0.01).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let m = 1 + rng.below(12) as usize;
    let sample = (0..m).map(|_| rng.below(data.len() as u64) as usize).collect();
    ApproxInstance { data, weights, sample, eps: rng.next_f64() * 0.5 }
}
