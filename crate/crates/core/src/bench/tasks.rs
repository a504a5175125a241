use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::dataset::{feature_key, Dataset, LabeledExample};
use crate::hexfloat;
use crate::rng::{derive_stream_id, RngStream};
use crate::weak::{pool_sample, train_stump, Hypothesis, Interval, SampleView};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    /// One threshold on feature 0.
    Threshold,
    /// Positive on `[-1, -1/2) ∪ [0, 1/2)` of feature 0.
    Interval,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Threshold => "threshold",
            TaskKind::Interval => "interval",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "threshold" => Ok(TaskKind::Threshold),
            "interval" => Ok(TaskKind::Interval),
            other => Err(Error::invalid(format!("unknown task {other:?}"))),
        }
    }
}

/// Parameters of a synthetic task. Feature 0 carries the concept; further
/// features are uniform noise on `[-1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub n_train: usize,
    pub n_test: usize,
    pub dim: usize,
    /// Threshold of the threshold task.
    #[serde(with = "hexfloat::scalar", default)]
    pub threshold: f64,
    /// Half-width of the empty band around every decision boundary.
    #[serde(with = "hexfloat::scalar", default = "default_band")]
    pub band: f64,
    pub seed: u64,
}

fn default_band() -> f64 {
    0.005
}

/// Boundaries of the interval task inside `[-1, 1)`.
const INTERVAL_BOUNDARIES: [f64; 3] = [-0.5, 0.0, 0.5];

impl TaskSpec {
    pub fn new(kind: TaskKind, n_train: usize, seed: u64) -> Self {
        TaskSpec { kind, n_train, n_test: 10 * n_train, dim: 1, threshold: 0.0, band: default_band(), seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_train == 0 || self.n_test == 0 {
            return Err(Error::invalid("train and test sizes must be at least 1"));
        }
        if self.dim == 0 {
            return Err(Error::invalid("tasks need at least one feature"));
        }
        if !(self.band >= 0.0 && self.band.is_finite()) {
            return Err(Error::invalid(format!("band {} is not a finite non-negative width", self.band)));
        }
        if !(self.threshold.abs() < 1.0) {
            return Err(Error::invalid(format!("threshold {} outside (-1, 1)", self.threshold)));
        }
        Ok(())
    }

    pub fn target(&self) -> Hypothesis {
        match self.kind {
            TaskKind::Threshold => Hypothesis::stump(0, self.threshold, 1),
            TaskKind::Interval => Hypothesis::Intervals {
                feature: 0,
                intervals: vec![Interval { lo: -1.0, hi: -0.5 }, Interval { lo: 0.0, hi: 0.5 }],
            },
        }
    }

    fn in_band(&self, v: f64) -> bool {
        let near = |b: f64| (v - b).abs() < self.band;
        match self.kind {
            TaskKind::Threshold => near(self.threshold),
            TaskKind::Interval => INTERVAL_BOUNDARIES.iter().any(|&b| near(b)),
        }
    }
}

/// Draws `n` distinct labelled points. Gives up with a generation error
/// after a fixed number of rejected draws.
fn draw_points(spec: &TaskSpec, target: &Hypothesis, n: usize, rng: &mut RngStream) -> Result<Dataset> {
    let mut seen = HashSet::with_capacity(n);
    let mut examples = Vec::with_capacity(n);
    let budget = 1000 + 100 * n as u64;
    let mut attempts = 0u64;
    while examples.len() < n {
        attempts += 1;
        if attempts > budget {
            return Err(Error::Generation(format!("could not draw {n} distinct points after {budget} attempts")));
        }
        let x: Vec<f64> = (0..spec.dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
        if spec.in_band(x[0]) || !seen.insert(feature_key(&x)) {
            continue;
        }
        let y = target.predict(&x);
        examples.push(LabeledExample::new(x, y)?);
    }
    Dataset::new(examples)
}

/// A generated task: training set, test set and the concept.
#[derive(Debug, Clone)]
pub struct Task {
    pub train: Dataset,
    pub test: Dataset,
    pub target: Hypothesis,
}

fn generate(spec: &TaskSpec) -> Result<Task> {
    spec.validate()?;
    let target = spec.target();
    let mut train_rng = RngStream::new(spec.seed, derive_stream_id(&[spec.kind as u64, 0]));
    let mut test_rng = RngStream::new(spec.seed, derive_stream_id(&[spec.kind as u64, 1]));
    let train = draw_points(spec, &target, spec.n_train, &mut train_rng)?;
    let test = draw_points(spec, &target, spec.n_test, &mut test_rng)?;
    Ok(Task { train, test, target })
}

pub fn gen_threshold_task(spec: &TaskSpec) -> Result<Task> {
    if spec.kind != TaskKind::Threshold {
        return Err(Error::invalid("spec is not a threshold task"));
    }
    generate(spec)
}

pub fn gen_interval_task(spec: &TaskSpec) -> Result<Task> {
    if spec.kind != TaskKind::Interval {
        return Err(Error::invalid("spec is not an interval task"));
    }
    generate(spec)
}

pub fn gen_task(spec: &TaskSpec) -> Result<Task> {
    generate(spec)
}

/// Error of the best single stump on `data`.
pub fn best_stump_error(data: &Dataset) -> Result<f64> {
    let (pool, positions) = pool_sample(data.examples());
    let (_, mistakes) = train_stump(SampleView::new(&pool, &positions)?)?;
    Ok(mistakes as f64 / data.len() as f64)
}

/// Size of the probe used to estimate the stump advantage of a task.
pub const PROBE_SIZE: usize = 10_000;

/// Half of the best-stump advantage on a fresh probe of the task, capped
/// to `(0, 1/2]`. Errors if stumps have no advantage.
pub fn estimate_gamma(kind: TaskKind, dim: usize, seed: u64) -> Result<f64> {
    let spec = TaskSpec { n_train: PROBE_SIZE, n_test: 1, dim, ..TaskSpec::new(kind, PROBE_SIZE, seed) };
    let probe = generate(&spec)?.train;
    let advantage = 0.5 - best_stump_error(&probe)?;
    if !(advantage > 0.0) {
        return Err(Error::invalid(format!("stumps have no advantage on the {} task", kind.name())));
    }
    Ok((advantage / 2.0).min(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_labels_follow_target() {
        let task = gen_threshold_task(&TaskSpec::new(TaskKind::Threshold, 200, 4)).unwrap();
        assert_eq!(task.train.len(), 200);
        assert_eq!(task.test.len(), 2000);
        for e in task.train.examples() {
            assert_eq!(e.y(), task.target.predict(e.x()));
            assert!(e.x()[0].abs() >= 0.005);
        }
    }

    #[test]
    fn two_points_straddle_when_labels_differ() {
        for seed in 0..20 {
            let task = gen_threshold_task(&TaskSpec::new(TaskKind::Threshold, 2, seed)).unwrap();
            let ex = task.train.examples();
            if ex[0].y() != ex[1].y() {
                assert!(ex[0].x()[0].signum() != ex[1].x()[0].signum());
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = TaskSpec::new(TaskKind::Interval, 10_000, 9);
        let a = gen_interval_task(&spec).unwrap();
        let b = gen_interval_task(&spec).unwrap();
        assert_eq!(a.train.to_csv(), b.train.to_csv());
        assert_eq!(a.test.digest(), b.test.digest());
        assert!(gen_threshold_task(&spec).is_err());
    }

    #[test]
    fn interval_task_has_quarter_stump_error() {
        let task = gen_interval_task(&TaskSpec::new(TaskKind::Interval, 4000, 1)).unwrap();
        let err = best_stump_error(&task.train).unwrap();
        assert!((err - 0.25).abs() < 0.03, "{err}");
        assert!(err > 0.0);
    }

    #[test]
    fn gamma_estimates() {
        assert!((estimate_gamma(TaskKind::Threshold, 1, 0).unwrap() - 0.25).abs() < 1e-12);
        let g = estimate_gamma(TaskKind::Interval, 1, 0).unwrap();
        assert!((g - 0.125).abs() < 0.01, "{g}");
    }

    #[test]
    fn impossible_generation_errors() {
        let spec = TaskSpec { band: 1.0, ..TaskSpec::new(TaskKind::Threshold, 5, 0) };
        assert!(matches!(gen_task(&spec), Err(Error::Generation(_))));
        let spec = TaskSpec { band: 0.5, ..TaskSpec::new(TaskKind::Interval, 5, 0) };
        assert!(matches!(gen_task(&spec), Err(Error::Generation(_))));
    }
}
