//! Synthetic tasks and experiment sweeps.
//!
//! Both tasks are one-dimensional and realizable. On the threshold task a
//! single stump is already perfect; on the interval task the best stump errs
//! on about a quarter of the points, so reaching zero training error takes
//! genuine boosting. Sweeps record a [`CurvePoint`] per algorithm, size and
//! trial; [`compare_report`] aggregates them.

mod curve;
mod report;
mod tasks;

pub use curve::{learning_curve, Algorithm, Curve, CurveOptions, CurvePoint, DEFAULT_K_CAP};
pub use report::{compare_report, points_to_csv, CompareReport, Series, COMPARE_REPORT_SCHEMA};
pub use tasks::{
    best_stump_error, estimate_gamma, gen_interval_task, gen_task, gen_threshold_task, Task, TaskKind, TaskSpec, PROBE_SIZE,
};
