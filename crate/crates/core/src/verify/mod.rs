//! Executable checks of the analytic guarantees: epsilon-approximations,
//! margin audits, the normalizer identities, stability of the compression
//! scheme, and its failure probability.

mod approx;
mod audit;
mod failure;
mod identities;
mod stability;

pub use approx::{is_eps_approximation, max_deviation, HypothesisClass, StumpGrid, APPROX_TOLERANCE};
pub use audit::{audit_stream, margin_audit, MarginAuditReport, RunAudit};
pub use failure::{failure_rate_estimate, FailureReport};
pub use identities::{
    telescoping_check, telescoping_residual, zk_check, zk_closed_form, TELESCOPING_TOLERANCE, ZK_TOLERANCE,
};
pub use stability::{
    outcome_law, stability_test, suite, ExactComparison, InstanceDescription, Outcome, StabilityInstance,
    StabilityOptions, StabilityReport, StatisticalComparison, Verdict, EXACT_TV_TOLERANCE, SUITES,
};
