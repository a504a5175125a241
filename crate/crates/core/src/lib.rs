//! Sampled boosting: a voting-classifier booster that trains each weak
//! hypothesis on a small i.i.d. subsample of the current boosting
//! distribution, together with the randomized sample-compression scheme it
//! induces and executable checks for its analytic guarantees.
//!
//! Layout:
//!
//! * [`dataset`], [`dist`], [`rng`]: labelled data, weight distributions,
//!   reproducible sampling streams.
//! * [`weak`]: the weak-learner contract, an ERM stump learner and a planted
//!   fixed-advantage learner.
//! * [`boost`]: sampled boosting, the classic AdaBoost baseline, margins and
//!   traces.
//! * [`compress`]: encoding a run as a compression sequence, reconstruction
//!   by retraining, and generalization-bound evaluators.
//! * [`verify`]: epsilon-approximation checks, margin audits, proof
//!   identities, stability and failure-rate estimation.
//! * [`bench`]: synthetic tasks, learning curves and comparison reports.

pub mod bench;
pub mod boost;
pub mod compress;
pub mod dataset;
pub mod dist;
mod error;
pub mod hexfloat;
pub mod rng;
pub mod stats;
pub mod verify;
pub mod weak;

pub use error::{Error, Result};

/// Version tag written into every JSON document this crate emits.
pub const SCHEMA_VERSION: u32 = 1;

/// `ceil` that ignores floating-point noise just above an integer.
///
/// The sizing formulas are real-valued; products such as `32 * (1 + 1)` may
/// land one ulp above the exact integer and must not round up.
pub(crate) fn ceil_tol(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}
