//! Repeated prepare / evolve / measure trials, delay sweeps and reporting.

mod fit;
mod report;
mod stats;
mod sweep;
mod trial;

use thiserror::Error;

pub use fit::{fit_damped_cosine, DampedCosine, FitResult, MAX_SCAN_FREQUENCY};
pub use report::{drain_table, report_regime, timing_table, RegimeSummary, TimingRow};
pub use stats::{binomial_acceptance, wilson_interval, Z_95};
pub use sweep::{metadata_path, run_sweep, write_metadata, CurvePoint, ProbabilityCurve, SweepOutput, INTERVAL_METHOD};
pub use trial::{trial_rng, TrialContext, TrialRecord};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("fit needs at least {needed} delay points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("sample, probability and weight arrays differ in length")]
    Mismatch,
    #[error("degenerate fit input: {0}")]
    Degenerate(String),
    #[error("fit did not converge: {0}")]
    NonConvergence(String),
}
