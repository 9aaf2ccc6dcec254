//! False discovery rate and family-wise error rate control for multiple
//! hypothesis testing.
//!
//! * [`procedures`]: rejection rules (unadjusted, Bonferroni, Šidák, Holm,
//!   Hochberg, Benjamini–Hochberg) and adjusted p-values.
//! * [`metrics`]: confusion counts against ground truth and the FDR, FWER,
//!   PCER and power estimators.
//! * [`simulation`]: a seeded, order-independent Monte Carlo study engine.

pub mod accumulator;
pub mod error;
pub mod metrics;
pub mod normal;
pub mod procedures;
pub mod pvalues;
pub mod rng;
pub mod simulation;

pub use error::{Error, Result};
pub use metrics::{
    aggregate_rates, false_discovery_proportion, per_replicate_indicators, tabulate_confusion,
    ConfusionCounts, Indicators, RateAccumulator, RateEstimates, TruthLabels,
};
pub use procedures::{
    adjust, bh_theta, reject_bh, reject_bonferroni, reject_hochberg, reject_holm, reject_sidak,
    reject_unadjusted, AdjustedPValues, Procedure, RejectionSet, ThetaSolution,
};
pub use pvalues::{PValueVector, SignificanceLevel};
pub use simulation::{
    generate_replicate, run_replicate, run_study, run_study_with, sweep, sweep_with, RunOptions,
    SimConfig, StudyResult, SweepAxis, SweepResult,
};
