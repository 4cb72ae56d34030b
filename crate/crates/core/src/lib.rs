//! Simulation, closed-form predictions, exact oracle and statistical checks
//! for the "most-loaded of d random choices" allocation process (UNFAIR).
//!
//! Balls are placed one at a time into `n` bins; each ball samples `d` bins
//! uniformly with replacement and joins the heaviest of them. The resulting
//! sorted load profile follows a rank power law: the `i`-th smallest bin holds
//! about `((i/n)^d - ((i-1)/n)^d)·m` balls.
//!
//! - [`process`]: the seeded simulator and baseline policies.
//! - [`theory`]: per-rank predictions and tail/overtaking bounds.
//! - [`analysis`]: ranking, gaps, stabilization, aggregation.
//! - [`oracle`]: exact rational law of the sorted profile for small instances.
//! - [`spec`], [`report`], [`commands`], [`verify`]: config files, CSV output
//!   and the verification suite used by the `unfair` CLI.

pub mod analysis;
pub mod commands;
mod error;
pub mod oracle;
pub mod process;
pub mod report;
pub mod rng;
pub mod spec;
pub mod theory;
pub mod trials;
pub mod verify;

pub use analysis::{
    aggregate_trials, deviation_report, pair_gap_series, rank_stabilization_time, sort_profile,
    swap_probability_estimate, DeviationReport, PairGapSeries, SortedProfile, Stabilization, SwapEstimate,
    TrialAggregate, TrialRecord,
};
pub use error::{Error, Result};
pub use oracle::{exact_distribution, exact_sorted_means, ExactDistribution};
pub use process::{run, LoadVector, Policy, Process, ProcessConfig, RunOutput, Trace};
pub use spec::ExperimentSpec;
pub use theory::{PhaseConstants, PredictionCurve};
