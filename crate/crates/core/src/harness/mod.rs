//! Configuration, seeding, Monte-Carlo sweeps and their files.
//!
//! A sweep writes to `out_dir`:
//!
//! * `aggregate.json`: the [`Aggregate`] of all successful reps,
//! * `reps.csv`: one row per rep and arm (and per direction vector),
//! * `trajectory.csv`: every round of every rep, only with
//!   [`OutputFormat::Csv`].
//!
//! Floats in the CSV files carry 17 significant digits.

mod aggregate;
mod config;
mod output;
mod seed;
mod summary;

pub use aggregate::{
    aggregate, Aggregate, ArmAggregate, CorruptionAggregate, CoverageByLevel, FailedReps, KsArm,
    Moments, RepOutcome, StabilityAggregate,
};
pub use config::{ExperimentConfig, ModeKind};
pub use output::{
    fmt_f64, reps_header, reps_rows, run_monte_carlo, trajectory_rows, McOptions, McOutput,
    OutputFormat, TRAJECTORY_HEADER,
};
pub use seed::derive_rep_seed;
pub use summary::{run_rep, summarize, ArmSummary, DirectionSummary, IntervalSummary, RunSummary};
