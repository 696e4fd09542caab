//! A laboratory for regularized EXP3: stochastic mirror descent with the
//! Tsallis-type mirror maps `φ_α` over the truncated simplex, a budgeted
//! loss-corruption adversary, and the inference tools (Wald intervals,
//! stability ratios, normality checks) used to study it by Monte Carlo.
//!
//! The modules mirror the pipeline:
//!
//! * [`simplex`]: mirror maps, divergences, projection, regularized minimizer,
//! * [`environment`]: loss draws and the corruption adversary,
//! * [`algorithms`]: schedules, learners, and episodes,
//! * [`inference`]: moments, intervals, stability, KS statistics,
//! * [`harness`]: configuration, seeding, Monte-Carlo sweeps, persistence.

pub mod algorithms;
pub mod environment;
pub mod error;
pub mod harness;
pub mod inference;
pub mod selftest;
pub mod simplex;

pub use error::{Error, Result};

// The guide's code listings are compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/mirror_maps.md")]
    mod mirror_maps {}
    #[doc = include_str!("../../../book/src/projection.md")]
    mod projection {}
    #[doc = include_str!("../../../book/src/regularized_objective.md")]
    mod regularized_objective {}
    #[doc = include_str!("../../../book/src/learner.md")]
    mod learner {}
    #[doc = include_str!("../../../book/src/corruption.md")]
    mod corruption {}
    #[doc = include_str!("../../../book/src/inference.md")]
    mod inference {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
