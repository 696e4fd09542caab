//! Learners and their tuning.
//!
//! [`RegExp3`] is stochastic mirror descent over the truncated simplex on
//! the log-barrier regularized loss. [`Exp3`] and [`Ucb`] are the plain
//! exponential-weights and optimism baselines it is compared against.

mod episode;
mod learners;
mod schedule;

pub use episode::{
    episode_rngs, make_learner, pseudo_regret, run_episode, run_with_learner, running_regret,
    RoundRecord, Trajectory,
};
pub use learners::{
    importance_weighted_loss, reg_exp3_step, sample_index, ucb_step, Algorithm, Exp3, Learner,
    LearnerState, RegExp3, Ucb, UcbState,
};
pub use schedule::{default_gamma, make_schedule, min_uncorrupted_horizon, Mode, Schedule};
