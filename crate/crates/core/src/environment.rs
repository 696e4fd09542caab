//! Stochastic losses and the budgeted corruption adversary.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-arm loss distribution, always supported on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ArmKind {
    #[default]
    Bernoulli,
    /// Uniform on `[μ − w, μ + w]` with `w = min(μ, 1 − μ)`, so the support
    /// stays inside `[0, 1]` and the mean is exactly `μ`.
    ClippedUniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanditModel {
    kinds: Vec<ArmKind>,
    mu: Vec<f64>,
}

impl BanditModel {
    pub fn new(mu: Vec<f64>, kind: ArmKind) -> Result<Self> {
        let kinds = vec![kind; mu.len()];
        Self::with_kinds(mu, kinds)
    }

    pub fn with_kinds(mu: Vec<f64>, kinds: Vec<ArmKind>) -> Result<Self> {
        if mu.len() < 2 {
            return Err(Error::config(format!("need at least 2 arms, got {}", mu.len())));
        }
        if kinds.len() != mu.len() {
            return Err(Error::config("one arm kind per arm required"));
        }
        if let Some(m) = mu.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(Error::config(format!("mean losses must lie in [0, 1], got {m}")));
        }
        Ok(BanditModel { kinds, mu })
    }

    pub fn arms(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn mu_star(&self) -> f64 {
        self.mu.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Lowest-index arm attaining `μ*`.
    pub fn best_arm(&self) -> usize {
        argmin(&self.mu)
    }

    /// One independent draw per arm; consumes exactly one uniform per arm.
    pub fn sample_round<R: Rng + ?Sized>(&self, rng: &mut R) -> RoundLosses {
        let losses = self
            .mu
            .iter()
            .zip(&self.kinds)
            .map(|(&m, kind)| {
                let u: f64 = rng.gen();
                match kind {
                    ArmKind::Bernoulli => {
                        if u < m {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    ArmKind::ClippedUniform => {
                        let w = m.min(1.0 - m);
                        (m - w + 2.0 * w * u).clamp(0.0, 1.0)
                    }
                }
            })
            .collect();
        RoundLosses::clean(losses)
    }
}

/// Loss vectors of one round before and after the adversary.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundLosses {
    pub true_vector: Vec<f64>,
    pub corrupted_vector: Vec<f64>,
    /// `‖corrupted − true‖_∞`.
    pub sup_gap: f64,
}

impl RoundLosses {
    pub fn clean(losses: Vec<f64>) -> Self {
        RoundLosses {
            corrupted_vector: losses.clone(),
            true_vector: losses,
            sup_gap: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CorruptionStrategy {
    #[default]
    None,
    /// Push the loss of the truly best arm to 1.
    FlipBest,
    /// Push the loss of the arm with the smallest empirical mean to 1,
    /// steering an optimistic learner away from it.
    TargetedUcb,
}

/// What the adversary sees before distorting round `round`.
#[derive(Debug, Clone, Copy)]
pub struct AdversaryView<'a> {
    pub round: usize,
    pub pulls: &'a [usize],
    pub empirical_means: &'a [f64],
    pub true_means: &'a [f64],
}

/// Adversary strategy with pathwise budget accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionPolicy {
    strategy: CorruptionStrategy,
    budget_cap: f64,
    spent: f64,
}

impl CorruptionPolicy {
    pub fn none() -> Self {
        CorruptionPolicy {
            strategy: CorruptionStrategy::None,
            budget_cap: 0.0,
            spent: 0.0,
        }
    }

    pub fn new(strategy: CorruptionStrategy, budget_cap: f64) -> Result<Self> {
        if !(budget_cap >= 0.0 && budget_cap.is_finite()) {
            return Err(Error::config(format!(
                "corruption budget must be finite and >= 0, got {budget_cap}"
            )));
        }
        Ok(CorruptionPolicy {
            strategy,
            budget_cap,
            spent: 0.0,
        })
    }

    /// Budget `K · T^β` for `β ∈ (0, 1/2)`.
    pub fn with_exponent(
        strategy: CorruptionStrategy,
        arms: usize,
        horizon: usize,
        beta: f64,
    ) -> Result<Self> {
        if !(beta > 0.0 && beta < 0.5) {
            return Err(Error::config(format!("beta must lie in (0, 1/2), got {beta}")));
        }
        Self::new(strategy, budget_cap(arms, horizon, beta))
    }

    pub fn strategy(&self) -> CorruptionStrategy {
        self.strategy
    }

    pub fn budget_cap(&self) -> f64 {
        self.budget_cap
    }

    pub fn remaining(&self) -> f64 {
        (self.budget_cap - self.spent).max(0.0)
    }

    /// Realized `Σ_t ‖ℓ_t^c − ℓ_t‖_∞` so far.
    pub fn realized_corruption(&self) -> f64 {
        self.spent
    }

    /// Apply the strategy to `losses`, scaling the distortion down when the
    /// remaining budget is smaller than requested.
    pub fn corrupt(&mut self, mut losses: RoundLosses, view: &AdversaryView<'_>) -> RoundLosses {
        losses.corrupted_vector.clone_from(&losses.true_vector);
        losses.sup_gap = 0.0;
        let target = match self.strategy {
            CorruptionStrategy::None => None,
            CorruptionStrategy::FlipBest => Some(argmin(view.true_means)),
            CorruptionStrategy::TargetedUcb => view
                .pulls
                .iter()
                .zip(view.empirical_means)
                .enumerate()
                .filter(|(_, (&n, _))| n > 0)
                .min_by(|a, b| a.1 .1.total_cmp(b.1 .1))
                .map(|(j, _)| j),
        };
        let Some(target) = target else {
            return losses;
        };
        let requested = 1.0 - losses.true_vector[target];
        let applied = requested.min(self.remaining()).max(0.0);
        if applied > 0.0 {
            losses.corrupted_vector[target] = (losses.true_vector[target] + applied).min(1.0);
            losses.sup_gap = applied;
            self.spent = (self.spent + applied).min(self.budget_cap);
        }
        losses
    }
}

pub fn budget_cap(arms: usize, horizon: usize, beta: f64) -> f64 {
    arms as f64 * (horizon as f64).powf(beta)
}

/// Lowest index of the minimum.
pub(crate) fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (j, x) in v.iter().enumerate() {
        if *x < v[best] {
            best = j;
        }
    }
    best
}
