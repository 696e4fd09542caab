//! Geometry of the probability simplex.
//!
//! This module holds the mirror-map family used by the learner, the
//! divergences built from it, the dual (gradient) step, the Bregman
//! projection onto the truncated simplex
//!
//! ```text
//! Δ_ε = { x ∈ R^K : x_j ≥ ε, Σ_j x_j = 1 }
//! ```
//!
//! and the minimizer of the log-barrier regularized linear loss that the
//! averaged iterates converge to.

mod mirror;
mod objective;
mod projection;

pub use mirror::{
    bregman_div, dual_step, is_divergence, log_barrier_divergence, mirror_grad,
    mirror_grad_inverse, mirror_value, regularizer, regularizer_grad, MirrorMap,
};
pub use objective::{limit_minimizer, oracle_minimizer, RegularizedObjective};
pub use projection::project;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σ x_j = 1` for a point to count as a distribution.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A point of the probability simplex with at least two coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::domain(format!(
                "a distribution needs at least 2 arms, got {}",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::domain(format!(
                "probabilities must be finite and nonnegative, got {bad}"
            )));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::domain(format!(
                "probabilities must sum to 1, got {sum}"
            )));
        }
        Ok(ProbVector(entries))
    }

    pub fn uniform(k: usize) -> Self {
        assert!(k >= 2, "a distribution needs at least 2 arms");
        ProbVector(vec![1.0 / k as f64; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl std::ops::Deref for ProbVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        ProbVector::new(v)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(p: ProbVector) -> Vec<f64> {
        p.0
    }
}

/// The truncated simplex `Δ_ε`: distributions over `k` arms whose every
/// coordinate is at least `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSimplex {
    k: usize,
    epsilon: f64,
}

impl TruncatedSimplex {
    /// Fails when `Δ_ε` is empty (`k·ε > 1`) or `ε ≤ 0`.
    pub fn new(k: usize, epsilon: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::config(format!("need at least 2 arms, got {k}")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::config(format!(
                "truncation level must be positive, got {epsilon}"
            )));
        }
        // Allow a few ulps of slack so that ε = 1/K is accepted.
        if k as f64 * epsilon > 1.0 + 4.0 * f64::EPSILON {
            return Err(Error::config(format!(
                "truncated simplex is empty: K·ε = {} > 1",
                k as f64 * epsilon
            )));
        }
        Ok(TruncatedSimplex { k, epsilon })
    }

    pub fn arms(&self) -> usize {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `K·ε = 1`: the only feasible point is uniform.
    pub fn is_singleton(&self) -> bool {
        (self.k as f64 * self.epsilon - 1.0).abs() <= 4.0 * f64::EPSILON
    }

    /// Membership with the crate-wide tolerances.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.k
            && x.iter().all(|&v| v >= self.epsilon - 1e-12)
            && (x.iter().sum::<f64>() - 1.0).abs() <= SUM_TOLERANCE
    }
}

pub(crate) fn check_positive(x: &[f64], what: &str) -> Result<()> {
    match x.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
        Some(j) => Err(Error::domain(format!(
            "{what}: coordinate {j} must be positive and finite, got {}",
            x[j]
        ))),
        None => Ok(()),
    }
}

pub(crate) fn check_same_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}
