use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{MirrorMap, RegularizedObjective, TruncatedSimplex};

/// Which tuning rule fixes `(η, ε, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mode {
    /// `η = 1/√T`, `ε = ln T/√T`, `λ = γ_T/√(KT)`.
    #[default]
    Uncorrupted,
    /// `η = 1/√T`, `ε = λ = T^{−(1/2−β)}/√K`, tolerating a corruption
    /// budget of `K·T^β`.
    Corrupted { beta: f64 },
}

/// Resolved tuning for one horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub horizon: usize,
    pub arms: usize,
    pub alpha: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub lambda: f64,
    /// `γ_T`. In corrupted mode this is the implied `λ·√(KT)`.
    pub gamma: f64,
    pub mode: Mode,
}

impl Schedule {
    pub fn new(
        horizon: usize,
        arms: usize,
        alpha: f64,
        mode: Mode,
        gamma_override: Option<f64>,
    ) -> Result<Self> {
        if horizon < 4 {
            return Err(Error::config(format!("horizon T must be >= 4, got {horizon}")));
        }
        if arms < 2 {
            return Err(Error::config(format!("need K >= 2 arms, got {arms}")));
        }
        MirrorMap::new(alpha).map_err(|_| {
            Error::config(format!("alpha must lie in [0, 1], got {alpha}"))
        })?;
        let t = horizon as f64;
        let k = arms as f64;
        let eta = 1.0 / t.sqrt();
        match mode {
            Mode::Uncorrupted => {
                let epsilon = t.ln() / t.sqrt();
                if k * epsilon >= 1.0 {
                    return Err(Error::config(format!(
                        "truncated simplex is empty: K·ln(T)/√T = {:.4} >= 1 for K = {arms}, T = {horizon}; \
                         the smallest feasible horizon is T = {}",
                        k * epsilon,
                        min_uncorrupted_horizon(arms)
                    )));
                }
                let gamma = match gamma_override {
                    Some(g) if g > 0.0 && g.is_finite() => g,
                    Some(g) => {
                        return Err(Error::config(format!("gamma_T must be positive, got {g}")))
                    }
                    None => default_gamma(t, alpha),
                };
                Ok(Schedule {
                    horizon,
                    arms,
                    alpha,
                    eta,
                    epsilon,
                    lambda: gamma / (k * t).sqrt(),
                    gamma,
                    mode,
                })
            }
            Mode::Corrupted { beta } => {
                if !(beta > 0.0 && beta < 0.5) {
                    return Err(Error::config(format!("beta must lie in (0, 1/2), got {beta}")));
                }
                let epsilon = t.powf(-(0.5 - beta)) / k.sqrt();
                if k * epsilon >= 1.0 {
                    let min_t = k.powf(1.0 / (1.0 - 2.0 * beta)).floor() as usize + 1;
                    return Err(Error::config(format!(
                        "truncated simplex is empty: K·ε = {:.4} >= 1 for K = {arms}, T = {horizon}; \
                         the smallest feasible horizon is T = {}",
                        k * epsilon,
                        min_t.max(4)
                    )));
                }
                Ok(Schedule {
                    horizon,
                    arms,
                    alpha,
                    eta,
                    epsilon,
                    lambda: epsilon,
                    gamma: epsilon * (k * t).sqrt(),
                    mode,
                })
            }
        }
    }

    pub fn map(&self) -> MirrorMap {
        MirrorMap::new(self.alpha).expect("alpha validated at construction")
    }

    pub fn domain(&self) -> TruncatedSimplex {
        TruncatedSimplex::new(self.arms, self.epsilon).expect("feasibility validated at construction")
    }

    pub fn objective(&self, mu: &[f64]) -> Result<RegularizedObjective> {
        RegularizedObjective::new(mu.to_vec(), self.lambda, self.epsilon)
    }
}

/// `make_schedule` under its usual name.
pub fn make_schedule(
    horizon: usize,
    arms: usize,
    alpha: f64,
    mode: Mode,
    gamma_override: Option<f64>,
) -> Result<Schedule> {
    Schedule::new(horizon, arms, alpha, mode, gamma_override)
}

/// `ln T · ln ln T` below `α = 1/3`, `ln ln T` from there on.
pub fn default_gamma(t: f64, alpha: f64) -> f64 {
    if alpha < 1.0 / 3.0 {
        t.ln() * t.ln().ln()
    } else {
        t.ln().ln()
    }
}

/// Smallest `T` with `K·ln T/√T < 1`.
pub fn min_uncorrupted_horizon(arms: usize) -> usize {
    let k = arms as f64;
    let feasible = |t: usize| k * (t as f64).ln() / (t as f64).sqrt() < 1.0;
    // K ln T/√T rises until T = e² and falls afterwards; for K >= 2 nothing
    // below e² is feasible, so search the decreasing branch.
    let mut lo = 8usize;
    if feasible(lo) {
        return lo;
    }
    let mut hi = 16usize;
    while !feasible(hi) {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
