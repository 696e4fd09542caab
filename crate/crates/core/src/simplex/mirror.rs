use serde::{Deserialize, Serialize};

use super::{check_positive, check_same_len};
use crate::error::{Error, Result};

/// Below this distance from 0 or 1 the limiting branch is used.
const BRANCH_TOLERANCE: f64 = 1e-12;

/// One member of the Tsallis-type family `φ_α`, `α ∈ [0, 1]`.
///
/// Every member is a separable sum `Σ_i h_α(x_i)` with `h_α(1) = 0` and
/// `h_α'(1) = 0`:
///
/// * `α = 1`: `h(x) = x ln x − x + 1` (negative entropy, the EXP3 geometry),
/// * `α = 0`: `h(x) = −(ln x − x + 1)` (log-barrier),
/// * otherwise `h(x) = −(x^α − αx − (1−α)) / (α(1−α))`.
///
/// The coordinate gradient `h_α'(x) = (1 − x^{α−1})/(1−α)` is strictly
/// increasing on `(0, ∞)` with range `(−∞, 1/(1−α))` (all of `R` for α = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MirrorMap {
    alpha: f64,
}

#[derive(Debug, Clone, Copy)]
enum Branch {
    LogBarrier,
    Tsallis(f64),
    Entropy,
}

impl MirrorMap {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::domain(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        Ok(MirrorMap { alpha })
    }

    pub fn entropy() -> Self {
        MirrorMap { alpha: 1.0 }
    }

    pub fn log_barrier() -> Self {
        MirrorMap { alpha: 0.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn branch(&self) -> Branch {
        if self.alpha.abs() < BRANCH_TOLERANCE {
            Branch::LogBarrier
        } else if (1.0 - self.alpha).abs() < BRANCH_TOLERANCE {
            Branch::Entropy
        } else {
            Branch::Tsallis(self.alpha)
        }
    }

    /// Supremum of the range of the coordinate gradient.
    pub fn grad_upper_bound(&self) -> f64 {
        match self.branch() {
            Branch::Entropy => f64::INFINITY,
            Branch::LogBarrier => 1.0,
            Branch::Tsallis(a) => 1.0 / (1.0 - a),
        }
    }

    pub(crate) fn value_coord(&self, x: f64) -> f64 {
        match self.branch() {
            Branch::Entropy => x * x.ln() - x + 1.0,
            Branch::LogBarrier => -(x.ln() - x + 1.0),
            // The two codings avoid the cancellation in 1/(α(1−α)) near
            // either end of the interval.
            Branch::Tsallis(a) if a <= 0.5 => {
                -((a * x.ln()).exp_m1() / a - (x - 1.0)) / (1.0 - a)
            }
            Branch::Tsallis(a) => {
                -(x * ((a - 1.0) * x.ln()).exp_m1() / (1.0 - a) + (x - 1.0)) / a
            }
        }
    }

    pub(crate) fn grad_coord(&self, x: f64) -> f64 {
        match self.branch() {
            Branch::Entropy => x.ln(),
            Branch::LogBarrier => 1.0 - 1.0 / x,
            Branch::Tsallis(a) => -((a - 1.0) * x.ln()).exp_m1() / (1.0 - a),
        }
    }

    /// Inverse of [`grad_coord`](Self::grad_coord); `NaN` outside the range.
    pub(crate) fn grad_inverse_coord(&self, u: f64) -> f64 {
        match self.branch() {
            Branch::Entropy => u.exp(),
            Branch::LogBarrier if u < 1.0 => 1.0 / (1.0 - u),
            Branch::Tsallis(a) if u < 1.0 / (1.0 - a) => {
                ((-(1.0 - a) * u).ln_1p() / (a - 1.0)).exp()
            }
            _ => f64::NAN,
        }
    }

    fn divergence_coord(&self, x: f64, y: f64) -> f64 {
        let d = match self.branch() {
            Branch::Entropy => x * (x / y).ln() - x + y,
            Branch::LogBarrier => x / y - (x / y).ln() - 1.0,
            Branch::Tsallis(_) => {
                self.value_coord(x) - self.value_coord(y) - self.grad_coord(y) * (x - y)
            }
        };
        d.max(0.0)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_positive(x, "mirror map argument")?;
        Ok(x.iter().map(|&v| self.value_coord(v)).sum())
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_positive(x, "mirror map argument")?;
        Ok(x.iter().map(|&v| self.grad_coord(v)).collect())
    }

    pub fn grad_inverse(&self, u: &[f64]) -> Result<Vec<f64>> {
        let upper = self.grad_upper_bound();
        u.iter()
            .enumerate()
            .map(|(j, &v)| {
                if v.is_nan() || v >= upper {
                    Err(Error::domain(format!(
                        "dual coordinate {j} = {v} outside the gradient range (-inf, {upper})"
                    )))
                } else {
                    Ok(self.grad_inverse_coord(v))
                }
            })
            .collect()
    }

    /// `D_φ(x, y) = φ(x) − φ(y) − ⟨∇φ(y), x − y⟩`.
    pub fn divergence(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_same_len(x, y)?;
        check_positive(x, "divergence first argument")?;
        check_positive(y, "divergence second argument")?;
        Ok(x.iter().zip(y).map(|(&a, &b)| self.divergence_coord(a, b)).sum())
    }
}

impl TryFrom<f64> for MirrorMap {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        MirrorMap::new(alpha)
    }
}

impl From<MirrorMap> for f64 {
    fn from(m: MirrorMap) -> f64 {
        m.alpha
    }
}

pub fn mirror_value(map: MirrorMap, x: &[f64]) -> Result<f64> {
    map.value(x)
}

pub fn mirror_grad(map: MirrorMap, x: &[f64]) -> Result<Vec<f64>> {
    map.grad(x)
}

pub fn mirror_grad_inverse(map: MirrorMap, u: &[f64]) -> Result<Vec<f64>> {
    map.grad_inverse(u)
}

pub fn bregman_div(map: MirrorMap, x: &[f64], y: &[f64]) -> Result<f64> {
    map.divergence(x, y)
}

/// Itakura–Saito distance `Σ_j [x_j/y_j − ln(x_j/y_j) − 1]`.
pub fn is_divergence(x: &[f64], y: &[f64]) -> Result<f64> {
    check_same_len(x, y)?;
    check_positive(x, "IS first argument")?;
    check_positive(y, "IS second argument")?;
    Ok(x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let r = a / b;
            r - r.ln() - 1.0
        })
        .sum())
}

/// Bregman divergence of the pure log-barrier `ψ(x) = −Σ ln x_j`, evaluated
/// from its definition.
pub fn log_barrier_divergence(x: &[f64], y: &[f64]) -> Result<f64> {
    check_same_len(x, y)?;
    check_positive(x, "log-barrier first argument")?;
    check_positive(y, "log-barrier second argument")?;
    let psi = |v: &[f64]| -v.iter().map(|a| a.ln()).sum::<f64>();
    let inner: f64 = x.iter().zip(y).map(|(&a, &b)| (-1.0 / b) * (a - b)).sum();
    Ok(psi(x) - psi(y) - inner)
}

/// `R_ε(x) = −Σ ln x_j + (1/ε) Σ x_j`.
pub fn regularizer(x: &[f64], epsilon: f64) -> Result<f64> {
    check_positive(x, "regularizer argument")?;
    check_epsilon(epsilon)?;
    Ok(x.iter().map(|&v| -v.ln() + v / epsilon).sum())
}

/// `∇R_ε(x)_j = −1/x_j + 1/ε`, nonnegative on `Δ_ε`.
pub fn regularizer_grad(x: &[f64], epsilon: f64) -> Result<Vec<f64>> {
    check_positive(x, "regularizer argument")?;
    check_epsilon(epsilon)?;
    Ok(x.iter().map(|&v| -1.0 / v + 1.0 / epsilon).collect())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("epsilon must be positive, got {epsilon}")))
    }
}

/// Unconstrained mirror step: the `z` with `∇φ(z) = ∇φ(x) − η·loss`.
///
/// For nonnegative losses the result is dominated by `x` coordinatewise.
pub fn dual_step(map: MirrorMap, x: &[f64], loss_tilde: &[f64], eta: f64) -> Result<Vec<f64>> {
    check_same_len(x, loss_tilde)?;
    check_positive(x, "dual step iterate")?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::domain(format!("step size must be positive, got {eta}")));
    }
    let dual: Vec<f64> = x
        .iter()
        .zip(loss_tilde)
        .map(|(&xj, &lj)| map.grad_coord(xj) - eta * lj)
        .collect();
    map.grad_inverse(&dual)
}
