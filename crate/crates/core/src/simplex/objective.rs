use super::{check_positive, mirror::regularizer, ProbVector, TruncatedSimplex};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 400;

/// `f_{λ,ε}(x) = ⟨μ, x⟩ + λ R_ε(x)` with the log-barrier regularizer
/// `R_ε(x) = −Σ ln x_j + (1/ε) Σ x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedObjective {
    pub mu: Vec<f64>,
    pub lambda: f64,
    pub epsilon: f64,
}

impl RegularizedObjective {
    pub fn new(mu: Vec<f64>, lambda: f64, epsilon: f64) -> Result<Self> {
        if mu.len() < 2 || mu.iter().any(|m| !(0.0..=1.0).contains(m)) {
            return Err(Error::config(format!(
                "mean losses must be at least 2 values in [0, 1], got {mu:?}"
            )));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::config(format!("lambda must be >= 0, got {lambda}")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::config(format!("epsilon must be > 0, got {epsilon}")));
        }
        Ok(RegularizedObjective {
            mu,
            lambda,
            epsilon,
        })
    }

    pub fn mu_star(&self) -> f64 {
        self.mu.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Indices of the arms attaining `μ*`.
    pub fn optimal_set(&self) -> Vec<usize> {
        let best = self.mu_star();
        (0..self.mu.len()).filter(|&j| self.mu[j] == best).collect()
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_positive(x, "objective argument")?;
        let linear: f64 = self.mu.iter().zip(x).map(|(m, v)| m * v).sum();
        Ok(linear + self.lambda * regularizer(x, self.epsilon)?)
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_positive(x, "objective argument")?;
        Ok(self
            .mu
            .iter()
            .zip(x)
            .map(|(m, &v)| m + self.lambda * (-1.0 / v + 1.0 / self.epsilon))
            .collect())
    }
}

/// Unique minimizer `x_{λ,ε}` of `f_{λ,ε}` over `Δ_ε` (requires `λ > 0`).
///
/// Stationarity gives `x_j = max(ε, λ / (μ_j + λ/ε + θ))` for a scalar θ.
/// The solve is carried out in the offset `s = θ + min_j μ_j + λ/ε > 0`, so
/// that every denominator is `(μ_j − min μ) + s` and stays accurate even
/// when `λ` is tiny.
pub fn oracle_minimizer(obj: &RegularizedObjective, domain: &TruncatedSimplex) -> Result<ProbVector> {
    let k = domain.arms();
    if obj.mu.len() != k {
        return Err(Error::config(format!(
            "objective has {} arms, domain has {k}",
            obj.mu.len()
        )));
    }
    if !(obj.lambda > 0.0) {
        return Err(Error::config("oracle minimizer needs lambda > 0"));
    }
    if domain.is_singleton() {
        return Ok(ProbVector::uniform(k));
    }
    let eps = domain.epsilon();
    let lambda = obj.lambda;
    let mu_min = obj.mu_star();
    let gaps: Vec<f64> = obj.mu.iter().map(|m| m - mu_min).collect();
    let point = |s: f64, out: &mut Vec<f64>| -> f64 {
        out.clear();
        out.extend(gaps.iter().map(|g| (lambda / (g + s)).max(eps)));
        out.iter().sum()
    };

    let mut x = Vec::with_capacity(k);
    // At s = λ/ε every coordinate sits at ε, so the sum is K·ε ≤ 1.
    let mut hi = lambda / eps;
    let mut lo = hi / 2.0;
    let mut steps = 0;
    while point(lo, &mut x) < 1.0 {
        hi = lo;
        lo /= 2.0;
        steps += 1;
        if steps > MAX_ITERATIONS || lo == 0.0 {
            return Err(Error::Numeric {
                what: "regularized minimizer (bracketing)",
                lo,
                hi,
                residual: point(lo, &mut x) - 1.0,
            });
        }
    }

    let mut best = (f64::INFINITY, lo);
    for _ in 0..MAX_ITERATIONS {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        let h = point(mid, &mut x);
        let residual = (h - 1.0).abs();
        if residual < best.0 {
            best = (residual, mid);
        }
        if residual <= 1e-13 {
            break;
        }
        if h > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h = point(best.1, &mut x);
    if (h - 1.0).abs() > super::SUM_TOLERANCE {
        return Err(Error::Numeric {
            what: "regularized minimizer",
            lo,
            hi,
            residual: h - 1.0,
        });
    }
    Ok(ProbVector(x))
}

/// The `λ ↓ 0` limit `x_ε`: `ε` on suboptimal arms, the remaining mass split
/// evenly over the optimal set.
pub fn limit_minimizer(mu: &[f64], domain: &TruncatedSimplex) -> Result<ProbVector> {
    if mu.len() != domain.arms() {
        return Err(Error::config("mean vector does not match the domain"));
    }
    let best = mu.iter().copied().fold(f64::INFINITY, f64::min);
    let optimal = mu.iter().filter(|&&m| m == best).count();
    let eps = domain.epsilon();
    let share = (1.0 - (mu.len() - optimal) as f64 * eps) / optimal as f64;
    Ok(ProbVector(
        mu.iter()
            .map(|&m| if m == best { share } else { eps })
            .collect(),
    ))
}
