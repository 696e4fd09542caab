use super::{check_positive, MirrorMap, ProbVector, TruncatedSimplex};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;
const TARGET_RESIDUAL: f64 = 1e-12;

/// Bregman projection `argmin_{x ∈ Δ_ε} D_φ(x, z)`.
///
/// The KKT system reduces to a single multiplier θ for the sum constraint:
///
/// ```text
/// x_j(θ) = max(ε, (∇φ)^{-1}(∇φ(z)_j + θ)),   Σ_j x_j(θ) = 1
/// ```
///
/// `Σ_j x_j(θ)` is continuous and nondecreasing, so the multiplier is found
/// by growing a bracket from θ = 0 and bisecting it.
pub fn project(map: MirrorMap, z: &[f64], domain: &TruncatedSimplex) -> Result<ProbVector> {
    check_positive(z, "projection input")?;
    let k = domain.arms();
    if z.len() != k {
        return Err(Error::domain(format!(
            "projection input has {} coordinates, domain has {k}",
            z.len()
        )));
    }
    if domain.is_singleton() {
        return Ok(ProbVector::uniform(k));
    }

    let eps = domain.epsilon();
    let dual: Vec<f64> = z.iter().map(|&v| map.grad_coord(v)).collect();
    let point = |theta: f64, out: &mut Vec<f64>| -> f64 {
        out.clear();
        out.extend(
            dual.iter()
                .map(|&u| map.grad_inverse_coord(u + theta).max(eps)),
        );
        out.iter().sum()
    };

    let mut x = Vec::with_capacity(k);
    let h0 = point(0.0, &mut x);
    if (h0 - 1.0).abs() <= TARGET_RESIDUAL {
        return Ok(ProbVector(x));
    }

    // Largest admissible multiplier: the inverse gradient blows up as any
    // dual coordinate reaches the top of the gradient range.
    let cap = map.grad_upper_bound() - dual.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = if h0 < 1.0 {
        let mut lo = 0.0;
        let mut hi = if cap.is_finite() { cap / 2.0 } else { 1.0 };
        let mut steps = 0;
        while point(hi, &mut x) < 1.0 {
            lo = hi;
            hi = if cap.is_finite() { hi + (cap - hi) / 2.0 } else { 2.0 * hi };
            steps += 1;
            if steps > MAX_ITERATIONS || hi == lo {
                return Err(Error::Numeric {
                    what: "truncated-simplex projection (bracketing)",
                    lo,
                    hi,
                    residual: point(hi, &mut x) - 1.0,
                });
            }
        }
        (lo, hi)
    } else {
        // As θ → −∞ every coordinate clips to ε and the sum drops to K·ε < 1.
        let mut hi = 0.0;
        let mut lo = -1.0;
        let mut steps = 0;
        while point(lo, &mut x) > 1.0 {
            hi = lo;
            lo *= 2.0;
            steps += 1;
            if steps > MAX_ITERATIONS {
                return Err(Error::Numeric {
                    what: "truncated-simplex projection (bracketing)",
                    lo,
                    hi,
                    residual: point(lo, &mut x) - 1.0,
                });
            }
        }
        (lo, hi)
    };

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
        if residual <= TARGET_RESIDUAL {
            break;
        }
        if h < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    for theta in [lo, hi] {
        let residual = (point(theta, &mut x) - 1.0).abs();
        if residual < best.0 {
            best = (residual, theta);
        }
    }
    let h = point(best.1, &mut x);
    if (h - 1.0).abs() > super::SUM_TOLERANCE {
        return Err(Error::Numeric {
            what: "truncated-simplex projection",
            lo,
            hi,
            residual: h - 1.0,
        });
    }
    Ok(ProbVector(x))
}
