// Independent reference implementations used as oracles by the integration
// tests. Nothing here calls into the crate's solvers.
#![allow(dead_code)]

/// `∇φ_α` coded straight from the defining formulas.
pub fn grad(alpha: f64, x: f64) -> f64 {
    if alpha == 1.0 {
        x.ln()
    } else if alpha == 0.0 {
        1.0 - 1.0 / x
    } else {
        (1.0 - x.powf(alpha - 1.0)) / (1.0 - alpha)
    }
}

pub fn phi(alpha: f64, x: f64) -> f64 {
    if alpha == 1.0 {
        x * x.ln() - x + 1.0
    } else if alpha == 0.0 {
        -(x.ln() - x + 1.0)
    } else {
        -(x.powf(alpha) - alpha * x - (1.0 - alpha)) / (alpha * (1.0 - alpha))
    }
}

pub fn bregman(alpha: f64, x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| phi(alpha, a) - phi(alpha, b) - grad(alpha, b) * (a - b))
        .sum()
}

/// Euclidean projection onto `{x : x_j ≥ ε, Σ x_j = 1}` by sorting.
pub fn euclid_project(v: &[f64], eps: f64) -> Vec<f64> {
    let k = v.len();
    let mass = 1.0 - k as f64 * eps;
    let w: Vec<f64> = v.iter().map(|a| a - eps).collect();
    let mut s = w.clone();
    s.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (i, &si) in s.iter().enumerate() {
        cum += si;
        let t = (cum - mass) / (i + 1) as f64;
        if si - t > 0.0 {
            tau = t;
        }
    }
    w.iter().map(|a| eps + (a - tau).max(0.0)).collect()
}

/// Accelerated projected gradient with gradient-based restarts, for a smooth
/// convex `f` over `Δ_ε` whose curvature on `Δ_ε` is at most `l`. Stops when
/// the gradient-mapping step at the current iterate is negligible.
pub fn projected_descent(
    k: usize,
    eps: f64,
    _m: f64,
    l: f64,
    grad_f: impl Fn(&[f64]) -> Vec<f64>,
) -> Vec<f64> {
    let mut x = vec![1.0 / k as f64; k];
    if (k as f64 * eps - 1.0).abs() < 1e-15 {
        return x;
    }
    let step = |p: &[f64]| -> Vec<f64> {
        let g = grad_f(p);
        let moved: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a - b / l).collect();
        euclid_project(&moved, eps)
    };
    let mut y = x.clone();
    let mut t = 1.0f64;
    for it in 0..2_000_000 {
        let next = step(&y);
        // Restart when momentum points uphill.
        let uphill: f64 = y
            .iter()
            .zip(&next)
            .zip(&x)
            .map(|((yi, ni), xi)| (yi - ni) * (ni - xi))
            .sum();
        if uphill > 0.0 {
            t = 1.0;
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let w = (t - 1.0) / t_next;
        y = next.iter().zip(&x).map(|(a, b)| a + w * (a - b)).collect();
        // Extrapolation may leave the domain, where `f` need not be defined.
        if y.iter().any(|v| *v < eps) {
            y = next.clone();
            t = 1.0;
        } else {
            t = t_next;
        }
        x = next;
        if it % 64 == 0 && sup_dist(&step(&x), &x) < 1e-16 {
            break;
        }
    }
    x
}

/// `argmin_{x ∈ Δ_ε} D_φ(x, z)` by generic descent.
pub fn oracle_projection(alpha: f64, z: &[f64], eps: f64) -> Vec<f64> {
    let gz: Vec<f64> = z.iter().map(|&v| grad(alpha, v)).collect();
    // φ''(x) = x^{α−2}, between 1 and ε^{α−2} on [ε, 1].
    let l = eps.powf(alpha - 2.0);
    projected_descent(z.len(), eps, 1.0, l, |x| {
        x.iter().zip(&gz).map(|(&a, b)| grad(alpha, a) - b).collect()
    })
}

/// `⟨μ, x⟩ + λ(−Σ ln x + Σ x/ε)`.
pub fn objective(mu: &[f64], lambda: f64, eps: f64, x: &[f64]) -> f64 {
    mu.iter()
        .zip(x)
        .map(|(m, &v)| m * v + lambda * (-v.ln() + v / eps))
        .sum()
}

pub fn oracle_minimizer(mu: &[f64], lambda: f64, eps: f64) -> Vec<f64> {
    // Hessian λ/x², between λ and λ/ε² on [ε, 1].
    projected_descent(mu.len(), eps, lambda, lambda / (eps * eps), |x| {
        mu.iter()
            .zip(x)
            .map(|(m, &v)| m + lambda * (-1.0 / v + 1.0 / eps))
            .collect()
    })
}

pub fn itakura_saito(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a / b - (a / b).ln() - 1.0).sum()
}

pub fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()))
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn sample_sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}
