//! Inference on adaptively collected arm data.
//!
//! Wald intervals for linear functionals `u·μ` use the per-arm sample means
//! and population variances of the observed losses:
//!
//! ```text
//! u·μ̂ ± z_{1−α₀/2} · sqrt(Σ_a u_a² σ̂²_a / n_a)
//! ```
//!
//! They are valid asymptotically when the learner is stable, i.e. when the
//! pull counts `n_{a,T}` track a deterministic sequence `n*_{a,T}`.

mod ks;
mod normal;

pub use ks::{kolmogorov_survival, ks_statistic, KsResult};
pub use normal::{normal_cdf, normal_pdf, normal_quantile};

use serde::{Deserialize, Serialize};

use crate::algorithms::{Schedule, Trajectory};
use crate::error::{Error, Result};
use crate::simplex::{is_divergence, oracle_minimizer};

/// Single-pass moments of one arm's observed losses.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ArmStats {
    pub n: usize,
    pub mean: f64,
    /// Sum of squared deviations from the mean.
    pub m2: f64,
}

impl ArmStats {
    pub fn from_losses(losses: &[f64]) -> Self {
        let mut s = ArmStats::default();
        for &l in losses {
            s.push(l);
        }
        s
    }

    /// Welford update.
    pub fn push(&mut self, loss: f64) {
        self.n += 1;
        let delta = loss - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (loss - self.mean);
    }

    /// Population variance `m2 / n`; `None` before the first observation.
    pub fn variance(&self) -> Option<f64> {
        (self.n > 0).then(|| (self.m2 / self.n as f64).max(0.0))
    }
}

pub fn update_moments(stats: ArmStats, loss: f64) -> ArmStats {
    let mut s = stats;
    s.push(loss);
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    pub direction: Vec<f64>,
    /// Every contributing variance was zero, so the interval is a point.
    pub degenerate: bool,
}

impl ConfidenceInterval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

/// Wald interval for `u·μ` at confidence `level`.
pub fn wald_ci(u: &[f64], stats: &[ArmStats], level: f64) -> Result<ConfidenceInterval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!("confidence level must lie in (0, 1), got {level}")));
    }
    if u.len() != stats.len() {
        return Err(Error::domain(format!(
            "direction has {} coordinates for {} arms",
            u.len(),
            stats.len()
        )));
    }
    let mut center = 0.0;
    let mut var = 0.0;
    for (a, (&ua, s)) in u.iter().zip(stats).enumerate() {
        if ua == 0.0 {
            continue;
        }
        if s.n == 0 {
            return Err(Error::UndefinedInterval(format!(
                "arm {a} has weight {ua} but was never pulled"
            )));
        }
        center += ua * s.mean;
        var += ua * ua * s.variance().unwrap_or(0.0) / s.n as f64;
    }
    let half = normal_quantile(1.0 - (1.0 - level) / 2.0) * var.sqrt();
    Ok(ConfidenceInterval {
        lo: center - half,
        hi: center + half,
        level,
        direction: u.to_vec(),
        degenerate: var == 0.0,
    })
}

/// `√n (μ̂ − μ_a) / σ̂`; `None` when `n < 2` or `σ̂ = 0`.
pub fn standardized_error(stats: &ArmStats, mu_a: f64) -> Option<f64> {
    if stats.n < 2 {
        return None;
    }
    let sd = stats.variance()?.sqrt();
    (sd > 0.0).then(|| (stats.n as f64).sqrt() * (stats.mean - mu_a) / sd)
}

/// Fraction of intervals containing `truth`; `NaN` for an empty list.
///
/// A degenerate interval covers only when it sits exactly on `truth`.
pub fn coverage(intervals: &[ConfidenceInterval], truth: f64) -> f64 {
    if intervals.is_empty() {
        return f64::NAN;
    }
    let hits = intervals.iter().filter(|ci| ci.contains(truth)).count();
    hits as f64 / intervals.len() as f64
}

/// Pull-count and iterate-average diagnostics for one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// `n_{a,T} / (T x̄_{T,a})`.
    pub ratio_pulls: Vec<f64>,
    /// `x̄_{T,a} / x_{λ,ε,a}`.
    pub ratio_oracle: Vec<f64>,
    /// `IS(x̄_T, x_{λ,ε})`.
    pub is_to_oracle: f64,
    /// `n*_{a,T} = T x_{λ,ε,a}`.
    pub n_star: Vec<f64>,
    /// `x_{λ,ε}` at the schedule's `(λ, ε)`.
    pub oracle: Vec<f64>,
}

impl StabilityReport {
    /// `n_{a,T} / n*_{a,T}`.
    pub fn ratio_to_n_star(&self, pulls: &[usize]) -> Vec<f64> {
        pulls
            .iter()
            .zip(&self.n_star)
            .map(|(&n, s)| n as f64 / s)
            .collect()
    }
}

pub fn stability_report(traj: &Trajectory, schedule: &Schedule, mu: &[f64]) -> Result<StabilityReport> {
    let t = traj.horizon() as f64;
    let oracle = oracle_minimizer(&schedule.objective(mu)?, &schedule.domain())?;
    let ratio_pulls = traj
        .pulls
        .iter()
        .zip(&traj.xbar)
        .map(|(&n, &xb)| n as f64 / (t * xb))
        .collect();
    let ratio_oracle = traj.xbar.iter().zip(oracle.iter()).map(|(a, b)| a / b).collect();
    Ok(StabilityReport {
        ratio_pulls,
        ratio_oracle,
        is_to_oracle: is_divergence(&traj.xbar, &oracle)?,
        n_star: oracle.iter().map(|v| t * v).collect(),
        oracle: oracle.into_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{make_schedule, run_episode, Algorithm, Mode};
    use crate::environment::{ArmKind, BanditModel, CorruptionPolicy};
    use proptest::prelude::*;

    fn stats(n: usize, mean: f64, var: f64) -> ArmStats {
        ArmStats { n, mean, m2: var * n as f64 }
    }

    #[test]
    fn moment_examples() {
        let s = ArmStats::from_losses(&[0.5]);
        assert_eq!((s.n, s.mean, s.variance()), (1, 0.5, Some(0.0)));
        let s = update_moments(update_moments(ArmStats::default(), 0.0), 1.0);
        assert_eq!(s.mean, 0.5);
        assert!((s.variance().unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(ArmStats::default().variance(), None);
    }

    #[test]
    fn wald_single_arm() {
        let arms = [stats(10, 0.1, 0.09), stats(2100, 0.7, 0.21), stats(10, 0.3, 0.2)];
        let ci = wald_ci(&[0.0, 1.0, 0.0], &arms, 0.95).unwrap();
        assert!((ci.half_width() - 1.959_963_984_540_054 * 0.01).abs() < 1e-12);
        assert!((ci.lo - 0.6804).abs() < 1e-4 && (ci.hi - 0.7196).abs() < 1e-4);
        assert!(!ci.degenerate);
    }

    #[test]
    fn wald_null_direction() {
        let arms = [stats(0, 0.0, 0.0), stats(5, 0.4, 0.1)];
        let ci = wald_ci(&[0.0, 0.0], &arms, 0.9).unwrap();
        assert_eq!((ci.lo, ci.hi, ci.degenerate), (0.0, 0.0, true));
    }

    #[test]
    fn wald_contrast_adds_in_quadrature() {
        let arms = [stats(400, 0.9, 0.09), stats(900, 0.3, 0.21), stats(0, 0.0, 0.0)];
        let both = wald_ci(&[1.0, -1.0, 0.0], &arms, 0.9).unwrap();
        let a = wald_ci(&[1.0, 0.0, 0.0], &arms, 0.9).unwrap();
        let b = wald_ci(&[0.0, 1.0, 0.0], &arms, 0.9).unwrap();
        let lhs = both.half_width().powi(2);
        let rhs = a.half_width().powi(2) + b.half_width().powi(2);
        assert!((lhs - rhs).abs() < 1e-15);
        assert!((both.center() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn wald_errors() {
        let arms = [stats(0, 0.0, 0.0), stats(5, 0.4, 0.1)];
        assert!(matches!(
            wald_ci(&[1.0, 0.0], &arms, 0.9),
            Err(Error::UndefinedInterval(_))
        ));
        assert!(wald_ci(&[0.0, 1.0], &arms, 1.0).is_err());
        assert!(wald_ci(&[1.0], &arms, 0.9).is_err());
    }

    #[test]
    fn doubling_counts_shrinks_by_root_two() {
        let a = wald_ci(&[1.0, 2.0], &[stats(100, 0.2, 0.16), stats(300, 0.5, 0.25)], 0.9).unwrap();
        let b = wald_ci(&[1.0, 2.0], &[stats(200, 0.2, 0.16), stats(600, 0.5, 0.25)], 0.9).unwrap();
        assert!((b.half_width() / a.half_width() - 1.0 / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn standardized_error_examples() {
        assert_eq!(standardized_error(&stats(100, 0.7, 0.25), 0.7), Some(0.0));
        let z = standardized_error(&stats(100, 0.75, 0.25), 0.7).unwrap();
        assert!((z - 1.0).abs() < 1e-12);
        let w = standardized_error(&stats(100, 0.65, 0.25), 0.7).unwrap();
        assert!((w + z).abs() < 1e-12);
        assert_eq!(standardized_error(&stats(100, 0.7, 0.0), 0.7), None);
        assert_eq!(standardized_error(&stats(1, 0.7, 0.0), 0.7), None);
    }

    #[test]
    fn coverage_counting() {
        let mk = |lo, hi| ConfidenceInterval { lo, hi, level: 0.9, direction: vec![1.0], degenerate: false };
        let mut cis: Vec<_> = (0..450).map(|_| mk(0.0, 1.0)).collect();
        cis.extend((0..50).map(|_| mk(2.0, 3.0)));
        assert!((coverage(&cis, 0.5) - 0.9).abs() < 1e-15);
        let wide = vec![mk(-1e10, 1e10); 10];
        assert_eq!(coverage(&wide, 0.3), 1.0);
        let point = ConfidenceInterval { lo: 0.5, hi: 0.5, level: 0.9, direction: vec![1.0], degenerate: true };
        assert_eq!(coverage(&[point.clone()], 0.5), 1.0);
        assert_eq!(coverage(&[point], 0.4), 0.0);
        assert!(coverage(&[], 0.4).is_nan());
    }

    #[test]
    fn stability_report_on_identical_arms() {
        let s = make_schedule(2_000, 3, 0.5, Mode::Uncorrupted, None).unwrap();
        let model = BanditModel::new(vec![0.7; 3], ArmKind::Bernoulli).unwrap();
        let traj = run_episode(Algorithm::RegExp3, &model, CorruptionPolicy::none(), &s, 3, None).unwrap();
        let r = stability_report(&traj, &s, model.mu()).unwrap();
        for (n, v) in r.n_star.iter().zip(&r.oracle) {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
            assert!((n - 2000.0 / 3.0).abs() < 1e-9);
        }
        for ((rp, &n), xb) in r.ratio_pulls.iter().zip(&traj.pulls).zip(&traj.xbar) {
            assert!(*rp > 0.0);
            let back = rp * 2000.0 * xb;
            assert_eq!(back.round() as usize, n);
            assert!((back - n as f64).abs() < 1e-8);
        }
        assert!(r.is_to_oracle >= 0.0);
    }

    #[test]
    fn one_round_ratio() {
        let s = make_schedule(100, 2, 1.0, Mode::Uncorrupted, None).unwrap();
        let model = BanditModel::new(vec![0.2, 0.4], ArmKind::Bernoulli).unwrap();
        let mut traj = run_episode(Algorithm::RegExp3, &model, CorruptionPolicy::none(), &s, 1, None).unwrap();
        traj.records.truncate(1);
        let arm = traj.records[0].arm;
        traj.pulls = vec![0, 0];
        traj.pulls[arm] = 1;
        traj.xbar = vec![0.5, 0.5];
        let r = stability_report(&traj, &s, model.mu()).unwrap();
        assert!((r.ratio_pulls[arm] - 1.0 / 0.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn welford_matches_two_pass(losses in prop::collection::vec(0.0f64..=1.0, 1..300)) {
            let s = ArmStats::from_losses(&losses);
            let n = losses.len() as f64;
            let mean = losses.iter().sum::<f64>() / n;
            let var = losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / n;
            prop_assert!((s.mean - mean).abs() < 1e-10);
            prop_assert!((s.variance().unwrap() - var).abs() < 1e-10);
        }

        #[test]
        fn moments_ignore_order(mut losses in prop::collection::vec(0.0f64..=1.0, 1..100)) {
            let a = ArmStats::from_losses(&losses);
            losses.reverse();
            let b = ArmStats::from_losses(&losses);
            prop_assert_eq!(a.n, b.n);
            prop_assert!((a.mean - b.mean).abs() < 1e-12);
            prop_assert!((a.variance().unwrap() - b.variance().unwrap()).abs() < 1e-12);
        }
    }
}
