//! Randomized self-checks of the geometric core, run by `mbl selftest`.
//!
//! Each check draws random instances from a seeded generator and records
//! the worst violation it saw.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::simplex::{
    is_divergence, log_barrier_divergence, oracle_minimizer, project, MirrorMap,
    RegularizedObjective, TruncatedSimplex,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tally { name, tolerance, cases: 0, failures: 0, worst: 0.0 }
    }

    fn record(&mut self, violation: f64) {
        self.cases += 1;
        if !(violation <= self.tolerance) {
            self.failures += 1;
        }
        if violation.is_nan() || violation > self.worst {
            self.worst = violation;
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            worst: self.worst,
            tolerance: self.tolerance,
        }
    }
}

const ALPHAS: [f64; 5] = [0.0, 0.3, 1.0 / 3.0, 0.5, 1.0];

fn random_alpha(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        ALPHAS[rng.gen_range(0..ALPHAS.len())]
    } else {
        rng.gen()
    }
}

fn random_domain(rng: &mut ChaCha8Rng) -> Result<TruncatedSimplex> {
    let k = rng.gen_range(2..=6);
    let eps = rng.gen_range(1e-4..0.9) / k as f64;
    TruncatedSimplex::new(k, eps)
}

/// A point of `Δ_ε` with a random interior direction.
fn random_feasible(rng: &mut ChaCha8Rng, domain: &TruncatedSimplex) -> Vec<f64> {
    let k = domain.arms();
    let eps = domain.epsilon();
    let w: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
    let s: f64 = w.iter().sum();
    let free = 1.0 - k as f64 * eps;
    w.iter().map(|v| eps + free * v / s).collect()
}

fn random_positive(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.gen_range(-6.0f64..1.0).exp()).collect()
}

/// Run every check on `cases` random instances.
pub fn run_selftest(seed: u64, cases: usize) -> Result<SelftestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut feasible = Tally::new("projection lands in the truncated simplex", 1e-9);
    let mut pythagoras = Tally::new("generalized Pythagorean inequality", 1e-8);
    let mut kkt = Tally::new("projection KKT conditions", 1e-6);
    let mut optimal = Tally::new("oracle minimizer beats random feasible points", 1e-12);
    let mut is_identity = Tally::new("log-barrier divergence equals Itakura-Saito", 1e-9);
    let mut round_trip = Tally::new("mirror gradient round trip", 1e-10);

    for _ in 0..cases {
        let map = MirrorMap::new(random_alpha(&mut rng))?;
        let domain = random_domain(&mut rng)?;
        let k = domain.arms();
        let eps = domain.epsilon();
        let z = random_positive(&mut rng, k);
        let p = project(map, &z, &domain)?;

        let sum_err = (p.iter().sum::<f64>() - 1.0).abs();
        let floor_err = (eps - p.min()).max(0.0);
        feasible.record(sum_err.max(floor_err));

        let y = random_feasible(&mut rng, &domain);
        let lhs = map.divergence(&y, &p)? + map.divergence(&p, &z)?;
        let rhs = map.divergence(&y, &z)?;
        pythagoras.record((lhs - rhs) / rhs.max(1.0));

        // Interior coordinates share one multiplier; clamped ones sit below it.
        let gp = map.grad(&p)?;
        let gz = map.grad(&z)?;
        let geps = map.grad(&[eps])?[0];
        let shifts: Vec<f64> = (0..k)
            .filter(|&j| p[j] > eps * (1.0 + 1e-9))
            .map(|j| gp[j] - gz[j])
            .collect();
        let scale = 1.0 + gp.iter().chain(&gz).fold(0.0f64, |m, v| m.max(v.abs()));
        let theta = shifts.iter().sum::<f64>() / shifts.len().max(1) as f64;
        let spread = shifts.iter().fold(0.0f64, |m, s| m.max((s - theta).abs()));
        let clamp_excess = (0..k)
            .filter(|&j| p[j] <= eps * (1.0 + 1e-9))
            .fold(0.0f64, |m, j| m.max(gz[j] + theta - geps));
        kkt.record(spread.max(clamp_excess) / scale);

        let mu: Vec<f64> = (0..k).map(|_| rng.gen()).collect();
        let lambda = rng.gen_range(-8.0f64..0.0).exp();
        let obj = RegularizedObjective::new(mu, lambda, eps)?;
        let x = oracle_minimizer(&obj, &domain)?;
        let fx = obj.value(&x)?;
        let fy = obj.value(&y)?;
        optimal.record((fx - fy) / fy.abs().max(1.0));

        let a = random_positive(&mut rng, k);
        let b = random_positive(&mut rng, k);
        let is = is_divergence(&a, &b)?;
        let lb = log_barrier_divergence(&a, &b)?;
        let via_map = MirrorMap::log_barrier().divergence(&a, &b)?;
        is_identity.record(((is - lb).abs().max((is - via_map).abs())) / is.max(1.0));

        let back = map.grad_inverse(&map.grad(&y)?)?;
        let rel = back
            .iter()
            .zip(&y)
            .fold(0.0f64, |m, (u, v)| m.max((u - v).abs() / v));
        round_trip.record(rel);
    }

    Ok(SelftestReport {
        seed,
        checks: vec![
            feasible.finish(),
            pythagoras.finish(),
            kkt.finish(),
            optimal.finish(),
            is_identity.finish(),
            round_trip.finish(),
        ],
    })
}
