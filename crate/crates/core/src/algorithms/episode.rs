use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Algorithm, Exp3, Learner, RegExp3, Schedule, Ucb};
use crate::environment::{AdversaryView, BanditModel, CorruptionPolicy};
use crate::error::{Error, Result};
use crate::inference::ArmStats;

/// Stream ids inside one episode's ChaCha generator family. The
/// environment and the learner never share a stream, so the loss sequence
/// is the same whichever learner runs.
const ENV_STREAM: u64 = 0;
const LEARNER_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// 1-based round index.
    pub t: usize,
    pub arm: usize,
    /// What the learner saw (post-corruption).
    pub loss_observed: f64,
    pub loss_true: f64,
    /// `x_t` on snapshot rounds.
    pub x: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub algorithm: Algorithm,
    pub records: Vec<RoundRecord>,
    /// `n_{a,T}`.
    pub pulls: Vec<usize>,
    /// Moments of the observed losses per arm.
    pub arm_stats: Vec<ArmStats>,
    /// `x̄_T = (1/T) Σ_t x_t`.
    pub xbar: Vec<f64>,
    /// Sampling distribution after the last update.
    pub x_final: Vec<f64>,
    /// Realized corruption `Σ_t ‖ℓ^c_t − ℓ_t‖_∞`.
    pub corruption_spent: f64,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.records.len()
    }
}

/// Per-episode generators derived from one seed.
pub fn episode_rngs(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut env = ChaCha8Rng::seed_from_u64(seed);
    env.set_stream(ENV_STREAM);
    let mut learner = ChaCha8Rng::seed_from_u64(seed);
    learner.set_stream(LEARNER_STREAM);
    (env, learner)
}

pub fn make_learner(algo: Algorithm, schedule: &Schedule) -> Result<Box<dyn Learner + Send>> {
    Ok(match algo {
        Algorithm::RegExp3 => Box::new(RegExp3::new(*schedule)?),
        Algorithm::Exp3 => Box::new(Exp3::new(schedule.arms, schedule.eta)),
        Algorithm::Ucb => Box::new(Ucb::new(schedule.arms)),
    })
}

/// Run `schedule.horizon` rounds. Each round draws the full loss vector,
/// lets the adversary distort it, samples an arm with a single uniform, and
/// reveals only the pulled coordinate of the corrupted vector.
///
/// `snapshot_stride` records `x_t` every that many rounds.
pub fn run_episode(
    algo: Algorithm,
    model: &BanditModel,
    policy: CorruptionPolicy,
    schedule: &Schedule,
    seed: u64,
    snapshot_stride: Option<usize>,
) -> Result<Trajectory> {
    let learner = make_learner(algo, schedule)?;
    run_with_learner(algo, learner, model, policy, schedule.horizon, seed, snapshot_stride)
}

/// [`run_episode`] with a caller-built learner.
pub fn run_with_learner(
    algo: Algorithm,
    mut learner: Box<dyn Learner + Send>,
    model: &BanditModel,
    mut policy: CorruptionPolicy,
    horizon: usize,
    seed: u64,
    snapshot_stride: Option<usize>,
) -> Result<Trajectory> {
    let k = model.arms();
    if learner.probabilities().len() != k {
        return Err(Error::config(format!(
            "learner has {} arms, model has {k}",
            learner.probabilities().len()
        )));
    }
    if snapshot_stride == Some(0) {
        return Err(Error::config("snapshot_stride must be >= 1"));
    }
    let (mut env_rng, mut learner_rng) = episode_rngs(seed);
    let mut stats = vec![ArmStats::default(); k];
    let mut pulls = vec![0usize; k];
    let mut means = vec![0.0; k];
    let mut xsum = vec![0.0; k];
    let mut records = Vec::with_capacity(horizon);

    for t in 1..=horizon {
        let x = learner.probabilities();
        for (s, v) in xsum.iter_mut().zip(x) {
            *s += v;
        }
        let snapshot = match snapshot_stride {
            Some(stride) if t % stride == 0 => Some(x.to_vec()),
            _ => None,
        };

        let clean = model.sample_round(&mut env_rng);
        for (m, s) in means.iter_mut().zip(&stats) {
            *m = s.mean;
        }
        let view = AdversaryView {
            round: t,
            pulls: &pulls,
            empirical_means: &means,
            true_means: model.mu(),
        };
        let losses = policy.corrupt(clean, &view);

        let u: f64 = learner_rng.gen();
        let arm = learner.select(u);
        let observed = losses.corrupted_vector[arm];
        learner.observe(arm, observed)?;

        stats[arm].push(observed);
        pulls[arm] += 1;
        records.push(RoundRecord {
            t,
            arm,
            loss_observed: observed,
            loss_true: losses.true_vector[arm],
            x: snapshot,
        });
    }

    let t = horizon.max(1) as f64;
    Ok(Trajectory {
        algorithm: algo,
        records,
        pulls,
        arm_stats: stats,
        xbar: xsum.iter().map(|s| s / t).collect(),
        x_final: learner.probabilities().to_vec(),
        corruption_spent: policy.realized_corruption(),
    })
}

/// `Σ_t (μ_{A_t} − μ*)` against the true means.
pub fn pseudo_regret(traj: &Trajectory, mu: &[f64]) -> f64 {
    let best = mu.iter().copied().fold(f64::INFINITY, f64::min);
    traj.records.iter().map(|r| mu[r.arm] - best).sum()
}

/// Cumulative pseudo-regret after each round.
pub fn running_regret(traj: &Trajectory, mu: &[f64]) -> Vec<f64> {
    let best = mu.iter().copied().fold(f64::INFINITY, f64::min);
    traj.records
        .iter()
        .scan(0.0, |acc, r| {
            *acc += mu[r.arm] - best;
            Some(*acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{make_schedule, Mode};
    use crate::environment::ArmKind;

    fn model() -> BanditModel {
        BanditModel::new(vec![0.9, 0.3, 0.1], ArmKind::Bernoulli).unwrap()
    }

    #[test]
    fn deterministic_given_seed() {
        let s = make_schedule(3_000, 3, 1.0, Mode::Uncorrupted, None).unwrap();
        for algo in [Algorithm::RegExp3, Algorithm::Exp3, Algorithm::Ucb] {
            let a = run_episode(algo, &model(), CorruptionPolicy::none(), &s, 42, Some(100)).unwrap();
            let b = run_episode(algo, &model(), CorruptionPolicy::none(), &s, 42, Some(100)).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.pulls.iter().sum::<usize>(), 3_000);
            assert_eq!(a.records.iter().filter(|r| r.x.is_some()).count(), 30);
        }
    }

    #[test]
    fn regret_examples() {
        let mut traj = run_episode(
            Algorithm::Ucb,
            &model(),
            CorruptionPolicy::none(),
            &make_schedule(1_000, 3, 1.0, Mode::Uncorrupted, None).unwrap(),
            1,
            None,
        )
        .unwrap();
        assert!(pseudo_regret(&traj, model().mu()) >= 0.0);
        traj.records.truncate(3);
        for (r, arm) in traj.records.iter_mut().zip([0, 2, 2]) {
            r.arm = arm;
        }
        assert!((pseudo_regret(&traj, &[0.9, 0.3, 0.1]) - 0.8).abs() < 1e-12);
        for r in traj.records.iter_mut() {
            r.arm = 2;
        }
        assert_eq!(pseudo_regret(&traj, &[0.9, 0.3, 0.1]), 0.0);
        let run = running_regret(&traj, &[0.9, 0.3, 0.1]);
        assert_eq!(run, vec![0.0; 3]);
    }

    #[test]
    fn environment_stream_is_shared_across_learners() {
        let s = make_schedule(500, 3, 1.0, Mode::Uncorrupted, None).unwrap();
        let a = run_episode(Algorithm::RegExp3, &model(), CorruptionPolicy::none(), &s, 8, None).unwrap();
        let b = run_episode(Algorithm::Ucb, &model(), CorruptionPolicy::none(), &s, 8, None).unwrap();
        let (mut env, _) = episode_rngs(8);
        for (ra, rb) in a.records.iter().zip(&b.records) {
            let round = model().sample_round(&mut env);
            assert_eq!(ra.loss_true, round.true_vector[ra.arm]);
            assert_eq!(rb.loss_true, round.true_vector[rb.arm]);
        }
    }

    #[test]
    fn rejects_zero_stride() {
        let s = make_schedule(500, 3, 1.0, Mode::Uncorrupted, None).unwrap();
        assert!(run_episode(Algorithm::Exp3, &model(), CorruptionPolicy::none(), &s, 8, Some(0)).is_err());
    }
}
