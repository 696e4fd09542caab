use serde::{Deserialize, Serialize};

use super::Schedule;
use crate::error::{Error, Result};
use crate::inference::ArmStats;
use crate::simplex::{
    dual_step, project, regularizer_grad, MirrorMap, ProbVector, TruncatedSimplex,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    #[default]
    RegExp3,
    Exp3,
    Ucb,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::RegExp3 => "reg-exp3",
            Algorithm::Exp3 => "exp3",
            Algorithm::Ucb => "ucb",
        })
    }
}

/// A bandit learner driven one round at a time.
pub trait Learner {
    /// Sampling distribution for the coming round.
    fn probabilities(&self) -> &[f64];

    /// Arm for the coming round given one uniform draw `u ∈ [0, 1)`.
    fn select(&mut self, u: f64) -> usize {
        sample_index(self.probabilities(), u)
    }

    /// Feed back the loss observed on the pulled arm.
    fn observe(&mut self, arm: usize, loss: f64) -> Result<()>;
}

/// Inverse-CDF draw from `probs`.
pub fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    for (j, &p) in probs.iter().enumerate() {
        cum += p;
        if u < cum {
            return j;
        }
    }
    // Rounding left u above the total: take the last arm with mass.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// `ℓ̂_j = 1{A = j}·ℓ / x_j`.
pub fn importance_weighted_loss(x: &[f64], arm: usize, observed_loss: f64) -> Vec<f64> {
    let mut v = vec![0.0; x.len()];
    v[arm] = observed_loss / x[arm];
    v
}

/// Iterates of the regularized mirror-descent learner.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    /// Current sampling distribution `x_t`, in `Δ_ε`.
    pub x: ProbVector,
    /// Pre-projection iterate `z_t`.
    pub z_dual: Vec<f64>,
    /// Rounds completed.
    pub t: usize,
    /// `Σ_{s ≤ t} x_s`.
    pub xbar_accum: Vec<f64>,
}

impl LearnerState {
    /// `z_1` uniform and `x_1` its projection.
    pub fn initial(map: MirrorMap, domain: &TruncatedSimplex) -> Result<Self> {
        let k = domain.arms();
        let z = vec![1.0 / k as f64; k];
        Ok(LearnerState {
            x: project(map, &z, domain)?,
            z_dual: z,
            t: 0,
            xbar_accum: vec![0.0; k],
        })
    }

    /// `x̄_t`; the zero vector before the first round.
    pub fn xbar(&self) -> Vec<f64> {
        let t = self.t.max(1) as f64;
        self.xbar_accum.iter().map(|s| s / t).collect()
    }
}

/// One round of regularized EXP3: importance weighting, the log-barrier
/// gradient correction, the mirror step, and the projection back onto `Δ_ε`.
pub fn reg_exp3_step(
    state: &LearnerState,
    schedule: &Schedule,
    map: MirrorMap,
    domain: &TruncatedSimplex,
    arm: usize,
    loss: f64,
) -> Result<LearnerState> {
    if arm >= state.x.len() {
        return Err(Error::domain(format!("arm {arm} out of range")));
    }
    if !(0.0..=1.0).contains(&loss) {
        return Err(Error::domain(format!("loss {loss} outside [0, 1]")));
    }
    let x = state.x.as_slice();
    let mut tilde = importance_weighted_loss(x, arm, loss);
    if schedule.lambda > 0.0 {
        let reg = regularizer_grad(x, domain.epsilon())?;
        for (l, r) in tilde.iter_mut().zip(reg) {
            // Clamp rounding noise on the boundary x_j = ε.
            *l += schedule.lambda * r.max(0.0);
        }
    }
    let z = dual_step(map, x, &tilde, schedule.eta)?;
    let next = project(map, &z, domain)?;
    let mut xbar_accum = state.xbar_accum.clone();
    for (s, v) in xbar_accum.iter_mut().zip(x) {
        *s += v;
    }
    Ok(LearnerState {
        x: next,
        z_dual: z,
        t: state.t + 1,
        xbar_accum,
    })
}

#[derive(Debug, Clone)]
pub struct RegExp3 {
    state: LearnerState,
    schedule: Schedule,
    map: MirrorMap,
    domain: TruncatedSimplex,
}

impl RegExp3 {
    pub fn new(schedule: Schedule) -> Result<Self> {
        Self::with_domain(schedule, schedule.domain())
    }

    /// Same learner on an explicit domain, e.g. a vanishing ε.
    pub fn with_domain(schedule: Schedule, domain: TruncatedSimplex) -> Result<Self> {
        let map = MirrorMap::new(schedule.alpha)?;
        Ok(RegExp3 {
            state: LearnerState::initial(map, &domain)?,
            schedule,
            map,
            domain,
        })
    }

    pub fn state(&self) -> &LearnerState {
        &self.state
    }
}

impl Learner for RegExp3 {
    fn probabilities(&self) -> &[f64] {
        self.state.x.as_slice()
    }

    fn observe(&mut self, arm: usize, loss: f64) -> Result<()> {
        self.state = reg_exp3_step(&self.state, &self.schedule, self.map, &self.domain, arm, loss)?;
        Ok(())
    }
}

/// Plain exponential weights: `x_{t+1,i} ∝ x_{t,i} exp(−η ℓ̂_{t,i})`.
#[derive(Debug, Clone)]
pub struct Exp3 {
    x: Vec<f64>,
    eta: f64,
}

impl Exp3 {
    pub fn new(arms: usize, eta: f64) -> Self {
        Exp3 {
            x: vec![1.0 / arms as f64; arms],
            eta,
        }
    }
}

impl Learner for Exp3 {
    fn probabilities(&self) -> &[f64] {
        &self.x
    }

    fn observe(&mut self, arm: usize, loss: f64) -> Result<()> {
        let lhat = loss / self.x[arm];
        self.x[arm] *= (-self.eta * lhat).exp();
        let s: f64 = self.x.iter().sum();
        for v in &mut self.x {
            *v /= s;
        }
        Ok(())
    }
}

/// Loss-version UCB1 state.
#[derive(Debug, Clone, PartialEq)]
pub struct UcbState {
    pub stats: Vec<ArmStats>,
    /// Rounds completed.
    pub t: usize,
}

impl UcbState {
    pub fn new(arms: usize) -> Self {
        UcbState {
            stats: vec![ArmStats::default(); arms],
            t: 0,
        }
    }

    /// Arm for round `t + 1`: each arm once, then
    /// `argmin_a μ̂_a − √(2 ln t / n_a)` with ties to the lowest index.
    pub fn next_arm(&self) -> usize {
        if let Some(j) = self.stats.iter().position(|s| s.n == 0) {
            return j;
        }
        let round = (self.t + 1) as f64;
        let mut best = 0;
        let mut best_index = f64::INFINITY;
        for (j, s) in self.stats.iter().enumerate() {
            let index = s.mean - (2.0 * round.ln() / s.n as f64).sqrt();
            if index < best_index {
                best = j;
                best_index = index;
            }
        }
        best
    }
}

pub fn ucb_step(state: &UcbState, arm: usize, loss: f64) -> UcbState {
    let mut next = state.clone();
    next.stats[arm].push(loss);
    next.t += 1;
    next
}

#[derive(Debug, Clone)]
pub struct Ucb {
    state: UcbState,
    onehot: Vec<f64>,
}

impl Ucb {
    pub fn new(arms: usize) -> Self {
        let state = UcbState::new(arms);
        let mut onehot = vec![0.0; arms];
        onehot[state.next_arm()] = 1.0;
        Ucb { state, onehot }
    }
}

impl Learner for Ucb {
    fn probabilities(&self) -> &[f64] {
        &self.onehot
    }

    fn select(&mut self, _u: f64) -> usize {
        self.state.next_arm()
    }

    fn observe(&mut self, arm: usize, loss: f64) -> Result<()> {
        self.state.stats[arm].push(loss);
        self.state.t += 1;
        self.onehot.iter_mut().for_each(|v| *v = 0.0);
        let next = self.state.next_arm();
        self.onehot[next] = 1.0;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{make_schedule, Mode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn importance_weighting_examples() {
        assert_eq!(importance_weighted_loss(&[0.5, 0.3, 0.2], 1, 0.0), vec![0.0; 3]);
        let v = importance_weighted_loss(&[0.5, 0.3, 0.2], 1, 0.6);
        assert_eq!(v[0], 0.0);
        assert!((v[1] - 2.0).abs() < 1e-15);
        assert_eq!(v[2], 0.0);
    }

    #[test]
    fn importance_weighting_is_unbiased() {
        let x = [0.5, 0.3, 0.2];
        let losses = [0.4, 0.9, 0.1];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 1_000_000;
        let mut acc = [0.0; 3];
        for _ in 0..n {
            let arm = sample_index(&x, rng.gen());
            let v = importance_weighted_loss(&x, arm, losses[arm]);
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b;
            }
        }
        for (a, l) in acc.iter().zip(losses) {
            assert!((a / n as f64 - l).abs() < 5e-3);
        }
    }

    #[test]
    fn sampling_inverse_cdf() {
        let p = [0.2, 0.0, 0.8];
        assert_eq!(sample_index(&p, 0.0), 0);
        assert_eq!(sample_index(&p, 0.19), 0);
        assert_eq!(sample_index(&p, 0.2), 2);
        assert_eq!(sample_index(&p, 0.999_999), 2);
        assert_eq!(sample_index(&[0.5, 0.5 - 1e-12, 0.0], 0.999_999_999_999_9), 1);
    }

    #[test]
    fn lambda_zero_step_is_multiplicative_weights() {
        let mut s = make_schedule(10_000, 2, 1.0, Mode::Uncorrupted, None).unwrap();
        s.lambda = 0.0;
        s.eta = 0.1;
        let domain = TruncatedSimplex::new(2, 0.1).unwrap();
        let map = MirrorMap::entropy();
        let state = LearnerState {
            x: ProbVector::new(vec![0.5, 0.5]).unwrap(),
            z_dual: vec![0.5, 0.5],
            t: 0,
            xbar_accum: vec![0.0; 2],
        };
        let next = reg_exp3_step(&state, &s, map, &domain, 0, 0.5).unwrap();
        let w0 = 0.5 * (-0.1f64 * 0.5 / 0.5).exp();
        let expect = [w0 / (w0 + 0.5), 0.5 / (w0 + 0.5)];
        for (a, b) in next.x.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(next.t, 1);
        assert_eq!(next.xbar_accum, vec![0.5, 0.5]);

        // Zero loss without regularization is a no-op.
        let same = reg_exp3_step(&state, &s, map, &domain, 1, 0.0).unwrap();
        assert_eq!(same.x, state.x);
    }

    #[test]
    fn iterates_stay_truncated() {
        let s = make_schedule(2_000, 3, 0.5, Mode::Uncorrupted, None).unwrap();
        let mut learner = RegExp3::new(s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..2_000 {
            let arm = learner.select(rng.gen());
            learner.observe(arm, if arm == 2 { 0.0 } else { 1.0 }).unwrap();
            assert!(learner.probabilities().iter().all(|&v| v >= s.epsilon - 1e-12));
        }
    }

    #[test]
    fn ucb_sweep_then_index() {
        let mut state = UcbState::new(2);
        assert_eq!(state.next_arm(), 0);
        state = ucb_step(&state, 0, 0.2);
        assert_eq!(state.next_arm(), 1);

        let mut state = UcbState::new(2);
        for (arm, l) in [(0, 0.2), (1, 0.8)] {
            for _ in 0..5 {
                state = ucb_step(&state, arm, l);
            }
        }
        assert_eq!(state.t, 10);
        let idx0 = 0.2 - (2.0 * 11f64.ln() / 5.0).sqrt();
        assert!((idx0 - -0.779_366_177_238_804).abs() < 1e-12);
        assert_eq!(state.next_arm(), 0);
    }

    #[test]
    fn ucb_ties_go_low() {
        let mut state = UcbState::new(3);
        for arm in 0..3 {
            state = ucb_step(&state, arm, 0.5);
        }
        assert_eq!(state.next_arm(), 0);
    }
}
