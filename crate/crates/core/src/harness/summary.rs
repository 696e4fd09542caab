use serde::{Deserialize, Serialize};

use super::{derive_rep_seed, ExperimentConfig};
use crate::algorithms::{pseudo_regret, run_episode, Schedule, Trajectory};
use crate::error::Result;
use crate::inference::{stability_report, standardized_error, wald_ci, StabilityReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSummary {
    pub level: f64,
    pub lo: f64,
    pub hi: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmSummary {
    pub arm: usize,
    pub n: usize,
    /// `None` when the arm was never pulled.
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    /// `√n (μ̂ − μ)/σ̂`, `None` when undefined.
    pub std_error: Option<f64>,
    /// Per-arm Wald intervals, one per configured level; empty when `n = 0`.
    pub intervals: Vec<IntervalSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSummary {
    pub direction: Vec<f64>,
    /// Empty when some weighted arm was never pulled.
    pub intervals: Vec<IntervalSummary>,
}

/// Everything kept from one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub rep: usize,
    pub seed: u64,
    pub per_arm: Vec<ArmSummary>,
    pub directions: Vec<DirectionSummary>,
    pub pseudo_regret: f64,
    pub corruption_spent: f64,
    pub xbar: Vec<f64>,
    pub stability: StabilityReport,
    /// Only filled by single-episode runs; sweeps leave it out so their
    /// outputs depend on nothing but the configuration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl RunSummary {
    /// `n_{a,T} / n*_{a,T}` per arm.
    pub fn ratio_to_n_star(&self) -> Vec<f64> {
        let pulls: Vec<usize> = self.per_arm.iter().map(|a| a.n).collect();
        self.stability.ratio_to_n_star(&pulls)
    }
}

fn intervals(u: &[f64], traj: &Trajectory, levels: &[f64]) -> Vec<IntervalSummary> {
    levels
        .iter()
        .map(|&level| {
            wald_ci(u, &traj.arm_stats, level).map(|ci| IntervalSummary {
                level,
                lo: ci.lo,
                hi: ci.hi,
                degenerate: ci.degenerate,
            })
        })
        .collect::<Result<Vec<_>>>()
        .unwrap_or_default()
}

pub fn summarize(
    config: &ExperimentConfig,
    schedule: &Schedule,
    rep: usize,
    seed: u64,
    traj: &Trajectory,
) -> Result<RunSummary> {
    let k = config.k();
    let per_arm = (0..k)
        .map(|a| {
            let s = &traj.arm_stats[a];
            let mut e = vec![0.0; k];
            e[a] = 1.0;
            ArmSummary {
                arm: a,
                n: s.n,
                mean: (s.n > 0).then_some(s.mean),
                variance: s.variance(),
                std_error: standardized_error(s, config.mu[a]),
                intervals: intervals(&e, traj, &config.levels),
            }
        })
        .collect();
    let directions = config
        .directions
        .iter()
        .map(|u| DirectionSummary {
            direction: u.clone(),
            intervals: intervals(u, traj, &config.levels),
        })
        .collect();
    Ok(RunSummary {
        rep,
        seed,
        per_arm,
        directions,
        pseudo_regret: pseudo_regret(traj, &config.mu),
        corruption_spent: traj.corruption_spent,
        xbar: traj.xbar.clone(),
        stability: stability_report(traj, schedule, &config.mu)?,
        wall_time_ms: None,
    })
}

/// Run repetition `rep` of `config` and keep its trajectory.
pub fn run_rep(config: &ExperimentConfig, rep: usize) -> Result<(RunSummary, Trajectory)> {
    let schedule = config.schedule()?;
    let model = config.model()?;
    let seed = derive_rep_seed(config.seed, rep as u64);
    let traj = run_episode(
        config.algorithm,
        &model,
        config.policy()?,
        &schedule,
        seed,
        Some(config.snapshot_stride),
    )?;
    let summary = summarize(config, &schedule, rep, seed, &traj)?;
    Ok((summary, traj))
}
