use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::{Algorithm, Mode, Schedule};
use crate::environment::{ArmKind, BanditModel, CorruptionPolicy, CorruptionStrategy};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ModeKind {
    #[default]
    Uncorrupted,
    Corrupted,
}

/// One experiment, read from a flat JSON document.
///
/// ```json
/// { "K": 3, "mu": [0.9, 0.3, 0.1], "algorithm": "reg-exp3", "alpha": 1.0,
///   "mode": "uncorrupted", "T": 20000, "reps": 500, "seed": 7,
///   "corruption": "none", "levels": [0.9, 0.95] }
/// ```
///
/// Omitted keys take the values of [`ExperimentConfig::default`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Number of arms; optional, must equal `mu.len()` when given.
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub arms: Option<usize>,
    pub mu: Vec<f64>,
    pub arm_kind: ArmKind,
    pub algorithm: Algorithm,
    pub alpha: f64,
    pub mode: ModeKind,
    /// Corruption exponent β: sets the corrupted schedule and the budget
    /// `K·T^β`.
    pub beta: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub reps: usize,
    pub seed: u64,
    pub corruption: CorruptionStrategy,
    pub out_dir: PathBuf,
    pub snapshot_stride: usize,
    pub levels: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
    pub gamma_override: Option<f64>,
}

impl Default for ExperimentConfig {
    /// The unique-optimum Bernoulli study: `μ = (0.9, 0.3, 0.1)`, negative
    /// entropy, `T = 10⁵`, 1000 repetitions.
    fn default() -> Self {
        ExperimentConfig {
            arms: None,
            mu: vec![0.9, 0.3, 0.1],
            arm_kind: ArmKind::Bernoulli,
            algorithm: Algorithm::RegExp3,
            alpha: 1.0,
            mode: ModeKind::Uncorrupted,
            beta: None,
            horizon: 100_000,
            reps: 1000,
            seed: 0x5eed,
            corruption: CorruptionStrategy::None,
            out_dir: PathBuf::from("out"),
            snapshot_stride: 1000,
            levels: vec![0.75, 0.8, 0.85, 0.9, 0.95, 0.99],
            directions: Vec::new(),
            gamma_override: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    pub fn k(&self) -> usize {
        self.mu.len()
    }

    /// Checks every invariant, including schedule feasibility.
    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(Error::config(format!("reps must be >= 1, got {}", self.reps)));
        }
        if self.horizon < 4 {
            return Err(Error::config(format!("T must be >= 4, got {}", self.horizon)));
        }
        if self.snapshot_stride < 1 {
            return Err(Error::config("snapshot_stride must be >= 1"));
        }
        if let Some(l) = self.levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return Err(Error::config(format!("every level must lie in (0, 1), got {l}")));
        }
        if let Some(k) = self.arms {
            if k != self.mu.len() {
                return Err(Error::config(format!(
                    "K = {k} but mu has {} entries",
                    self.mu.len()
                )));
            }
        }
        if let Some(u) = self.directions.iter().find(|u| u.len() != self.k()) {
            return Err(Error::config(format!(
                "direction {u:?} needs {} coordinates",
                self.k()
            )));
        }
        if self.corruption != CorruptionStrategy::None && self.beta.is_none() {
            return Err(Error::config("a corruption strategy needs beta to size its budget"));
        }
        if let Some(beta) = self.beta {
            if !(beta > 0.0 && beta < 0.5) {
                return Err(Error::config(format!("beta must lie in (0, 1/2), got {beta}")));
            }
        }
        self.model()?;
        self.schedule()?;
        Ok(())
    }

    pub fn schedule_mode(&self) -> Result<Mode> {
        match self.mode {
            ModeKind::Uncorrupted => Ok(Mode::Uncorrupted),
            ModeKind::Corrupted => match self.beta {
                Some(beta) => Ok(Mode::Corrupted { beta }),
                None => Err(Error::config("corrupted mode needs beta")),
            },
        }
    }

    pub fn schedule(&self) -> Result<Schedule> {
        Schedule::new(
            self.horizon,
            self.k(),
            self.alpha,
            self.schedule_mode()?,
            self.gamma_override,
        )
    }

    pub fn model(&self) -> Result<BanditModel> {
        BanditModel::new(self.mu.clone(), self.arm_kind)
    }

    /// A fresh adversary with budget `K·T^β` (zero without corruption).
    pub fn policy(&self) -> Result<CorruptionPolicy> {
        match (self.corruption, self.beta) {
            (CorruptionStrategy::None, _) => Ok(CorruptionPolicy::none()),
            (strategy, Some(beta)) => {
                CorruptionPolicy::with_exponent(strategy, self.k(), self.horizon, beta)
            }
            (_, None) => Err(Error::config("a corruption strategy needs beta")),
        }
    }

    pub fn budget_cap(&self) -> f64 {
        self.policy().map(|p| p.budget_cap()).unwrap_or(0.0)
    }
}
