use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, RunSummary};
use crate::inference::{ks_statistic, KsResult};

/// Outcome of one repetition; failures keep their message and nothing else.
#[derive(Debug, Clone, PartialEq)]
pub enum RepOutcome {
    Ok(Box<RunSummary>),
    Failed { rep: usize, seed: u64, error: String },
}

impl RepOutcome {
    pub fn rep(&self) -> usize {
        match self {
            RepOutcome::Ok(s) => s.rep,
            RepOutcome::Failed { rep, .. } => *rep,
        }
    }

    pub fn summary(&self) -> Option<&RunSummary> {
        match self {
            RepOutcome::Ok(s) => Some(s),
            RepOutcome::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    /// Sample standard deviation (`n − 1` denominator); 0 for one value.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Moments {
    /// Summary of `values` folded in order; `None` when empty.
    pub fn of(values: &[f64]) -> Option<Moments> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        Some(Moments {
            mean,
            sd: if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 },
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            n,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmAggregate {
    pub arm: usize,
    pub mu: f64,
    pub pulls: Option<Moments>,
    /// Over the reps where the arm was pulled.
    pub mean_estimate: Option<Moments>,
    pub ratio_n_star: Option<Moments>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageByLevel {
    pub levels: Vec<f64>,
    /// `per_arm[a][i]`: coverage of arm `a` at `levels[i]`.
    pub per_arm: Vec<Vec<f64>>,
    /// `directions[d][i]`, with truth `u·μ`.
    pub directions: Vec<Vec<f64>>,
    /// Reps whose interval was undefined (an arm never pulled); they count
    /// as misses.
    pub undefined_per_arm: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsArm {
    pub arm: usize,
    /// `None` when every rep was excluded.
    pub result: Option<KsResult>,
    /// Reps with an undefined standardized error (`n < 2` or `σ̂ = 0`).
    pub excluded: usize,
    pub excluded_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityAggregate {
    pub ratio_pulls: Vec<Option<Moments>>,
    pub ratio_oracle: Vec<Option<Moments>>,
    pub is_to_oracle: Option<Moments>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionAggregate {
    pub spent: Option<Moments>,
    pub cap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedReps {
    pub count: usize,
    pub reps: Vec<usize>,
    pub errors: Vec<String>,
}

/// Contents of `aggregate.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub config_echo: ExperimentConfig,
    pub per_arm: Vec<ArmAggregate>,
    pub coverage_by_level: CoverageByLevel,
    pub ks: Vec<KsArm>,
    pub regret: Option<Moments>,
    pub stability: StabilityAggregate,
    pub corruption_spent: CorruptionAggregate,
    pub failed_reps: FailedReps,
}

fn covers(lo: f64, hi: f64, truth: f64) -> bool {
    lo <= truth && truth <= hi
}

/// Deterministic fold over outcomes sorted by rep index. Failed reps are
/// listed but contribute to no statistic.
pub fn aggregate(config: &ExperimentConfig, outcomes: &[RepOutcome]) -> Aggregate {
    let mut sorted: Vec<&RepOutcome> = outcomes.iter().collect();
    sorted.sort_by_key(|o| o.rep());
    let ok: Vec<&RunSummary> = sorted.iter().filter_map(|o| o.summary()).collect();
    let k = config.k();
    let collect = |f: &dyn Fn(&RunSummary) -> Option<f64>| -> Vec<f64> {
        ok.iter().filter_map(|s| f(s)).collect()
    };

    let per_arm = (0..k)
        .map(|a| ArmAggregate {
            arm: a,
            mu: config.mu[a],
            pulls: Moments::of(&collect(&|s| Some(s.per_arm[a].n as f64))),
            mean_estimate: Moments::of(&collect(&|s| s.per_arm[a].mean)),
            ratio_n_star: Moments::of(&collect(&|s| Some(s.ratio_to_n_star()[a]))),
        })
        .collect();

    let n_ok = ok.len() as f64;
    let level_coverage = |truth: f64, pick: &dyn Fn(&RunSummary) -> &[super::IntervalSummary], i: usize| {
        if ok.is_empty() {
            return f64::NAN;
        }
        let hits = ok
            .iter()
            .filter(|s| pick(s).get(i).is_some_and(|ci| covers(ci.lo, ci.hi, truth)))
            .count();
        hits as f64 / n_ok
    };
    let coverage_by_level = CoverageByLevel {
        levels: config.levels.clone(),
        per_arm: (0..k)
            .map(|a| {
                (0..config.levels.len())
                    .map(|i| level_coverage(config.mu[a], &|s| &s.per_arm[a].intervals, i))
                    .collect()
            })
            .collect(),
        directions: config
            .directions
            .iter()
            .enumerate()
            .map(|(d, u)| {
                let truth: f64 = u.iter().zip(&config.mu).map(|(a, b)| a * b).sum();
                (0..config.levels.len())
                    .map(|i| level_coverage(truth, &|s| &s.directions[d].intervals, i))
                    .collect()
            })
            .collect(),
        undefined_per_arm: (0..k)
            .map(|a| ok.iter().filter(|s| s.per_arm[a].intervals.is_empty()).count())
            .collect(),
    };

    let ks = (0..k)
        .map(|a| {
            let z = collect(&|s| s.per_arm[a].std_error);
            let excluded = ok.len() - z.len();
            KsArm {
                arm: a,
                result: ks_statistic(&z).ok(),
                excluded,
                excluded_fraction: if ok.is_empty() { f64::NAN } else { excluded as f64 / n_ok },
            }
        })
        .collect();

    let stability = StabilityAggregate {
        ratio_pulls: (0..k)
            .map(|a| Moments::of(&collect(&|s| Some(s.stability.ratio_pulls[a]))))
            .collect(),
        ratio_oracle: (0..k)
            .map(|a| Moments::of(&collect(&|s| Some(s.stability.ratio_oracle[a]))))
            .collect(),
        is_to_oracle: Moments::of(&collect(&|s| Some(s.stability.is_to_oracle))),
    };

    let failed: Vec<(usize, String)> = sorted
        .iter()
        .filter_map(|o| match o {
            RepOutcome::Failed { rep, error, .. } => Some((*rep, error.clone())),
            RepOutcome::Ok(_) => None,
        })
        .collect();

    Aggregate {
        config_echo: config.clone(),
        per_arm,
        coverage_by_level,
        ks,
        regret: Moments::of(&collect(&|s| Some(s.pseudo_regret))),
        stability,
        corruption_spent: CorruptionAggregate {
            spent: Moments::of(&collect(&|s| Some(s.corruption_spent))),
            cap: config.budget_cap(),
        },
        failed_reps: FailedReps {
            count: failed.len(),
            reps: failed.iter().map(|f| f.0).collect(),
            errors: failed.into_iter().map(|f| f.1).collect(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_examples() {
        assert!(Moments::of(&[]).is_none());
        let m = Moments::of(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.mean, 2.5);
        assert!((m.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!((m.min, m.max, m.n), (1.0, 4.0, 4));
        assert_eq!(Moments::of(&[7.0]).unwrap().sd, 0.0);
    }

    #[test]
    fn failed_reps_do_not_contribute() {
        let cfg = ExperimentConfig {
            horizon: 400,
            reps: 3,
            levels: vec![0.9],
            ..Default::default()
        };
        let (s0, _) = super::super::run_rep(&cfg, 0).unwrap();
        let (s2, _) = super::super::run_rep(&cfg, 2).unwrap();
        let outcomes = vec![
            RepOutcome::Ok(Box::new(s2.clone())),
            RepOutcome::Failed { rep: 1, seed: 0, error: "boom".into() },
            RepOutcome::Ok(Box::new(s0.clone())),
        ];
        let agg = aggregate(&cfg, &outcomes);
        assert_eq!(agg.failed_reps.count, 1);
        assert_eq!(agg.failed_reps.reps, vec![1]);
        let r = agg.regret.unwrap();
        assert_eq!(r.n, 2);
        assert_eq!(r.mean, (s0.pseudo_regret + s2.pseudo_regret) / 2.0);
        let only_ok = aggregate(
            &cfg,
            &[RepOutcome::Ok(Box::new(s0)), RepOutcome::Ok(Box::new(s2))],
        );
        assert_eq!(only_ok.per_arm, agg.per_arm);
        assert_eq!(only_ok.coverage_by_level, agg.coverage_by_level);
    }
}
