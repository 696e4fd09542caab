use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{aggregate, derive_rep_seed, run_rep, Aggregate, ExperimentConfig, RepOutcome, RunSummary};
use crate::algorithms::Trajectory;
use crate::error::{Error, Result};

pub const TRAJECTORY_HEADER: &str =
    "rep,t,arm,loss_observed,loss_true,regret_running,x_snapshot_json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    /// `aggregate.json` and `reps.csv`.
    #[default]
    Json,
    /// Also the round-by-round `trajectory.csv`.
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McOptions {
    pub workers: usize,
    pub format: OutputFormat,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            workers: 1,
            format: OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone)]
pub struct McOutput {
    pub aggregate: Aggregate,
    pub outcomes: Vec<RepOutcome>,
    pub aggregate_path: PathBuf,
    pub reps_path: PathBuf,
    pub trajectory_path: Option<PathBuf>,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Rows of `trajectory.csv` for one rep, without the header.
pub fn trajectory_rows(rep: usize, traj: &Trajectory, mu: &[f64]) -> String {
    let best = mu.iter().copied().fold(f64::INFINITY, f64::min);
    let mut out = String::with_capacity(traj.records.len() * 80);
    let mut regret = 0.0;
    for r in &traj.records {
        regret += mu[r.arm] - best;
        let _ = write!(
            out,
            "{rep},{},{},{},{},{},",
            r.t,
            r.arm,
            fmt_f64(r.loss_observed),
            fmt_f64(r.loss_true),
            fmt_f64(regret)
        );
        if let Some(x) = &r.x {
            let items: Vec<String> = x.iter().map(|v| fmt_f64(*v)).collect();
            let _ = write!(out, "\"[{}]\"", items.join(","));
        }
        out.push('\n');
    }
    out
}

/// Header of `reps.csv`: one row per (rep, target), where a target is an arm
/// or a direction vector.
pub fn reps_header(levels: &[f64]) -> String {
    let mut h = String::from(
        "rep,seed,status,kind,index,n,mean,variance,std_error,pseudo_regret,corruption_spent,\
         xbar,ratio_pulls,ratio_oracle,ratio_n_star,is_to_oracle",
    );
    for l in levels {
        let _ = write!(h, ",ci_lo_{l},ci_hi_{l}");
    }
    h
}

/// Rows of `reps.csv` for one outcome.
pub fn reps_rows(outcome: &RepOutcome, config: &ExperimentConfig) -> String {
    let mut out = String::new();
    let blanks = |n: usize| ",".repeat(n);
    let n_levels = config.levels.len();
    match outcome {
        RepOutcome::Failed { rep, seed, .. } => {
            let _ = writeln!(out, "{rep},{seed},failed,,{}", blanks(11 + 2 * n_levels));
        }
        RepOutcome::Ok(s) => {
            let s: &RunSummary = s;
            let ratio_n_star = s.ratio_to_n_star();
            let common = format!("{},{},ok", s.rep, s.seed);
            let tail = |out: &mut String, intervals: &[super::IntervalSummary]| {
                for i in 0..n_levels {
                    match intervals.get(i) {
                        Some(ci) => {
                            let _ = write!(out, ",{},{}", fmt_f64(ci.lo), fmt_f64(ci.hi));
                        }
                        None => out.push_str(",,"),
                    }
                }
                out.push('\n');
            };
            for a in &s.per_arm {
                let i = a.arm;
                let _ = write!(
                    out,
                    "{common},arm,{i},{},{},{},{},{},{},{},{},{},{},{}",
                    a.n,
                    fmt_opt(a.mean),
                    fmt_opt(a.variance),
                    fmt_opt(a.std_error),
                    fmt_f64(s.pseudo_regret),
                    fmt_f64(s.corruption_spent),
                    fmt_f64(s.xbar[i]),
                    fmt_f64(s.stability.ratio_pulls[i]),
                    fmt_f64(s.stability.ratio_oracle[i]),
                    fmt_f64(ratio_n_star[i]),
                    fmt_f64(s.stability.is_to_oracle),
                );
                tail(&mut out, &a.intervals);
            }
            for (d, dir) in s.directions.iter().enumerate() {
                let _ = write!(
                    out,
                    "{common},direction,{d},,,,,{},{},,,,,{}",
                    fmt_f64(s.pseudo_regret),
                    fmt_f64(s.corruption_spent),
                    fmt_f64(s.stability.is_to_oracle),
                );
                tail(&mut out, &dir.intervals);
            }
        }
    }
    out
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn put(w: &mut impl Write, path: &Path, text: &str) -> Result<()> {
    w.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Run every repetition of `config` and write its outputs under
/// `config.out_dir`.
///
/// Reps run on a pool of `workers` threads in fixed-size batches; each
/// batch is collected in rep order before anything is written, so the
/// files do not depend on the worker count. A rep that fails is recorded
/// and the sweep carries on.
pub fn run_monte_carlo(config: &ExperimentConfig, opts: &McOptions) -> Result<McOutput> {
    config.validate()?;
    let workers = opts.workers.max(1);
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let reps_path = dir.join("reps.csv");
    let aggregate_path = dir.join("aggregate.json");
    let trajectory_path = (opts.format == OutputFormat::Csv).then(|| dir.join("trajectory.csv"));

    let mut reps_w = create(&reps_path)?;
    put(&mut reps_w, &reps_path, &(reps_header(&config.levels) + "\n"))?;
    let mut traj_w = match &trajectory_path {
        Some(p) => {
            let mut w = create(p)?;
            put(&mut w, p, &format!("{TRAJECTORY_HEADER}\n"))?;
            Some(w)
        }
        None => None,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config(format!("cannot start {workers} workers: {e}")))?;
    let want_rows = traj_w.is_some();
    // Batch size only bounds memory; it has no effect on the output.
    let batch = if want_rows { workers * 2 } else { 64.max(workers * 4) };
    let mut outcomes = Vec::with_capacity(config.reps);

    for start in (0..config.reps).step_by(batch) {
        let end = (start + batch).min(config.reps);
        let results: Vec<(RepOutcome, Option<String>)> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|rep| match run_rep(config, rep) {
                    Ok((summary, traj)) => {
                        let rows = want_rows.then(|| trajectory_rows(rep, &traj, &config.mu));
                        (RepOutcome::Ok(Box::new(summary)), rows)
                    }
                    Err(e) => (
                        RepOutcome::Failed {
                            rep,
                            seed: derive_rep_seed(config.seed, rep as u64),
                            error: e.to_string(),
                        },
                        None,
                    ),
                })
                .collect()
        });
        for (outcome, rows) in results {
            put(&mut reps_w, &reps_path, &reps_rows(&outcome, config))?;
            if let (Some(w), Some(rows)) = (traj_w.as_mut(), rows) {
                put(w, trajectory_path.as_ref().unwrap(), &rows)?;
            }
            outcomes.push(outcome);
        }
    }
    reps_w.flush().map_err(|e| Error::io(&reps_path, e))?;
    if let (Some(mut w), Some(p)) = (traj_w, &trajectory_path) {
        w.flush().map_err(|e| Error::io(p, e))?;
    }

    let agg = aggregate(config, &outcomes);
    let json = serde_json::to_string_pretty(&agg)?;
    std::fs::write(&aggregate_path, json + "\n").map_err(|e| Error::io(&aggregate_path, e))?;

    Ok(McOutput {
        aggregate: agg,
        outcomes,
        aggregate_path,
        reps_path,
        trajectory_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.0, 1.0, 0.1, 1.0 / 3.0, 2e-300, 123456.789, -0.7] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn trajectory_rows_layout() {
        let cfg = ExperimentConfig {
            horizon: 300,
            snapshot_stride: 5,
            ..Default::default()
        };
        let (_, traj) = run_rep(&cfg, 0).unwrap();
        let rows = trajectory_rows(0, &traj, &cfg.mu);
        let lines: Vec<&str> = rows.lines().collect();
        assert_eq!(lines.len(), 300);
        assert!(lines[0].ends_with(','));
        assert!(lines[4].starts_with("0,5,"));
        assert!(lines[4].ends_with("]\""));
        let snap = lines[4].split_once("\"").unwrap().1.trim_end_matches('"');
        let x: Vec<f64> = serde_json::from_str(snap).unwrap();
        assert_eq!(x.len(), 3);
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reps_rows_have_header_width() {
        let cfg = ExperimentConfig {
            horizon: 300,
            levels: vec![0.9, 0.95],
            directions: vec![vec![1.0, -1.0, 0.0]],
            ..Default::default()
        };
        let width = reps_header(&cfg.levels).split(',').count();
        let (s, _) = run_rep(&cfg, 3).unwrap();
        let ok = reps_rows(&RepOutcome::Ok(Box::new(s)), &cfg);
        assert_eq!(ok.lines().count(), 4);
        let failed = reps_rows(&RepOutcome::Failed { rep: 1, seed: 2, error: "x".into() }, &cfg);
        for line in ok.lines().chain(failed.lines()) {
            assert_eq!(line.split(',').count(), width, "{line}");
        }
    }
}
