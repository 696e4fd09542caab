use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mbl::harness::{
    derive_rep_seed, run_monte_carlo, summarize, trajectory_rows, ExperimentConfig, McOptions,
    OutputFormat, TRAJECTORY_HEADER,
};
use mbl::Error;

#[derive(Debug, Parser)]
#[command(name = "mbl", version, about = "Regularized EXP3 simulations and inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one episode and print its summary.
    Run(Common),
    /// Run a Monte-Carlo sweep and write its files to the output directory.
    Mc(Common),
    /// Print the resolved schedule for a configuration.
    Schedule(Common),
    /// Run the randomized projection and minimizer checks.
    Selftest(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment configuration (JSON). Defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of repetitions, overriding the configuration.
    #[arg(long)]
    reps: Option<usize>,
    /// Worker threads for sweeps.
    #[arg(long, env = "MBL_WORKERS")]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Common {
    fn config(&self) -> mbl::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if let Some(reps) = self.reps {
            cfg.reps = reps;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn workers(&self) -> mbl::Result<usize> {
        match self.workers {
            Some(0) => Err(Error::Config("workers must be >= 1".into())),
            Some(n) => Ok(n),
            None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> mbl::Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn dispatch(command: Command) -> mbl::Result<()> {
    match command {
        Command::Run(args) => {
            let cfg = args.config()?;
            let schedule = cfg.schedule()?;
            let seed = derive_rep_seed(cfg.seed, 0);
            let started = Instant::now();
            let traj = mbl::algorithms::run_episode(
                cfg.algorithm,
                &cfg.model()?,
                cfg.policy()?,
                &schedule,
                seed,
                Some(cfg.snapshot_stride),
            )?;
            let mut summary = summarize(&cfg, &schedule, 0, seed, &traj)?;
            summary.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
            match args.format {
                Format::Json => println!("{}", to_json(&summary)?),
                Format::Csv => {
                    println!("{TRAJECTORY_HEADER}");
                    print!("{}", trajectory_rows(0, &traj, &cfg.mu));
                }
            }
        }
        Command::Mc(args) => {
            let cfg = args.config()?;
            let opts = McOptions {
                workers: args.workers()?,
                format: match args.format {
                    Format::Csv => OutputFormat::Csv,
                    Format::Json => OutputFormat::Json,
                },
            };
            let out = run_monte_carlo(&cfg, &opts)?;
            let failed = out.aggregate.failed_reps.count;
            eprintln!(
                "{} reps ({failed} failed) -> {}",
                cfg.reps,
                out.aggregate_path.display()
            );
        }
        Command::Schedule(args) => {
            let cfg = args.config()?;
            println!("{}", to_json(&cfg.schedule()?)?);
        }
        Command::Selftest(args) => {
            let seed = args.seed.unwrap_or(0x5eed);
            let cases = args.reps.unwrap_or(2_000);
            let report = mbl::selftest::run_selftest(seed, cases)?;
            for c in &report.checks {
                let verdict = if c.passed() { "ok" } else { "FAILED" };
                eprintln!(
                    "{verdict:>6}  {}  ({} cases, worst {:.3e}, tol {:.0e})",
                    c.name, c.cases, c.worst, c.tolerance
                );
            }
            if args.format == Format::Json {
                println!("{}", to_json(&report)?);
            }
            if !report.passed() {
                return Err(Error::Domain("selftest found violations".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap routes help to stdout and usage errors to stderr.
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
