//! `hermitia <experiment> --config cfg.json [--out dir] [--seed k]`
//!
//! Writes `report.json` and `data.csv` into the output directory. Exit code
//! 0 when every asserted tolerance holds, 2 on a tolerance violation and 1 on
//! a usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod cache;
mod config;
mod error;
mod experiments;
mod report;

use cache::MatrixCache;
use config::ExperimentConfig;
use error::Result;
use experiments::{Context, Experiment};
use report::Report;

#[derive(Debug, Parser)]
#[command(name = "hermitia", version, about = "Numerical experiments for Hermite pseudo-multipliers")]
struct Cli {
    experiment: Experiment,
    /// JSON configuration; `{}` selects every default.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the config. Defaults to `.`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for all sampling; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(cli: &Cli) -> Result<bool> {
    let cfg = ExperimentConfig::load(&cli.config)?;
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let dir = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    let mut ctx = Context { cfg: &cfg, rng: ChaCha8Rng::seed_from_u64(seed), cache: MatrixCache::new(Some(dir.join("cache"))) };
    let out = experiments::run(cli.experiment, &mut ctx)?;
    let report = Report::new(cli.experiment.id(), seed, cfg.clone(), &out);
    report.write(&out.table, &dir)?;
    for c in &report.checks {
        eprintln!("{} {}: {:e} (bound {:e})", if c.passed { "ok  " } else { "FAIL" }, c.name, c.value, c.bound);
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
