use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use duplicity::cli::config::ExperimentConfig;
use duplicity::cli::{run, write_outputs};
use duplicity::Error;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    VerifyRep,
    Eff,
    Ftc,
    Abel,
    GoodVectors,
    Gns,
    Oddsym,
    Schur,
    All,
}

/// Numerical checks of boundary representations of free groups.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    command: Command,
    /// `key = value` configuration file, applied before the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    nobs: Option<usize>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Record per-check wall-clock times in the report.
    #[arg(long)]
    timings: bool,
}

fn config(args: &Args) -> duplicity::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::parse(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    cfg.k = args.k.unwrap_or(cfg.k);
    cfg.t = args.t.unwrap_or(cfg.t);
    cfg.depth = args.depth.unwrap_or(cfg.depth);
    cfg.n_obs = args.nobs.unwrap_or(cfg.n_obs);
    cfg.n_max = args.nmax.unwrap_or(cfg.n_max);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.workers = args.workers.unwrap_or(cfg.workers);
    cfg.timings |= args.timings;
    if let Some(out) = &args.out {
        cfg.out.clone_from(out);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match config(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let name = args.command.to_possible_value().expect("named variant").get_name().to_string();
    let out = cfg.out.clone();
    let (report, tables) = match run(&name, cfg) {
        Ok(done) => done,
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    for check in &report.checks {
        println!("{:<4} {:<28} {:>12.4e}", format!("{:?}", check.status).to_uppercase(), check.name, check.value);
    }
    println!("{} passed, {} failed", report.passed(), report.failed());
    if let Err(e) = write_outputs(&out, &report, &tables) {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    if report.failed() == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
