//! `blochlab <subcommand> --config <path.json> --out <dir> [--seed N] [--tol key=value]`
//!
//! Exit codes: 0 when every check passes, 2 on a certification failure,
//! 3 on a configuration error, 1 on I/O trouble.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use commands::Checks;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<blochlab::Error> for CliError {
    fn from(e: blochlab::Error) -> Self {
        use blochlab::Error as E;
        match e {
            E::InvalidParameter(_) | E::ResolutionInsufficient { .. } | E::PolynomialNotNormalized(_) => {
                CliError::Config(e.to_string())
            }
            E::Io(s) => CliError::Io(s),
            _ => CliError::Certification(e.to_string()),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Certification(_) => 2,
            CliError::Config(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "blochlab", version, about = "Bloch approximation and integration-operator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// JSON parameter block for the subcommand.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Seed for randomized sweeps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", value_name = "KEY=VALUE", value_parser = config::parse_tol)]
    tol: Vec<(String, f64)>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ∂̄-corrected approximation of a Bloch function on the half-strip.
    Approx(Common),
    /// Certify the analytic partition of unity, or bisect its smallest `b`.
    Partition(Common),
    /// Grid estimate of the interior diameter, with an optional `J_p` sweep.
    Diameter(Common),
    /// Witness lower bound for `J_φ′` on the spiral map.
    Witness(Common),
    /// Oscillating Gaussian symbol: radial variation versus bounded pairings.
    Counterexample(Common),
}

fn run(name: &str, c: &Common) -> Result<Checks, CliError> {
    std::fs::create_dir_all(&c.out).map_err(|e| CliError::Io(format!("{}: {e}", c.out.display())))?;
    let (cfg, out, seed, tol) = (c.config.as_path(), c.out.as_path(), c.seed, c.tol.as_slice());
    match name {
        "approx" => commands::approx(&config::load(cfg, tol, commands::APPROX_TOLS)?, out, seed),
        "partition" => commands::partition(&config::load(cfg, tol, commands::PARTITION_TOLS)?, out, seed),
        "diameter" => commands::diameter(&config::load(cfg, tol, commands::DIAMETER_TOLS)?, out, seed),
        "witness" => commands::witness(&config::load(cfg, tol, commands::WITNESS_TOLS)?, out, seed),
        "counterexample" => commands::counterexample(&config::load(cfg, tol, commands::COUNTEREXAMPLE_TOLS)?, out, seed),
        _ => unreachable!(),
    }
}

fn failure_certificate(out: &Path, name: &str, seed: u64, e: &CliError) {
    let report = serde_json::json!({ "error": e.to_string(), "exit_code": e.code() });
    if let Err(w) = commands::write_certificate(out, name, seed, &vec![("run".to_string(), false)], report) {
        log::warn!("could not write failure certificate: {w}");
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (name, common) = match &cli.command {
        Command::Approx(c) => ("approx", c),
        Command::Partition(c) => ("partition", c),
        Command::Diameter(c) => ("diameter", c),
        Command::Witness(c) => ("witness", c),
        Command::Counterexample(c) => ("counterexample", c),
    };
    match run(name, common) {
        Ok(checks) => {
            for (n, ok) in &checks {
                log::info!("{n}: {}", if *ok { "pass" } else { "FAIL" });
            }
            let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
            if failed.is_empty() {
                println!("{name}: pass");
                ExitCode::SUCCESS
            } else {
                println!("{name}: certification failed ({})", failed.join(", "));
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("{name}: {e}");
            if !matches!(e, CliError::Config(_)) && common.out.is_dir() {
                failure_certificate(&common.out, name, common.seed, &e);
            }
            ExitCode::from(e.code())
        }
    }
}
