use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod config;

/// Singular-vector perturbation bounds, Monte Carlo checks and MPSK
/// classification.
#[derive(Debug, Parser)]
#[command(name = "svnoise", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Flat TOML config; unknown keys are errors.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the config's noise seed (verify) or scenario seed (classify, sweep).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, default_value = "svnoise-out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    pub format: Format,
    /// Overrides the trial count (verify) or runs per grid cell (sweep).
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Worker threads for trial execution.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evaluate the max-norm deviation bound.
    Bound,
    /// Run seeded trials and check coverage of the bound.
    Verify,
    /// Feasibility of the Gaussian approximation, or the minimal samples per symbol.
    Plan,
    /// Synthesize one MPSK burst and estimate its order.
    Classify,
    /// Success rate over modulation orders and SNRs.
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::EXIT_CONFIG)
        }
    }
}
