//! `cone-walk`: batch experiments on killed random walks in cones.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "cone-walk", version, about = "Killed lattice random walks in convex cones")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Model JSON (increment law and cone).
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Fixed summation order everywhere (no parallel kernels).
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Size of the worker pool.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for Monte Carlo commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Experiment configuration JSON.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Inline JSON merged over the `params` of the configuration.
    #[arg(long, global = true)]
    pub params: Option<String>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the model hypotheses and report evidence.
    Validate,
    /// Truncated Green function with tail extrapolation.
    Green,
    /// Survival curve P(tau_x > n).
    Survival,
    /// Harmonic function V (or V') at given points.
    Harmonic,
    /// Ratio-series checks of Green asymptotics.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Monte Carlo estimates.
    #[command(subcommand)]
    Mc(McCommand),
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum VerifyCommand {
    Interior,
    Halfspace,
    Boundary,
    Martin,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum McCommand {
    Survival,
    Green,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli.command, &cli.global) {
        Ok(commands::Outcome::Passed) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Failed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
