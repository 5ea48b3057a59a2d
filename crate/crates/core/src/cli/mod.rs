//! Command-line front end.
//!
//! Every subcommand writes its results plus a `manifest.json` into
//! `--out-dir`. Outputs depend only on the inputs and flags, so two runs with
//! the same manifest produce byte-identical files.

mod commands;

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{Limits, Tolerances};
use crate::dataset::InputFormat;

pub use commands::{cmd_estimate, cmd_fit, cmd_simulate, cmd_solve};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20150301;

/// Environment variable bounding the worker-thread count.
pub const THREADS_ENV: &str = "DISCLOSURE_GAMES_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "disclosure-games",
    version,
    about = "Self-disclosure public-goods games: fitting, estimation and equilibria"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the power-law reward model and the linear null model to a comment table.
    Fit(FitArgs),
    /// Estimate per-user disclosure probabilities and costs.
    Estimate(EstimateArgs),
    /// Compute the equilibria of a game.
    Solve(SolveArgs),
    /// Generate a synthetic comment table from the model.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Comment table to read.
    #[arg(long)]
    pub input: PathBuf,
    /// Input format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Jsonl,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => InputFormat::Csv,
            FormatArg::Jsonl => InputFormat::Jsonl,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Histogram bins for the residuals [default: Sturges' rule].
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Minimum number of distinct articles a user must have commented on.
    #[arg(long, default_value_t = 15)]
    pub min_posts: u64,
    /// Reward scale A [default: fitted from the input].
    #[arg(long)]
    pub a: Option<f64>,
    /// Reward exponent gamma [default: fitted from the input].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Most users (target included) per cost enumeration.
    #[arg(long, default_value_t = 8)]
    pub enum_cap: usize,
    /// Users with their own estimate an article needs to contribute.
    #[arg(long, default_value_t = 3)]
    pub min_estimated_users: usize,
    /// Histogram bins [default: Sturges' rule].
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    /// Game as a JSON file path or inline JSON: {"A": .., "gamma": .., "beta": [..]}.
    #[arg(long)]
    pub game: String,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Largest game handled by support enumeration.
    #[arg(long, default_value_t = Limits::default().support)]
    pub enum_cap: usize,
    /// KKT verification tolerance.
    #[arg(long, default_value_t = Tolerances::default().kkt)]
    pub tol: f64,
    /// Seed for the multistart interior solves.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Newton starting points per support pattern.
    #[arg(long, default_value_t = 8)]
    pub starts: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 2000)]
    pub n_articles: usize,
    #[arg(long, default_value_t = 400)]
    pub n_users: usize,
    /// Reward scale A [default: e^2.2].
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, default_value_t = 0.71)]
    pub gamma: f64,
    /// Standard deviation of the log-scale noise on comment totals.
    #[arg(long, default_value_t = 0.5)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 2)]
    pub min_participants: usize,
    #[arg(long, default_value_t = 8)]
    pub max_participants: usize,
    /// Disclosure probabilities are drawn uniformly from [x-low, x-high).
    #[arg(long, default_value_t = 0.1)]
    pub x_low: f64,
    #[arg(long, default_value_t = 0.5)]
    pub x_high: f64,
}

/// Applies the `DISCLOSURE_GAMES_THREADS` bound, if set, to the global pool.
pub fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_ENV}={raw:?} is not a thread count"))?;
    if n == 0 {
        bail!("{THREADS_ENV} must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the worker pool")
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Fit(args) => cmd_fit(&args),
        Command::Estimate(args) => cmd_estimate(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::Simulate(args) => cmd_simulate(&args),
    }
}
