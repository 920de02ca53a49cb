//! `phasekit` — experiment runner for attention-coupled oscillator
//! ensembles.
//!
//! Subcommands cover network generation, single simulations, parameter
//! sweeps, synchronization-threshold estimation (numerical and analytic),
//! a discrete-attention demonstration, associative-memory stability maps
//! and recovery, and named presets bundling the standard figures.
//!
//! Every run writes its data files plus a `manifest.json` describing the
//! resolved configuration, seeds, and output digests. Exit codes: 0
//! success, 1 runtime failure, 2 usage or configuration error.

mod commands;
mod config;
mod error;
mod manifest;
mod system;
mod util;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    /// Reduced sizes and horizons for interactive work.
    Desk,
    /// Publication-scale sizes and horizons.
    Paper,
}

impl Scale {
    pub fn name(self) -> &'static str {
        match self {
            Scale::Desk => "desk",
            Scale::Paper => "paper",
        }
    }

    /// Default ensemble size.
    pub fn default_n(self) -> usize {
        match self {
            Scale::Desk => 200,
            Scale::Paper => 1000,
        }
    }

    /// Default integration horizon.
    pub fn default_t_end(self) -> f64 {
        match self {
            Scale::Desk => 2000.0,
            Scale::Paper => 10_000.0,
        }
    }

    /// Default seeds per ensemble point.
    pub fn default_seeds(self) -> usize {
        match self {
            Scale::Desk => 5,
            Scale::Paper => 10,
        }
    }
}

/// Shared context threaded into every subcommand.
pub struct Ctx {
    pub seed: u64,
    pub jobs: usize,
    pub out: PathBuf,
    pub scale: Scale,
}

#[derive(Parser)]
#[command(
    name = "phasekit",
    version,
    about = "Simulation and analysis toolkit for attention-coupled oscillator ensembles"
)]
struct Cli {
    /// Master seed; every random component derives from it.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Worker threads for ensemble parallelism (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Problem-size profile for defaults and presets.
    #[arg(long, global = true, value_enum, default_value_t = Scale::Desk)]
    scale: Scale,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a network and write its edge list and summary statistics.
    GenerateNetwork(commands::generate_network::Args),
    /// Integrate one ensemble and write the order-parameter time series.
    Simulate(commands::simulate::Args),
    /// Sweep coupling, attention weight, or decay rate over a seed ensemble.
    Sweep(commands::sweep::Args),
    /// Estimate the synchronization threshold from simulations.
    EstimateLambdaC(commands::estimate::Args),
    /// Analytic / mean-field synchronization threshold.
    LambdaC(commands::lambda_c::Args),
    /// Discrete softmax attention vs the exponential kernel, side by side.
    AttentionDemo(commands::attention_demo::Args),
    /// Associative-memory tools.
    #[command(subcommand)]
    Hopfield(commands::hopfield_cmd::HopfieldCmd),
    /// Run a named, fully configured experiment.
    Preset(commands::preset::Args),
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let ctx = Ctx { seed: cli.seed, jobs: cli.jobs, out: cli.out.clone(), scale: cli.scale };
    if ctx.jobs > 0 {
        // A failure here means a pool already exists (e.g. repeated calls
        // in tests); the run proceeds on the existing one.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(ctx.jobs).build_global();
    }
    match cli.cmd {
        Cmd::GenerateNetwork(args) => commands::generate_network::run(&args, &ctx),
        Cmd::Simulate(args) => commands::simulate::run(&args, &ctx),
        Cmd::Sweep(args) => commands::sweep::run(&args, &ctx),
        Cmd::EstimateLambdaC(args) => commands::estimate::run(&args, &ctx),
        Cmd::LambdaC(args) => commands::lambda_c::run(&args, &ctx),
        Cmd::AttentionDemo(args) => commands::attention_demo::run(&args, &ctx),
        Cmd::Hopfield(cmd) => commands::hopfield_cmd::run(&cmd, &ctx),
        Cmd::Preset(args) => commands::preset::run(&args, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse(); // clap exits 2 on usage errors itself
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
