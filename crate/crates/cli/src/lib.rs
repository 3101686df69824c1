//! Command-line workflows over the `frustsim` library.

pub mod commands;
pub mod config;
pub mod error;
pub mod plot;

use clap::{Parser, Subcommand};

use crate::config::OutArgs;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "frustsim", version, about = "Quench, coarsen, analyze and shim frustrated Ising lattices")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Anneal a small lattice across a sweep of anneal times and sample it.
    Quench {
        #[command(flatten)]
        args: commands::quench::QuenchArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Six-state clock-model coarsening on a honeycomb lattice.
    Coarsen {
        #[command(flatten)]
        args: commands::coarsen::CoarsenArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Order parameters, defects, correlation lengths and power-law fits.
    Analyze {
        #[command(flatten)]
        args: commands::analyze::AnalyzeArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Closed-loop calibration of a mock sampler with hidden errors.
    Shim {
        #[command(flatten)]
        args: commands::shim::ShimArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Quench { args, out } => commands::quench::run(args, &out.out),
        Command::Coarsen { args, out } => commands::coarsen::run(args, &out.out),
        Command::Analyze { args, out } => commands::analyze::run(args, &out.out),
        Command::Shim { args, out } => commands::shim::run(args, &out.out),
    }
}
