//! Command-line driver: limit-kernel evaluation, path simulation,
//! Gaussian-process sampling, replicated verification, and tail-index
//! estimation for heavy-tailed urn schemes.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 for
//! usage and configuration errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::Overrides;
use config::OutputFormat;

#[derive(Parser)]
#[command(
    name = "karlin",
    version,
    about = "Occupancy statistics for heavy-tailed urn schemes: limit kernels, simulation, verification",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Replace the master seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Size of the worker thread pool for replicated runs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for result files; overrides the config and the
    /// KARLIN_OUT_DIR environment variable.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Write results in a single format only.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the limit covariance kernel at a point or on a grid.
    Theory(commands::TheoryArgs),
    /// Simulate occupancy paths and write raw and normalized counts.
    Simulate {
        /// Experiment config file.
        config: PathBuf,
    },
    /// Sample Gaussian limit paths with the grid kernel covariance.
    Gp {
        /// Experiment config file.
        config: PathBuf,
    },
    /// Run the replicated verification experiment and report verdicts.
    Verify {
        /// Experiment config file.
        config: PathBuf,
    },
    /// Estimate the tail index from replicated endpoint counts.
    Estimate {
        /// Experiment config file.
        config: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
    }
    let overrides = Overrides { seed: cli.seed, out_dir: cli.out_dir.clone(), format: cli.format };
    let result = match &cli.command {
        Command::Theory(args) => commands::theory(args, &overrides),
        Command::Simulate { config } => commands::simulate(config, &overrides),
        Command::Gp { config } => commands::gp(config, &overrides),
        Command::Verify { config } => commands::verify(config, &overrides),
        Command::Estimate { config } => commands::estimate(config, &overrides),
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}
