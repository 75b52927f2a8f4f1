mod analyze;
mod common;
mod robustness;
mod so3;
mod theory;
mod train;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use common::Format;

/// Population-code output layers: theory, training, robustness sweeps and SO(3) codes.
#[derive(Debug, Parser)]
#[command(name = "popcode", version, about)]
pub struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, env = "POPCODE_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for parallel runs (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Format of tabular output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Predicted failure rates and thresholds for 1-layer networks.
    Theory(theory::Args),
    /// Train one network on the 1-pixel task and save it.
    Train(train::Args),
    /// Train many networks and measure their failure rates under impulse noise.
    Robustness(robustness::Args),
    /// Information flow, sparsity and final-layer extremes of saved models.
    Analyze(analyze::Args),
    /// Encode and decode 3D orientations.
    So3(so3::Args),
}

/// What a command achieved when it did not hit a hard error.
pub enum Outcome {
    Complete,
    /// Some runs failed; results cover the rest.
    Partial,
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    let ctx = common::Context { seed: cli.seed, format: cli.format, command: &cli.command };
    let result = match &cli.command {
        Command::Theory(args) => theory::run(args, &ctx),
        Command::Train(args) => train::run(args, &ctx),
        Command::Robustness(args) => robustness::run(args, &ctx),
        Command::Analyze(args) => analyze::run(args, &ctx),
        Command::So3(args) => so3::run(args, &ctx),
    };
    match result {
        Ok(Outcome::Complete) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<popcode::Error>().is_some_and(|e| matches!(e, popcode::Error::Domain(_))) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
