//! Command-line driver for the loop-gas engine.
//!
//! Four subcommands cover the workflow: `build` prints the construction
//! parameters and geometry of a code family, `run` executes a seeded
//! experiment described by a TOML config file and writes CSV/JSONL outputs
//! plus a digest manifest, `oracle` emits exact reference computations as
//! JSON, and `fixtures-check` re-verifies the digests recorded in a run
//! manifest.
//!
//! Exit codes are scriptable: 0 success, 1 I/O or integrity failure,
//! 2 configuration error, 3 size or safety guard refusal, 4 sampler
//! failure.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use loopgas_core::error::Error;

mod build_cmd;
mod config;
mod manifest;
mod oracle_cmd;
mod run_cmd;

#[derive(Debug, Parser)]
#[command(
    name = "loopgas",
    version,
    about = "Gibbs samplers and experiment drivers for syndrome loop gases"
)]
struct Cli {
    /// Worker threads for replica-parallel experiments
    /// (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print size, rank, sparsity, and amenability data for a code family.
    Build(build_cmd::BuildArgs),
    /// Run a seeded experiment from a config file and write outputs.
    Run(run_cmd::RunArgs),
    /// Emit an exact oracle computation as JSON.
    Oracle(oracle_cmd::OracleArgs),
    /// Recompute and verify the output digests in a run manifest.
    FixturesCheck(manifest::CheckArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot size the thread pool: {err}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Build(args) => build_cmd::run(&args),
        Command::Run(args) => run_cmd::run(&args),
        Command::Oracle(args) => oracle_cmd::run(&args),
        Command::FixturesCheck(args) => {
            return match manifest::check(&args) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::FAILURE,
                Err(err) => {
                    eprintln!("error: {err}");
                    ExitCode::from(exit_code(&err))
                }
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Maps engine errors onto the documented exit codes.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::UnsupportedCode(_) => 2,
        Error::SizeGuard { .. } | Error::Guard(_) | Error::NotErasable { .. } => 3,
        Error::SamplerFailure(_) | Error::NoSolution => 4,
        Error::Io(_) | Error::Serialize(_) => 1,
    }
}
