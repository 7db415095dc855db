//! `stringcat`: encode a high-cardinality string column from a CSV file.

mod commands;
mod config;
mod error;
mod ingest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{CommonArgs, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "stringcat", version, about = "Encode high-cardinality string categories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    args: CommonArgs,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Fit a gamma-poisson model and save it to --model.
    Fit,
    /// Encode --input with the saved model in --model.
    Transform,
    /// Fit (if needed) and encode --input in one pass.
    Encode,
    /// Write a synthetic categorical column.
    Simulate,
    /// Fit on --input and report how well the base labels are separated.
    Recover,
    /// Measure false positives of the min-hash inclusion test.
    InclusionBench,
    /// Print the inferred feature names of each gamma-poisson dimension.
    Topics,
}

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("STRINGCAT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::config(format!("STRINGCAT_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    let cfg = RunConfig::resolve(&cli.args)?;
    match cli.command {
        Command::Fit => commands::fit(&cfg),
        Command::Transform => commands::transform(&cfg),
        Command::Encode => commands::encode(&cfg),
        Command::Simulate => commands::simulate(&cfg),
        Command::Recover => commands::recover(&cfg),
        Command::InclusionBench => commands::inclusion_bench(&cfg),
        Command::Topics => commands::topics(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: usage: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.kind == error::BROKEN_PIPE => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
