//! `cmcf`: prepare library instances, run solvers, benchmark.

mod bench;
mod config;
mod error;
mod solve;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command};
use error::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cmcf_lp::Backend::from_env()
        .map_err(|e| CliError::Input(e.to_string()))
        .and_then(|_| match cli.command {
            Command::Prepare(args) => solve::prepare(&args),
            Command::Solve(args) => solve::solve(&args),
            Command::Bench(args) => bench::bench(&args),
        });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
