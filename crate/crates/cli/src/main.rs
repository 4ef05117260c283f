//! `varsens` command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure or replay mismatch, 2 usage or
//! configuration error.

mod cli;
mod commands;
mod manifest;
mod rate;

use clap::Parser;
use std::process::ExitCode;

use cli::Cli;
use commands::{run, Context, Status};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args_os().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = Cli::parse();
    let result = Context::from_cli(&cli, argv).and_then(|ctx| {
        let produced = run(&cli, &ctx)?;
        produced.emit(cli.command.name())?;
        Ok(produced.status)
    });
    match result {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::Failure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
