#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod epi_check;
mod error;
mod expr;
mod run;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Mesh(a) => run::mesh(&a),
        Command::Solve { problem, args } => run::solve(problem, &args),
        Command::Study(a) => run::study(&a),
        Command::EpiCheck(a) => epi_check::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
