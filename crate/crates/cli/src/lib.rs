//! Command-line front end for `aniso-core`: bound sweeps, grid export,
//! verification suites and Taylor coefficients.

pub mod args;
pub mod commands;
pub mod grid_file;
pub mod table;
pub mod verify;

use args::{Cli, Command, VerifyArgs};
use commands::{write_output, CliError};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Bounds(a) => commands::cmd_bounds(a),
        Command::Map(a) => commands::cmd_map(a),
        Command::Taylor(a) => commands::cmd_taylor(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let report = verify::run(args.suite, args.seed)?;
    let text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    write_output(args.out.as_deref(), &text)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}
