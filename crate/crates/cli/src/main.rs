use std::process::ExitCode;

use aniso_cli::args::Cli;
use aniso_cli::commands::CliError;
use clap::error::ErrorKind;
use clap::{Command, CommandFactory, Parser};

/// The built command tree narrowed to the subcommand named on the command
/// line, if any, so usage text names the full invocation.
fn usage_target(name: Option<&str>) -> Command {
    let mut cmd = Cli::command();
    cmd.build();
    match name.and_then(|n| cmd.find_subcommand(n).cloned()) {
        Some(sub) => sub,
        None => cmd,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            // value errors carry no usage line of their own
            let rendered = e.render().to_string();
            let _ = e.print();
            if !rendered.contains("Usage:") {
                let sub = std::env::args().nth(1);
                eprintln!("\n{}", usage_target(sub.as_deref()).render_usage());
            }
            return ExitCode::from(2);
        }
    };
    match aniso_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage { command, message }) => usage_target(Some(command)).error(ErrorKind::ArgumentConflict, message).exit(),
        Err(CliError::ChecksFailed) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
