mod args;
mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::Settings;
use error::CliResult;

fn run(cli: &Cli) -> CliResult<()> {
    let command_line = std::iter::once("gravidec".to_string())
        .chain(std::env::args().skip(1))
        .collect::<Vec<_>>()
        .join(" ");
    let settings = Settings::resolve(&cli.global, command_line)?;
    let mut out = output::sink(&settings)?;
    match &cli.command {
        Command::Rate(a) => commands::rate::run(a, &settings, &mut *out)?,
        Command::Scenario(a) => commands::scenario::run(a, &settings, &mut *out)?,
        Command::Evolve(a) => commands::evolve::run(a, &settings, &mut *out)?,
        Command::Kernel(a) => commands::kernel::run(a, &settings, &mut *out)?,
        Command::Ball(a) => commands::ball::run(a, &settings, &mut *out)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
