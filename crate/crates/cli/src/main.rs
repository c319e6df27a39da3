mod args;
mod commands;
mod config;
mod dataset;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::FileConfig;
use error::{CliError, CliResult};

fn run(cli: &Cli) -> CliResult<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let rendered = match &cli.command {
        Command::Table(a) => commands::table(a, &file)?,
        Command::Pvalue(a) => commands::pvalue(a, &file)?,
        Command::Predict(a) => commands::predict(a, &file)?,
        Command::Validate(a) => commands::validate(a, &file)?,
        Command::Dominate(a) => commands::dominate(a, &file)?,
    };
    println!("{}", rendered.text);
    if rendered.passed {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("irp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
