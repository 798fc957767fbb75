mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};
use error::CliError;

fn run(cli: &Cli) -> Result<bool, CliError> {
    let command = &cli.command;
    command.validate()?;
    let outcome = match command {
        Command::GroupCheck(a) => commands::group_check(a),
        Command::JetCheck(a) => commands::jet_check(a),
        Command::Distortion(a) => commands::distortion(a),
        Command::Obstruction(a) => commands::obstruction(a),
        Command::Scaling(a) => commands::scaling(a),
        Command::Stokes(a) => commands::stokes(a),
        Command::Comass(a) => commands::comass(a),
    }?;

    for c in &outcome.checks {
        eprintln!(
            "{} {}: {:.6e} {} {:.6e}",
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            c.value,
            c.relation,
            c.limit
        );
    }
    let common = command.common();
    let text = match common.format {
        Format::Json => output::render_json(command.name(), &command.config()?, &outcome)?,
        Format::Csv => output::render_csv(&outcome)?,
    };
    output::emit(&text, common.out.as_deref())?;
    Ok(outcome.pass())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
