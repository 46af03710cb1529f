//! `skewfiber` command-line front end.

mod args;
mod commands;
mod error;
mod inputs;
mod output;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command};
use error::{CliError, CliResult};
use output::OutDir;

fn run(cli: &Cli) -> CliResult<()> {
    let out_path = match &cli.command {
        Command::Brjuno(a) => &a.out.out,
        Command::Normalize(a) => &a.out.out,
        Command::Cremer(a) => &a.out.out,
        Command::Orbit(a) => &a.out.out,
        Command::Slice(a) => &a.out.out,
        Command::Hypotheses(a) => &a.out.out,
        Command::Petals(a) => &a.out.out,
    };
    let out = OutDir::create(out_path)?;
    let outcome = match &cli.command {
        Command::Brjuno(a) => commands::brjuno(a, &out)?,
        Command::Normalize(a) => commands::normalize_cmd(a, &out)?,
        Command::Cremer(a) => commands::cremer(a, &out)?,
        Command::Orbit(a) => commands::orbit(a, &out)?,
        Command::Slice(a) => commands::slice(a, &out)?,
        Command::Hypotheses(a) => commands::hypotheses(a, &out)?,
        Command::Petals(a) => commands::petals(a, &out)?,
    };
    let config = serde_json::to_value(&cli.command).map_err(|source| CliError::Json {
        context: "config".into(),
        source,
    })?;
    let summary = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "results": outcome.results,
        "residuals": outcome.residuals,
    });
    out.write_json("summary.json", &summary)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
