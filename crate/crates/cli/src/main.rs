//! `nakamoto`: latency–security bounds, simulation campaigns, sweeps and the
//! protocol comparison table from the command line.

mod args;
mod commands;
mod output;
mod units;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::Format;

/// Exit statuses.
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_SELF_TEST: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Parameters outside the region where a bound applies.
    Infeasible(String),
    /// Unparseable flags, bad values, unreadable or malformed config.
    Input(String),
    Io(std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Input(_) => EXIT_INPUT,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Infeasible(m) => write!(f, "infeasible parameters: {m}"),
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<nakamoto_bounds::Error> for CliError {
    fn from(e: nakamoto_bounds::Error) -> Self {
        use nakamoto_bounds::Error as E;
        match e {
            E::Infeasible(m) => CliError::Infeasible(m),
            E::Singular(_) | E::Bracket(_) => CliError::Infeasible(e.to_string()),
            E::Domain(_) | E::InsufficientData { .. } => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A rendered result plus, for self-checking runs, why the check failed.
pub struct Outcome {
    pub output: output::Output,
    pub failure: Option<String>,
}

impl From<output::Output> for Outcome {
    fn from(output: output::Output) -> Self {
        Outcome { output, failure: None }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let default_format = match cli.command {
        Command::Sweep(_) | Command::ProtocolTable(_) => Format::Csv,
        _ => Format::Json,
    };
    let format = cli.format.unwrap_or(default_format);
    let result = match &cli.command {
        Command::Bound(a) => commands::bound(a).map(Outcome::from),
        Command::Latency(a) => commands::latency(a).map(Outcome::from),
        Command::Sweep(a) => commands::sweep(a).map(Outcome::from),
        Command::Simulate(a) => commands::simulate(a, cli.seed),
        Command::ProtocolTable(a) => commands::protocol_table(a),
    };
    match result.and_then(|o| {
        o.output.emit(format, cli.out.as_deref())?;
        Ok(o.failure)
    }) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(why)) => {
            eprintln!("check failed: {why}");
            ExitCode::from(EXIT_SELF_TEST)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
