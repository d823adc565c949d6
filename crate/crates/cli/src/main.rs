mod args;
mod commands;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

#[derive(Debug)]
pub enum CliError {
    Core(qdiv_core::Error),
    /// Unreadable input or bad arguments.
    Input(String),
    /// Output could not be written.
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use qdiv_core::Error as E;
        match self {
            CliError::Input(_) => 2,
            CliError::Output(_) => 1,
            CliError::Core(e) => match e {
                E::InvalidInput(_)
                | E::NotHermitian { .. }
                | E::NonFinite { .. }
                | E::UnsupportedDimension { .. }
                | E::NotTracePreserving { .. } => 2,
                E::NotInPauliClass { .. } => 3,
                E::SingularProcess { .. } => 4,
                E::NonConvergence { .. } | E::InternalConsistency(_) => 1,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(msg) | CliError::Output(msg) => f.write_str(msg),
        }
    }
}

impl From<qdiv_core::Error> for CliError {
    fn from(e: qdiv_core::Error) -> Self {
        CliError::Core(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qdiv: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
