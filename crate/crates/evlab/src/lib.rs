//! Command-line laboratory around `evlab-core`: scans, refinement studies,
//! theorem-check suites and oracle comparisons, written as JSON reports.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;
pub mod report;
pub mod suites;

use std::fmt;

use evlab_core::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NUMERIC: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Numeric(_) | Failure::Io(_) => EXIT_NUMERIC,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Numeric(m) => write!(f, "numeric failure: {m}"),
            Failure::Io(m) => write!(f, "i/o failure: {m}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::DisconnectedGraph
            | Error::NonPositiveLength { .. }
            | Error::DirectionViolated { .. }
            | Error::OutOfDomain { .. }
            | Error::MuZero
            | Error::DimensionMismatch { .. }
            | Error::InvalidVector(_)
            | Error::InvalidMatrix(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: cli::Cli) -> Result<u8, Failure> {
    use cli::Command;
    match cli.command {
        Command::Gallery(a) => commands::gallery(&a),
        Command::Scan(a) => commands::scan(&a),
        Command::Refine(a) => commands::refine(&a),
        Command::Check(a) => commands::check(&a),
        Command::Oracle(a) => commands::oracle(&a),
    }
}
