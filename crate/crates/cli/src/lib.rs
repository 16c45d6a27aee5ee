//! Command-line front end: argument handling, input loading, report emission
//! and the fixture corpus runner.

pub mod args;
pub mod commands;
pub mod corpus;
pub mod report;

use std::path::{Path, PathBuf};

use clap::Parser;
use thiserror::Error;

use dynpair::assign::AssignError;
use dynpair::format::FormatError;
use dynpair::gamma::GammaError;
use dynpair::relation::RelationError;
use dynpair::{CbError, ShiftError};

pub use report::SCHEMA_VERSION;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format {
        path: PathBuf,
        source: FormatError,
    },
    #[error("resource budget exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Shift(ShiftError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Assign(AssignError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Cb(#[from] CbError),
    #[error("no fixtures found in {0}")]
    MissingFixture(PathBuf),
}

impl From<ShiftError> for CliError {
    fn from(e: ShiftError) -> Self {
        match e {
            ShiftError::ResourceExceeded(_) | ShiftError::NoConvergence => CliError::Budget(e.to_string()),
            e => CliError::Shift(e),
        }
    }
}

impl From<AssignError> for CliError {
    fn from(e: AssignError) -> Self {
        match e {
            AssignError::Shift(s) => s.into(),
            e => CliError::Assign(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Budget(_) => 2,
            _ => 1,
        }
    }
}

/// Everything a run writes, so the corpus runner can compare it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `argv` (program name first), resolving relative
/// paths against `base`.
pub fn run<S: AsRef<str>>(argv: &[S], base: &Path) -> Outcome {
    let argv: Vec<String> = argv.iter().map(|s| s.as_ref().to_string()).collect();
    let cli = match args::Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return Outcome { code, stdout, stderr };
        }
    };
    if cli.version {
        return Outcome {
            code: 0,
            stdout: format!("dynpair {} (schemaVersion {SCHEMA_VERSION})\n", env!("CARGO_PKG_VERSION")),
            stderr: String::new(),
        };
    }
    let Some(command) = cli.command else {
        return Outcome {
            code: 1,
            stdout: String::new(),
            stderr: "error: a subcommand is required (see --help)\n".into(),
        };
    };
    let echo: Vec<String> = argv.iter().skip(1).cloned().collect();
    match commands::dispatch(&command, &echo, base) {
        Ok(out) => out,
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
