//! Verification campaigns over the `symwrap` embeddings: JSON reports, CSV
//! tables, SVG figures and PGM rasters.

pub mod commands;
pub mod report;
pub mod spec;
pub mod svg;

use std::fmt;
use std::path::PathBuf;

pub use commands::{run, Outcome};
pub use report::{Check, Report, SCHEMA_VERSION};
pub use spec::{Command, Format, RunSpec, Tolerances};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: PathBuf, source: std::io::Error },
    Compute(symwrap::Error),
}

impl CliError {
    /// Process exit status: 2 for usage or configuration errors, 3 for I/O, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Compute(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io { path, source } => write!(f, "i/o error at {}: {source}", path.display()),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<symwrap::Error> for CliError {
    fn from(e: symwrap::Error) -> Self {
        match e {
            symwrap::Error::Config(_) | symwrap::Error::InvalidArgument(_) => CliError::Usage(e.to_string()),
            other => CliError::Compute(other),
        }
    }
}
