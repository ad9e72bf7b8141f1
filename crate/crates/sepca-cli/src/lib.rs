//! Std companion to the `sepca` crate: matrix file formats, noise level
//! estimation, the Monte Carlo benchmark harness, and detection boundary
//! curve evaluation. The `sepca` binary in this crate fronts all of it.

pub mod bench;
pub mod config;
pub mod io;
pub mod sigma;

use std::fmt;

/// Process-level failure classes; each carries the exit code the binary
/// reports.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration, flags, or parameter ranges. Exit code 2.
    Config(String),
    /// File system or encoding problems. Exit code 3.
    Io(String),
    /// Numerical failure inside a computation. Exit code 4.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError::Io(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        CliError::Numeric(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Library errors signal numerical trouble only for the solver bracket; the
/// remaining variants reflect bad inputs.
pub fn from_core(err: sepca::Error) -> CliError {
    match err {
        sepca::Error::BracketExpansion { .. } => CliError::numeric(err.to_string()),
        _ => CliError::config(err.to_string()),
    }
}
