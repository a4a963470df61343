//! Desk-scale experiments on top of `lcl-core`: text formats for matrices,
//! profiles and codes, Wilson intervals, the seeded Monte Carlo harness, the
//! `verify-lemmas` checks and process trace export. The `lcl` binary is a thin
//! wrapper over this crate.

pub mod experiment;
pub mod format;
pub mod stats;
pub mod trace;
pub mod verify;

use std::io;

/// Errors surfaced by the harness and the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] lcl_core::Error),
    /// A core error raised while simulating one grid rate.
    #[error("at rate {rate}: {source}")]
    AtRate { rate: String, source: lcl_core::Error },
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    fn core(&self) -> Option<&lcl_core::Error> {
        match self {
            Error::Core(e) | Error::AtRate { source: e, .. } => Some(e),
            _ => None,
        }
    }

    /// Process exit code: 2 for cap violations, 3 for invariant violations,
    /// 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self.core() {
            Some(lcl_core::Error::CapExceeded { .. }) => 2,
            Some(lcl_core::Error::InvariantViolation(_)) => 3,
            _ => 1,
        }
    }
}

pub fn read_file(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })
}

pub fn write_file(path: &str, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io { path: path.into(), source })
}
