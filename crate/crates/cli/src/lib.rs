//! Command-line experiment runner for `blpinn`: configuration, sweeps, error
//! tables and field dumps. The `blpinn` binary is a thin layer over this crate.

pub mod config;
pub mod fields;
pub mod runner;
pub mod table;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("training aborted: {0}")]
    Training(#[source] blpinn::Error),
    #[error("i/o: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

impl CliError {
    /// 2 configuration, 3 training abort, 4 I/O (unreadable inputs included).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Training(_) => 3,
            CliError::Io(_) | CliError::Parse(_) => 4,
        }
    }
}
