//! Command implementations behind the `ifatune` binary.
//!
//! Exit status: 0 success, 1 configuration or usage error, 2 I/O error,
//! 3 infeasible or unsolvable synthesis, 4 calibration not acceptable.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] ifa_tune::Error),
    #[error("{warning}")]
    Calibration { report: String, warning: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use ifa_tune::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Io { .. } => 2,
            CliError::Model(E::InfeasibleTarget { .. } | E::Convergence { .. }) => 3,
            CliError::Model(E::Domain(_) | E::BandPlan(_)) => 1,
            CliError::Calibration { .. } => 4,
        }
    }
}
