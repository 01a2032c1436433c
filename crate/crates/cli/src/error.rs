use anpc_core::analytic::AnalyticError;
use anpc_core::oracle::OracleError;
use anpc_core::Strategy;
use thiserror::Error;

use crate::config::ConfigError;
use crate::output::{OutputError, ReadError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{strategy}: {source}")]
    Analysis {
        strategy: Strategy,
        source: AnalyticError,
    },
    #[error("{strategy}: {source}")]
    Simulation {
        strategy: Strategy,
        source: OracleError,
    },
    #[error(transparent)]
    Read(#[from] ReadError),
    #[error(transparent)]
    Write(#[from] OutputError),
    #[error("{0}")]
    Fit(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Tolerance(String),
}

impl CliError {
    /// 1 for invalid input, 2 for a tolerance failure, 3 for a simulator abort.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Tolerance(_) => 2,
            CliError::Simulation { source, .. } if source.is_structural() => 3,
            _ => 1,
        }
    }
}
