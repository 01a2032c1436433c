//! Gate-level reference simulator used to check the analytic model.

use thiserror::Error;

use crate::modulation::{GateVector, ModulationError};
use crate::types::OperatingPointError;

mod compare;
mod sim;
mod topology;

pub use compare::{compare_reports, relative_error, Comparison, DEFAULT_THRESHOLD};
pub use sim::{simulate_leg, simulated_losses, trace_rms, SimConfig, SimTrace};
pub use topology::{conduction_paths, conduction_paths_after, output_paths, rail_short_check, Node, Path, PathTable, EDGES};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("rail short at θ = {theta} rad with gates {gates}")]
    RailShort { theta: f64, gates: GateVector },
    #[error("no conducting path at θ = {theta} rad with gates {gates}")]
    NoPath { theta: f64, gates: GateVector },
    #[error("invalid simulator configuration: {0}")]
    InvalidConfig(String),
    #[error("reports cannot be compared: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Modulation(#[from] ModulationError),
    #[error(transparent)]
    OperatingPoint(#[from] OperatingPointError),
}

impl OracleError {
    /// True for aborts caused by the gate pattern itself.
    pub fn is_structural(&self) -> bool {
        matches!(self, OracleError::RailShort { .. } | OracleError::NoPath { .. })
    }
}
