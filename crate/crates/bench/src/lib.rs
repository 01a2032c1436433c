//! Shared fixtures for the loss-model benchmarks.

use anpc_core::{LossModel, OperatingPoint, SimConfig, Strategy};

/// The default study case.
pub fn study_case() -> (OperatingPoint, LossModel) {
    (OperatingPoint::default(), LossModel::default())
}

/// Simulator settings at the study case with `steps` samples per carrier period.
pub fn sim_config(strategy: Strategy, steps: usize) -> SimConfig {
    let mut cfg = SimConfig::new(strategy, OperatingPoint::default());
    cfg.steps_per_carrier = steps;
    cfg
}
