//! Conduction and switching loss model for one leg of a three-level active
//! neutral point clamped (3L-ANPC) inverter built from GaN HEMTs.
//!
//! The crate has two independent routes to the same numbers:
//!
//! * [`analytic`] integrates per-device duty profiles against a sinusoidal
//!   load current (closed forms plus adaptive quadrature) and averages the
//!   switching energy over the carrier-modulated intervals.
//! * [`oracle`] steps a gate-level model of the leg through one fundamental
//!   period, resolves the conducting paths at every sample and accumulates
//!   RMS currents and commutation energies.
//!
//! [`modulation`] supplies the four carrier-based gating strategies shared by
//! both routes and [`device`] holds the transistor parameters and energy
//! curves.

pub mod analytic;
pub mod device;
pub mod modulation;
pub mod oracle;
pub mod quadrature;
mod report;
mod types;

pub use analytic::{leg_report, three_phase_report, Attribution, LossModel, ThreePhaseReport};
pub use device::{DeviceParams, EnergyCurve, EnergySample};
pub use modulation::{CommutationEvent, Edge, GateVector, ReferenceKind, Strategy};
pub use oracle::{simulate_leg, SimConfig, SimTrace};
pub use report::{DeviceLoss, LossReport};
pub use types::{load_current, Direction, OperatingPoint, OperatingPointError, Switch};
