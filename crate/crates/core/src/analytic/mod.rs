//! Analytic loss model: duty-weighted RMS currents, I²R conduction losses
//! and carrier-averaged switching losses.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::device::{DeviceError, DeviceParams, EnergyCurve};
use crate::modulation::{ModulationError, ReferenceKind, Strategy};
use crate::quadrature::QuadratureError;
use crate::report::LossReport;
use crate::types::{Direction, OperatingPoint, OperatingPointError, Switch};

mod closed_form;
mod duty;
mod switching;

pub use closed_form::{entry_status, rms_closed_form, ClosedForm, EntryStatus};
pub use duty::{
    conduction_set, duty_profile, regions, rms_quadrature, shift_half_period, share_in, Conduction,
    DutySegment, Region,
};
pub use switching::{
    attribute_events, carrier_edge_share, switching_loss_continuous, switching_loss_discrete,
    switching_loss_pair_average,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    OperatingPoint(#[from] OperatingPointError),
    #[error(transparent)]
    Modulation(#[from] ModulationError),
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("closed form not available: {0}")]
    ClosedFormRange(String),
}

/// Which gate edges are charged switching energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Attribution {
    /// Only edges that start or interrupt forward channel current, at the
    /// device's share of the load current.
    #[default]
    Hard,
    /// Every gate edge at the full load current.
    AllEdges,
}

impl fmt::Display for Attribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Attribution::Hard => "hard",
            Attribution::AllEdges => "all-edges",
        })
    }
}

impl FromStr for Attribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hard" => Ok(Attribution::Hard),
            "all-edges" | "all_edges" | "all" => Ok(Attribution::AllEdges),
            _ => Err(format!("unknown attribution `{s}` (expected hard or all-edges)")),
        }
    }
}

/// Device and energy-curve parameters shared by the analytic model and the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossModel {
    pub device: DeviceParams,
    pub e_on: EnergyCurve,
    pub e_off: EnergyCurve,
    pub attribution: Attribution,
}

impl Default for LossModel {
    fn default() -> Self {
        LossModel {
            device: DeviceParams::default(),
            e_on: EnergyCurve::TURN_ON,
            e_off: EnergyCurve::TURN_OFF,
            attribution: Attribution::Hard,
        }
    }
}

/// I²R loss of one device from its forward and reverse RMS currents.
pub fn conduction_loss(device: &DeviceParams, rms_forward: f64, rms_reverse: f64) -> f64 {
    (rms_forward * rms_forward + rms_reverse * rms_reverse) * device.rds_on
}

/// Duty profile and both RMS evaluations of one (device, direction) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ConductionEntry {
    pub device: Switch,
    pub direction: Direction,
    pub segments: Vec<DutySegment>,
    /// `None` when no closed form covers the operating point.
    pub closed_form: Option<ClosedForm>,
    pub rms_quadrature: f64,
}

impl ConductionEntry {
    /// Closed-form value where available, quadrature otherwise.
    pub fn rms(&self) -> f64 {
        self.closed_form.map_or(self.rms_quadrature, |c| c.value())
    }
}

fn closed_form_applies(op: &OperatingPoint, kind: ReferenceKind) -> bool {
    kind == ReferenceKind::Sinusoidal && (0.0..=1.0).contains(&op.m) && (0.0..=PI).contains(&op.phi)
}

pub fn conduction_entry(
    strategy: Strategy,
    device: Switch,
    direction: Direction,
    op: &OperatingPoint,
    kind: ReferenceKind,
) -> Result<ConductionEntry, AnalyticError> {
    op.validate()?;
    kind.check(op.m)?;
    let segments = duty_profile(strategy, device, direction, op.phi);
    let rms_quadrature = rms_quadrature(&segments, op, kind)?;
    let closed_form = if closed_form_applies(op, kind) {
        Some(rms_closed_form(strategy, device, direction, op)?)
    } else {
        None
    };
    Ok(ConductionEntry {
        device,
        direction,
        segments,
        closed_form,
        rms_quadrature,
    })
}

/// Analytic loss report of one leg.
///
/// S1, S2 and S5 are evaluated; S4, S3 and S6 carry the same losses half a
/// period later and are copied from them.
pub fn leg_report(
    strategy: Strategy,
    op: &OperatingPoint,
    kind: ReferenceKind,
    model: &LossModel,
) -> Result<LossReport, AnalyticError> {
    op.validate()?;
    kind.check(op.m)?;
    model.device.validate()?;
    let mut report = LossReport::new(strategy, *op);
    for sw in Switch::TOP {
        let fwd = conduction_entry(strategy, sw, Direction::Forward, op, kind)?.rms();
        let rev = conduction_entry(strategy, sw, Direction::Reverse, op, kind)?.rms();
        let switching =
            switching_loss_continuous(strategy, sw, op, &model.e_on, &model.e_off, model.attribution)?;
        for target in [sw, sw.mirror()] {
            let d = report.device_mut(target);
            d.rms_forward = fwd;
            d.rms_reverse = rev;
            d.conduction = conduction_loss(&model.device, fwd, rev);
            d.switching = switching;
        }
    }
    Ok(report)
}

/// Balanced three-phase inverter made of identical legs 120° apart.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreePhaseReport {
    /// Report shared by all three legs.
    pub leg: LossReport,
}

impl ThreePhaseReport {
    pub const LEGS: usize = 3;

    pub fn inverter_total(&self) -> f64 {
        Self::LEGS as f64 * self.leg.leg_total()
    }
}

pub fn three_phase_report(
    strategy: Strategy,
    op: &OperatingPoint,
    kind: ReferenceKind,
    model: &LossModel,
) -> Result<ThreePhaseReport, AnalyticError> {
    Ok(ThreePhaseReport {
        leg: leg_report(strategy, op, kind, model)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn conduction_loss_examples() {
        let dev = DeviceParams::default();
        assert_relative_eq!(conduction_loss(&dev, 1.0, 0.0), 0.065, max_relative = 1e-12);
        assert_eq!(conduction_loss(&dev, 0.0, 0.0), 0.0);
        assert_relative_eq!(conduction_loss(&dev, 3.0, 4.0), 1.625, max_relative = 1e-12);
    }

    #[test]
    fn dnpc_report_has_no_clamp_switching() {
        let r = leg_report(
            Strategy::Dnpc,
            &OperatingPoint::default(),
            ReferenceKind::Sinusoidal,
            &LossModel::default(),
        )
        .unwrap();
        assert_eq!(r.device(Switch::S5).switching, 0.0);
        assert_eq!(r.device(Switch::S6).switching, 0.0);
    }

    #[test]
    fn unpowered_report_is_zero() {
        let op = OperatingPoint {
            i_peak: 0.0,
            ..OperatingPoint::default()
        };
        for strategy in Strategy::ALL {
            let r = leg_report(strategy, &op, ReferenceKind::Sinusoidal, &LossModel::default()).unwrap();
            assert_eq!(r.leg_total(), 0.0);
        }
    }

    #[test]
    fn fpcm_has_lowest_total() {
        let op = OperatingPoint::default();
        let totals: Vec<f64> = Strategy::ALL
            .iter()
            .map(|&s| {
                leg_report(s, &op, ReferenceKind::Sinusoidal, &LossModel::default())
                    .unwrap()
                    .leg_total()
            })
            .collect();
        assert!(totals[3] < totals[0] && totals[3] < totals[1] && totals[3] < totals[2], "{totals:?}");
    }

    #[test]
    fn three_phase_total_is_three_legs() {
        let r = three_phase_report(
            Strategy::Sscm,
            &OperatingPoint::default(),
            ReferenceKind::Sinusoidal,
            &LossModel::default(),
        )
        .unwrap();
        assert_relative_eq!(r.inverter_total(), 3.0 * r.leg.leg_total());
    }

    #[test]
    fn attribution_parses() {
        assert_eq!("all-edges".parse::<Attribution>().unwrap(), Attribution::AllEdges);
        assert_eq!("HARD".parse::<Attribution>().unwrap(), Attribution::Hard);
        assert!("soft".parse::<Attribution>().is_err());
    }
}
