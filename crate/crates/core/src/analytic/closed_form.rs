//! Closed-form RMS currents for a sinusoidal reference.
//!
//! Every entry is written as `I_p/√(2π) · √X`. Two versions of `X` exist per
//! entry: the expression as originally printed in the loss table (`printed`)
//! and one re-derived from the duty profiles (`derived`). Entries whose
//! printed form disagrees with quadrature are marked [`EntryStatus::Corrected`]
//! and listed in `docs/rms-closed-form-corrections.md`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::modulation::Strategy;
use crate::types::{Direction, OperatingPoint, Switch};

use super::AnalyticError;

/// Whether the printed expression of an entry reproduces its duty profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntryStatus {
    Verified,
    Corrected,
}

/// Both closed-form evaluations of one (device, direction) entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    /// RMS from the printed expression; NaN when its radicand is negative.
    pub printed: f64,
    /// RMS from the re-derived expression.
    pub derived: f64,
    pub status: EntryStatus,
}

impl ClosedForm {
    /// The value to use: the printed form when verified, else the derived one.
    pub fn value(&self) -> f64 {
        match self.status {
            EntryStatus::Verified => self.printed,
            EntryStatus::Corrected => self.derived,
        }
    }
}

/// Static classification of each entry; lower devices follow their mirror.
pub fn entry_status(strategy: Strategy, device: Switch, direction: Direction) -> EntryStatus {
    let top = top_device(device);
    match (strategy, top, direction) {
        (_, Switch::S1, _) => EntryStatus::Verified,
        (Strategy::Dnpc, Switch::S2, Direction::Reverse) => EntryStatus::Verified,
        // DNPC has no S5 forward entry; the empty entry is trivially right.
        (Strategy::Dnpc, Switch::S5, Direction::Forward) => EntryStatus::Verified,
        _ => EntryStatus::Corrected,
    }
}

fn top_device(device: Switch) -> Switch {
    if Switch::TOP.contains(&device) {
        device
    } else {
        device.mirror()
    }
}

struct Terms {
    m: f64,
    phi: f64,
    c: f64,
    s2: f64,
    k_plus: f64,
    k_minus: f64,
    l_phi: f64,
    l_pi: f64,
}

impl Terms {
    fn new(m: f64, phi: f64) -> Self {
        let c = phi.cos();
        let s2 = (2.0 * phi).sin();
        Terms {
            m,
            phi,
            c,
            s2,
            k_plus: m * (1.0 + c).powi(2) / 3.0,
            k_minus: m * (1.0 - c).powi(2) / 3.0,
            l_phi: phi / 2.0 - s2 / 4.0,
            l_pi: (PI - phi) / 2.0 + s2 / 4.0,
        }
    }
}

fn printed_radicand(strategy: Strategy, device: Switch, direction: Direction, t: &Terms) -> f64 {
    use Direction::{Forward as F, Reverse as R};
    use Switch::*;
    let Terms {
        m, phi, c, s2, ..
    } = *t;
    let k_minus_printed = m * (c - 1.0).powi(2) / 3.0;
    match (strategy, device, direction) {
        (_, S1, F) => m * (c + 1.0).powi(2) / 3.0,
        (_, S1, R) => k_minus_printed,

        (Strategy::Dnpc, S2, F) => FRAC_PI_2 * (m * c - 1.0).powi(2) / 3.0,
        (Strategy::Dnpc, S2, R) => k_minus_printed,
        (Strategy::Dnpc, S5, F) => 0.0,
        (Strategy::Dnpc, S5, R) => FRAC_PI_2 - 2.0 * m / 3.0 * (1.0 + c).powi(2),

        (Strategy::Sscm, S2, F) => FRAC_PI_2 * (phi / 2.0) * (s2 / 4.0),
        (Strategy::Sscm, S2, R) => FRAC_PI_2 * (s2 / 4.0),
        (Strategy::Sscm, S5, F) => (phi / 2.0) * (s2 / 4.0) - k_minus_printed,
        (Strategy::Sscm, S5, R) => FRAC_PI_2 * (phi / 2.0) * (s2 / 4.0) - k_minus_printed,

        (Strategy::Oscm, S2, F) => 4.0 * m * c / 3.0,
        (Strategy::Oscm, S2, R) => {
            FRAC_PI_2 * (phi / 2.0) + s2 / 4.0 - k_minus_printed - m * (c + 1.0).powi(2) / 3.0
        }
        (Strategy::Oscm, S5, F) => FRAC_PI_2 * (phi / 2.0) + s2 / 4.0 - m * (c + 1.0).powi(2) / 3.0,
        (Strategy::Oscm, S5, R) => (phi / 2.0) * (s2 / 4.0) - k_minus_printed,

        (Strategy::Fpcm, S2, F) => PI / 8.0 + m * c,
        (Strategy::Fpcm, S2, R) => PI / 8.0 * m * (c + 1.0).powi(2) / 12.0,
        (Strategy::Fpcm, S5, F) | (Strategy::Fpcm, S5, R) => PI / 8.0 - m * c / 3.0,

        _ => unreachable!("only top devices have printed entries"),
    }
}

fn derived_radicand(strategy: Strategy, device: Switch, direction: Direction, t: &Terms) -> f64 {
    use Direction::{Forward as F, Reverse as R};
    use Switch::*;
    let Terms {
        m,
        c,
        k_plus,
        k_minus,
        l_phi,
        l_pi,
        ..
    } = *t;
    match (strategy, device, direction) {
        (_, S1, F) => k_plus,
        (_, S1, R) => k_minus,

        (Strategy::Dnpc, S2, F) => FRAC_PI_2 - k_minus,
        (Strategy::Dnpc, S2, R) => k_minus,
        (Strategy::Dnpc, S5, F) => 0.0,
        (Strategy::Dnpc, S5, R) => FRAC_PI_2 - 2.0 * m * (1.0 + c * c) / 3.0,

        (Strategy::Sscm, S2, F) => l_pi,
        (Strategy::Sscm, S2, R) => l_phi,
        (Strategy::Sscm, S5, F) => l_phi - k_minus,
        (Strategy::Sscm, S5, R) => l_pi - k_plus,

        (Strategy::Oscm, S2, F) => 4.0 * m * c / 3.0 + l_phi,
        (Strategy::Oscm, S2, R) => l_pi - 4.0 * m * c / 3.0,
        (Strategy::Oscm, S5, F) => l_pi - k_plus,
        (Strategy::Oscm, S5, R) => l_phi - k_minus,

        (Strategy::Fpcm, S2, F) => PI / 8.0 + m * (1.0 + 4.0 * c + c * c) / 6.0,
        (Strategy::Fpcm, S2, R) => PI / 8.0 + m * (1.0 - 4.0 * c + c * c) / 6.0,
        (Strategy::Fpcm, S5, F) | (Strategy::Fpcm, S5, R) => PI / 8.0 - m * (1.0 + c * c) / 6.0,

        _ => unreachable!("only top devices have derived entries"),
    }
}

fn rms_from_radicand(i_peak: f64, x: f64) -> f64 {
    if x < 0.0 {
        // Round-off can push an exact zero slightly negative.
        if x > -1e-12 {
            return 0.0;
        }
        return f64::NAN;
    }
    i_peak / TAU.sqrt() * x.sqrt()
}

/// Closed-form RMS of `device` in `direction` for a sinusoidal reference.
///
/// Lower devices use their upper mirror, which carries the same RMS current.
/// Only load angles in [0, π] are covered.
pub fn rms_closed_form(
    strategy: Strategy,
    device: Switch,
    direction: Direction,
    op: &OperatingPoint,
) -> Result<ClosedForm, AnalyticError> {
    op.validate()?;
    if !(0.0..=1.0).contains(&op.m) {
        return Err(AnalyticError::ClosedFormRange(format!(
            "modulation index {} outside [0, 1]",
            op.m
        )));
    }
    if !(0.0..=PI).contains(&op.phi) {
        return Err(AnalyticError::ClosedFormRange(format!(
            "load angle {} rad outside [0, π]",
            op.phi
        )));
    }
    let top = top_device(device);
    let t = Terms::new(op.m, op.phi);
    Ok(ClosedForm {
        printed: rms_from_radicand(op.i_peak, printed_radicand(strategy, top, direction, &t)),
        derived: rms_from_radicand(op.i_peak, derived_radicand(strategy, top, direction, &t)),
        status: entry_status(strategy, device, direction),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dnpc_s1_forward_anchor() {
        let op = OperatingPoint {
            m: 1.0,
            phi: 0.0,
            i_peak: 1.0,
            ..OperatingPoint::default()
        };
        let cf = rms_closed_form(Strategy::Dnpc, Switch::S1, Direction::Forward, &op).unwrap();
        assert_relative_eq!(cf.value(), (4.0f64 / 3.0).sqrt() / TAU.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(cf.value(), 0.4607, max_relative = 1e-4);
    }

    #[test]
    fn zero_modulation_zeroes_s1() {
        let op = OperatingPoint {
            m: 0.0,
            ..OperatingPoint::default()
        };
        let cf = rms_closed_form(Strategy::Dnpc, Switch::S1, Direction::Forward, &op).unwrap();
        assert_eq!(cf.value(), 0.0);
    }

    #[test]
    fn out_of_range_angle_is_rejected() {
        let op = OperatingPoint {
            phi: 4.0,
            ..OperatingPoint::default()
        };
        assert!(rms_closed_form(Strategy::Sscm, Switch::S2, Direction::Forward, &op).is_err());
    }

    #[test]
    fn mirrors_share_status() {
        for strategy in Strategy::ALL {
            for sw in Switch::ALL {
                for dir in Direction::BOTH {
                    assert_eq!(entry_status(strategy, sw, dir), entry_status(strategy, sw.mirror(), dir));
                }
            }
        }
    }
}
