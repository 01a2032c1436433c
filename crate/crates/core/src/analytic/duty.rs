//! Per-state conduction map and the duty profiles built from it.

use std::f64::consts::{PI, TAU};

use crate::modulation::{HalfCycle, LegState, ReferenceKind, Strategy};
use crate::quadrature::{integrate, QuadratureError, Tolerance};
use crate::types::{Direction, OperatingPoint, Switch};

/// A device carrying a fraction of the load current in one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conduction {
    pub device: Switch,
    pub direction: Direction,
    /// Fraction of |I| through the device (1 or ½).
    pub share: f64,
}

const fn c(device: Switch, direction: Direction, share: f64) -> Conduction {
    Conduction {
        device,
        direction,
        share,
    }
}

use Direction::{Forward as F, Reverse as R};
use Switch::*;

fn upper_clamp(current_positive: bool, share: f64) -> [Conduction; 2] {
    if current_positive {
        [c(S5, R, share), c(S2, F, share)]
    } else {
        [c(S2, R, share), c(S5, F, share)]
    }
}

fn lower_clamp(current_positive: bool, share: f64) -> [Conduction; 2] {
    if current_positive {
        [c(S6, F, share), c(S3, R, share)]
    } else {
        [c(S3, F, share), c(S6, R, share)]
    }
}

/// Devices carrying current in `state` of `half` for the given load-current sign.
///
/// Positive load current flows out of the leg. Off devices conduct only in
/// reverse, which is how the DNPC zero state reaches the neutral point.
pub fn conduction_set(
    strategy: Strategy,
    half: HalfCycle,
    state: LegState,
    current_positive: bool,
) -> Vec<Conduction> {
    match (state, half) {
        (LegState::Active, HalfCycle::Positive) => {
            if current_positive {
                vec![c(S1, F, 1.0), c(S2, F, 1.0)]
            } else {
                vec![c(S1, R, 1.0), c(S2, R, 1.0)]
            }
        }
        (LegState::Active, HalfCycle::Negative) => {
            if current_positive {
                vec![c(S3, R, 1.0), c(S4, R, 1.0)]
            } else {
                vec![c(S3, F, 1.0), c(S4, F, 1.0)]
            }
        }
        (LegState::Zero, _) => {
            let upper = match strategy {
                Strategy::Dnpc => current_positive,
                Strategy::Sscm => half == HalfCycle::Positive,
                Strategy::Oscm => half == HalfCycle::Negative,
                Strategy::Fpcm => {
                    let mut v = upper_clamp(current_positive, 0.5).to_vec();
                    v.extend(lower_clamp(current_positive, 0.5));
                    return v;
                }
            };
            if upper {
                upper_clamp(current_positive, 1.0).to_vec()
            } else {
                lower_clamp(current_positive, 1.0).to_vec()
            }
        }
    }
}

/// Current share of `device` in `direction`, zero when it does not conduct.
pub fn share_in(
    strategy: Strategy,
    half: HalfCycle,
    state: LegState,
    current_positive: bool,
    device: Switch,
    direction: Direction,
) -> f64 {
    conduction_set(strategy, half, state, current_positive)
        .iter()
        .find(|k| k.device == device && k.direction == direction)
        .map_or(0.0, |k| k.share)
}

/// Interval of constant reference sign and load-current sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub start: f64,
    pub end: f64,
    pub half: HalfCycle,
    pub current_positive: bool,
}

/// Splits [0, 2π) at the reference and load-current zero crossings.
pub fn regions(phi: f64) -> Vec<Region> {
    let p = phi.rem_euclid(PI);
    let mut cuts = [0.0, p, PI, PI + p, TAU];
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .filter(|w| w[1] - w[0] > 1e-15)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            Region {
                start: w[0],
                end: w[1],
                half: if mid < PI { HalfCycle::Positive } else { HalfCycle::Negative },
                current_positive: (mid - phi).sin() > 0.0,
            }
        })
        .collect()
}

/// One interval of a duty profile.
///
/// The effective duty is `active·|v_ref(θ)| + zero·(1 − |v_ref(θ)|)`, where
/// `active` and `zero` are the squared current shares of the device in the
/// active and zero states. A share of ½ (FPCM zero state) gives weight ¼.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DutySegment {
    pub start: f64,
    pub end: f64,
    pub active: f64,
    pub zero: f64,
}

impl DutySegment {
    pub fn duty_at(&self, theta: f64, m: f64, kind: ReferenceKind) -> f64 {
        let r = kind.eval(theta, m).abs();
        self.active * r + self.zero * (1.0 - r)
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.start <= theta && theta < self.end
    }
}

/// Duty profile of one device and direction over one fundamental period.
///
/// Only intervals with non-zero weight are returned; neighbours with equal
/// weights are merged. The result does not depend on `m`.
pub fn duty_profile(strategy: Strategy, device: Switch, direction: Direction, phi: f64) -> Vec<DutySegment> {
    let mut out: Vec<DutySegment> = Vec::new();
    for r in regions(phi) {
        let share = |state| share_in(strategy, r.half, state, r.current_positive, device, direction);
        let active = share(LegState::Active).powi(2);
        let zero = share(LegState::Zero).powi(2);
        if active == 0.0 && zero == 0.0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.end == r.start && last.active == active && last.zero == zero => {
                last.end = r.end;
            }
            _ => out.push(DutySegment {
                start: r.start,
                end: r.end,
                active,
                zero,
            }),
        }
    }
    out
}

/// Shifts a profile by half a fundamental period, wrapping into [0, 2π).
pub fn shift_half_period(segments: &[DutySegment]) -> Vec<DutySegment> {
    let mut out = Vec::with_capacity(segments.len() + 1);
    for s in segments {
        let (a, b) = (s.start + PI, s.end + PI);
        if b <= TAU {
            out.push(DutySegment { start: a, end: b, ..*s });
        } else if a >= TAU {
            out.push(DutySegment {
                start: a - TAU,
                end: b - TAU,
                ..*s
            });
        } else {
            out.push(DutySegment { start: a, end: TAU, ..*s });
            out.push(DutySegment {
                start: 0.0,
                end: b - TAU,
                ..*s
            });
        }
    }
    out.retain(|s| s.end > s.start);
    out.sort_by(|x, y| x.start.total_cmp(&y.start));
    out
}

/// RMS current of a duty profile by adaptive quadrature:
/// `sqrt((1/2π) Σ ∫ d(θ)·I(θ)² dθ)`.
pub fn rms_quadrature(
    segments: &[DutySegment],
    op: &OperatingPoint,
    kind: ReferenceKind,
) -> Result<f64, QuadratureError> {
    if op.i_peak == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for s in segments {
        sum += integrate(
            |theta| {
                let i = op.load_current(theta);
                s.duty_at(theta, op.m, kind) * i * i
            },
            s.start,
            s.end,
            Tolerance::default(),
        )?;
    }
    Ok((sum.max(0.0) / TAU).sqrt())
}
