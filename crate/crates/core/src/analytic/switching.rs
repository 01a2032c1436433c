//! Switching-loss attribution and averaging.

use std::f64::consts::{PI, TAU};

use crate::device::EnergyCurve;
use crate::modulation::{state_gates, CommutationEvent, Edge, HalfCycle, LegState, Strategy};
use crate::quadrature::{integrate, Tolerance};
use crate::types::{Direction, OperatingPoint, Switch};

use super::duty::{regions, share_in};
use super::{AnalyticError, Attribution};

/// Share of |I| a device hard-switches on each of its carrier-rate edges in
/// one region, or `None` if it does not toggle there (or toggles softly).
///
/// A toggling device is hard-switched when it carries forward channel current
/// in the state where it is gated on: turning on takes that current over and
/// turning off interrupts it. Edges that only move third-quadrant current are
/// soft.
pub fn carrier_edge_share(
    strategy: Strategy,
    device: Switch,
    half: HalfCycle,
    current_positive: bool,
    attribution: Attribution,
) -> Option<f64> {
    let active = state_gates(strategy, half, LegState::Active).is_on(device);
    let zero = state_gates(strategy, half, LegState::Zero).is_on(device);
    if active == zero {
        return None;
    }
    match attribution {
        Attribution::AllEdges => Some(1.0),
        Attribution::Hard => {
            let on_state = if active { LegState::Active } else { LegState::Zero };
            let share = share_in(strategy, half, on_state, current_positive, device, Direction::Forward);
            (share > 0.0).then_some(share)
        }
    }
}

fn half_of(theta: f64) -> HalfCycle {
    if theta.rem_euclid(TAU) < PI {
        HalfCycle::Positive
    } else {
        HalfCycle::Negative
    }
}

/// Sets `i_switched` on gate-level events according to `attribution`.
///
/// Edges at the reference zero crossings (θ = 0 and π) happen in the zero
/// state. A turn-on is judged in the state it enters, a turn-off in the state
/// it leaves.
pub fn attribute_events(
    strategy: Strategy,
    events: &[CommutationEvent],
    op: &OperatingPoint,
    attribution: Attribution,
) -> Vec<CommutationEvent> {
    events
        .iter()
        .map(|e| {
            let i = op.load_current(e.theta);
            let i_switched = match attribution {
                Attribution::AllEdges => i.abs(),
                Attribution::Hard => {
                    let at_crossing = e.theta == 0.0 || e.theta == PI;
                    let (half, state) = if at_crossing {
                        let half = match (e.edge, half_of(e.theta)) {
                            (Edge::TurnOn, h) => h,
                            (Edge::TurnOff, HalfCycle::Positive) => HalfCycle::Negative,
                            (Edge::TurnOff, HalfCycle::Negative) => HalfCycle::Positive,
                        };
                        (half, LegState::Zero)
                    } else {
                        let half = half_of(e.theta);
                        let state = if state_gates(strategy, half, LegState::Active).is_on(e.device) {
                            LegState::Active
                        } else {
                            LegState::Zero
                        };
                        (half, state)
                    };
                    let share = share_in(strategy, half, state, i > 0.0, e.device, Direction::Forward);
                    share * i.abs()
                }
            };
            CommutationEvent { i_switched, ..*e }
        })
        .collect()
}

/// Per-device switching loss from an event log: `f_e · Σ E_edge(i_switched)`.
pub fn switching_loss_discrete(
    events: &[CommutationEvent],
    e_on: &EnergyCurve,
    e_off: &EnergyCurve,
    f_e: f64,
) -> [f64; 6] {
    let mut out = [0.0; 6];
    for e in events {
        let curve = match e.edge {
            Edge::TurnOn => e_on,
            Edge::TurnOff => e_off,
        };
        out[e.device.index()] += curve.energy_at(e.i_switched);
    }
    out.map(|energy| energy * f_e)
}

/// Average switching power written as the mean of the per-pair powers
/// `P_ON,i + P_OFF,i` at `f_sw`, scaled by the fraction of carrier periods
/// in which the device commutates.
///
/// The i-th turn-on and i-th turn-off of the log form pair i.
pub fn switching_loss_pair_average(
    events: &[CommutationEvent],
    device: Switch,
    e_on: &EnergyCurve,
    e_off: &EnergyCurve,
    f_e: f64,
    f_sw: f64,
) -> f64 {
    let ons: Vec<f64> = events
        .iter()
        .filter(|e| e.device == device && e.edge == Edge::TurnOn)
        .map(|e| e_on.energy_at(e.i_switched) * f_sw)
        .collect();
    let offs: Vec<f64> = events
        .iter()
        .filter(|e| e.device == device && e.edge == Edge::TurnOff)
        .map(|e| e_off.energy_at(e.i_switched) * f_sw)
        .collect();
    let n = ons.len().max(offs.len());
    if n == 0 {
        return 0.0;
    }
    let pair_sum: f64 = ons.iter().sum::<f64>() + offs.iter().sum::<f64>();
    let fraction = n as f64 * f_e / f_sw;
    pair_sum / n as f64 * fraction
}

/// Switching loss in the high carrier-ratio limit:
/// `(f_sw/2π) ∫ [E_ON(k·|I|) + E_OFF(k·|I|)] dθ` over the regions where the
/// device toggles with a hard share `k`.
///
/// Edges at the fundamental rate (two per period) are not included.
pub fn switching_loss_continuous(
    strategy: Strategy,
    device: Switch,
    op: &OperatingPoint,
    e_on: &EnergyCurve,
    e_off: &EnergyCurve,
    attribution: Attribution,
) -> Result<f64, AnalyticError> {
    op.validate()?;
    if op.i_peak == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for r in regions(op.phi) {
        let Some(share) = carrier_edge_share(strategy, device, r.half, r.current_positive, attribution)
        else {
            continue;
        };
        sum += integrate(
            |theta| {
                let i = share * op.load_current(theta).abs();
                e_on.energy_at(i) + e_off.energy_at(i)
            },
            r.start,
            r.end,
            Tolerance::default(),
        )?;
    }
    Ok(op.f_sw / TAU * sum)
}
