#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use anpc_core::modulation::{state_gates, HalfCycle, LegState};
use anpc_core::oracle::conduction_paths;
use anpc_core::{Direction, OperatingPoint, Strategy, Switch};

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Current share of a device in one leg state, read off the simulator's path
/// resolution rather than the analytic conduction map.
pub fn path_share(
    strategy: Strategy,
    half: HalfCycle,
    state: LegState,
    positive: bool,
    device: Switch,
    direction: Direction,
) -> f64 {
    conduction_paths(state_gates(strategy, half, state), positive)
        .expect("path")
        .iter()
        .filter(|c| c.device == device && c.direction == direction)
        .map(|c| c.share)
        .sum()
}

/// Carrier-averaged weight d(θ)·share² built from the path resolver.
pub fn oracle_duty(strategy: Strategy, device: Switch, direction: Direction, op: &OperatingPoint, theta: f64) -> f64 {
    let r = op.m * theta.sin();
    let half = if theta.rem_euclid(TAU) < PI {
        HalfCycle::Positive
    } else {
        HalfCycle::Negative
    };
    let positive = op.load_current(theta) > 0.0;
    let a = path_share(strategy, half, LegState::Active, positive, device, direction);
    let z = path_share(strategy, half, LegState::Zero, positive, device, direction);
    r.abs() * a * a + (1.0 - r.abs()) * z * z
}

/// RMS current by Simpson integration split at every duty breakpoint.
pub fn oracle_rms(strategy: Strategy, device: Switch, direction: Direction, op: &OperatingPoint) -> f64 {
    let p = op.phi.rem_euclid(PI);
    let mut cuts = [0.0, p, PI, PI + p, TAU];
    cuts.sort_by(f64::total_cmp);
    let mut sum = 0.0;
    for w in cuts.windows(2) {
        if w[1] - w[0] < 1e-15 {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        let half = if mid < PI { HalfCycle::Positive } else { HalfCycle::Negative };
        let positive = op.load_current(mid) > 0.0;
        let a = path_share(strategy, half, LegState::Active, positive, device, direction);
        let z = path_share(strategy, half, LegState::Zero, positive, device, direction);
        let (a, z) = (a * a, z * z);
        if a == 0.0 && z == 0.0 {
            continue;
        }
        sum += simpson(
            |t| {
                let r = (op.m * t.sin()).abs();
                let i = op.load_current(t);
                (r * a + (1.0 - r) * z) * i * i
            },
            w[0],
            w[1],
            2000,
        );
    }
    (sum / TAU).sqrt()
}

pub fn grid() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for mi in 2..=10 {
        for ci in 5..=10 {
            out.push((mi as f64 / 10.0, ci as f64 / 10.0));
        }
    }
    out
}

pub fn study_case() -> OperatingPoint {
    OperatingPoint::default()
}
