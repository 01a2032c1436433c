//! Fixed-step simulation of one leg with an imposed sinusoidal load current.

use std::f64::consts::TAU;

use crate::analytic::{conduction_loss, Attribution, Conduction, LossModel};
use crate::modulation::{
    apply_dead_time_periodic, carriers, comparators, gates_from_comparators, CommutationEvent, Edge,
    GateVector, ReferenceKind, Strategy,
};
use crate::report::LossReport;
use crate::types::{Direction, OperatingPoint, Switch};

use super::topology::PathTable;
use super::OracleError;

const SAMPLE_OFFSET: f64 = 1e-6;

/// Settings of one simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub operating_point: OperatingPoint,
    pub strategy: Strategy,
    pub reference: ReferenceKind,
    /// Turn-on delay in seconds.
    pub dead_time: f64,
    /// Samples per carrier period, at least 64.
    pub steps_per_carrier: usize,
    /// Adds a fixed source-drain drop for reverse current through off devices.
    pub include_reverse_conduction_drop: bool,
    /// Drop used when `include_reverse_conduction_drop` is set, in volt.
    pub reverse_drop_v: f64,
}

impl SimConfig {
    pub const MIN_STEPS_PER_CARRIER: usize = 64;

    pub fn new(strategy: Strategy, operating_point: OperatingPoint) -> Self {
        SimConfig {
            operating_point,
            strategy,
            reference: ReferenceKind::Sinusoidal,
            dead_time: 0.0,
            steps_per_carrier: 256,
            include_reverse_conduction_drop: false,
            reverse_drop_v: 4.5,
        }
    }

    /// Samples per fundamental period.
    pub fn total_steps(&self) -> usize {
        (self.operating_point.frequency_ratio() * self.steps_per_carrier as f64).round() as usize
    }

    /// Sample spacing in seconds.
    pub fn step_time(&self) -> f64 {
        1.0 / (self.operating_point.f_e * self.total_steps() as f64)
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        self.operating_point.validate()?;
        self.reference.check(self.operating_point.m)?;
        if self.steps_per_carrier < Self::MIN_STEPS_PER_CARRIER {
            return Err(OracleError::InvalidConfig(format!(
                "steps per carrier period must be >= {} (got {})",
                Self::MIN_STEPS_PER_CARRIER,
                self.steps_per_carrier
            )));
        }
        if !(self.dead_time >= 0.0 && self.dead_time.is_finite()) {
            return Err(OracleError::InvalidConfig(format!(
                "dead time must be >= 0 (got {} s)",
                self.dead_time
            )));
        }
        if self.include_reverse_conduction_drop && !(self.reverse_drop_v >= 0.0) {
            return Err(OracleError::InvalidConfig(format!(
                "reverse drop must be >= 0 (got {} V)",
                self.reverse_drop_v
            )));
        }
        Ok(())
    }
}

/// Record of one simulated fundamental period.
#[derive(Debug, Clone)]
pub struct SimTrace {
    pub config: SimConfig,
    pub theta: Vec<f64>,
    /// Gate vectors after dead-time insertion.
    pub gates: Vec<GateVector>,
    pub load_current: Vec<f64>,
    /// Signed device currents, positive in the forward direction.
    pub device_currents: Vec<[f64; 6]>,
    /// Σ i² per device, forward and reverse.
    pub sum_sq: [[f64; 2]; 6],
    /// Σ |i| of reverse current through devices that are gated off.
    pub sum_abs_reverse_off: [f64; 6],
    /// Gate edges; `i_switched` holds the forward current interrupted
    /// (turn-off) or taken over (turn-on).
    pub events: Vec<CommutationEvent>,
}

impl SimTrace {
    pub fn steps(&self) -> usize {
        self.theta.len()
    }
}

/// Steps `config` through one fundamental period.
///
/// Samples sit at θ_n ≈ 2πn/N with N a whole number of samples per carrier
/// period, so every carrier vertex is sampled and even the narrowest pulse
/// (centred on a vertex) is seen.
pub fn simulate_leg(config: &SimConfig) -> Result<SimTrace, OracleError> {
    config.validate()?;
    let op = config.operating_point;
    let n = config.total_steps();
    let ratio = op.frequency_ratio();
    let dt = TAU / n as f64;

    // Samples sit just after each grid point so that none lands exactly on
    // the reference zero crossing at θ = 0, where the strict comparisons
    // would produce a zero-width pulse.
    let theta: Vec<f64> = (0..n).map(|k| (k as f64 + SAMPLE_OFFSET) * dt).collect();
    let raw: Vec<GateVector> = theta
        .iter()
        .map(|&t| {
            let v_ref = config.reference.eval(t, op.m);
            let (c1, c2, s) = comparators(v_ref, carriers(t, ratio));
            gates_from_comparators(config.strategy, c1, c2, s)
        })
        .collect();
    let gates = apply_dead_time_periodic(&raw, config.step_time(), config.dead_time)?;

    let table = PathTable::new();
    let mut load_current = Vec::with_capacity(n);
    let mut device_currents = Vec::with_capacity(n);
    let mut sum_sq = [[0.0; 2]; 6];
    let mut sum_abs_reverse_off = [0.0; 6];
    let mut previous: Vec<Conduction> = Vec::new();
    for (&t, &g) in theta.iter().zip(&gates) {
        if table.is_short(g) {
            return Err(OracleError::RailShort { theta: t, gates: g });
        }
        let i = op.load_current(t);
        let mut currents = [0.0; 6];
        if i != 0.0 {
            let paths = table
                .paths(g, i > 0.0, &previous)
                .ok_or(OracleError::NoPath { theta: t, gates: g })?;
            for c in &paths {
                let magnitude = c.share * i.abs();
                let idx = c.device.index();
                match c.direction {
                    Direction::Forward => {
                        currents[idx] = magnitude;
                        sum_sq[idx][0] += magnitude * magnitude;
                    }
                    Direction::Reverse => {
                        currents[idx] = -magnitude;
                        sum_sq[idx][1] += magnitude * magnitude;
                        if !g.is_on(c.device) {
                            sum_abs_reverse_off[idx] += magnitude;
                        }
                    }
                }
            }
            previous = paths;
        }
        load_current.push(i);
        device_currents.push(currents);
    }

    let mut events = Vec::new();
    for k in 0..n {
        let prev = (k + n - 1) % n;
        let (before, after) = (gates[prev], gates[k]);
        if before == after {
            continue;
        }
        for sw in Switch::ALL {
            if before.is_on(sw) == after.is_on(sw) {
                continue;
            }
            let idx = sw.index();
            let (edge, forward) = if after.is_on(sw) {
                (Edge::TurnOn, device_currents[k][idx])
            } else {
                (Edge::TurnOff, device_currents[prev][idx])
            };
            events.push(CommutationEvent {
                device: sw,
                theta: theta[k],
                edge,
                i_ds: load_current[k].abs(),
                i_switched: forward.max(0.0),
            });
        }
    }

    Ok(SimTrace {
        config: *config,
        theta,
        gates,
        load_current,
        device_currents,
        sum_sq,
        sum_abs_reverse_off,
        events,
    })
}

/// RMS of the device current restricted to one direction.
pub fn trace_rms(trace: &SimTrace, device: Switch, direction: Direction) -> f64 {
    let n = trace.steps();
    if n == 0 {
        return 0.0;
    }
    let col = match direction {
        Direction::Forward => 0,
        Direction::Reverse => 1,
    };
    (trace.sum_sq[device.index()][col] / n as f64).sqrt()
}

/// Loss report built from the trace: I²R from the sampled RMS currents and
/// switching energy summed over the event log.
///
/// With [`Attribution::AllEdges`] every edge is charged at the load current.
pub fn simulated_losses(trace: &SimTrace, model: &LossModel) -> LossReport {
    let cfg = &trace.config;
    let op = cfg.operating_point;
    let mut report = LossReport::new(cfg.strategy, op);
    let n = trace.steps().max(1) as f64;
    for sw in Switch::ALL {
        let fwd = trace_rms(trace, sw, Direction::Forward);
        let rev = trace_rms(trace, sw, Direction::Reverse);
        let mut conduction = conduction_loss(&model.device, fwd, rev);
        if cfg.include_reverse_conduction_drop {
            conduction += cfg.reverse_drop_v * trace.sum_abs_reverse_off[sw.index()] / n;
        }
        let d = report.device_mut(sw);
        d.rms_forward = fwd;
        d.rms_reverse = rev;
        d.conduction = conduction;
    }
    for e in &trace.events {
        let current = match model.attribution {
            Attribution::Hard => e.i_switched,
            Attribution::AllEdges => e.i_ds,
        };
        let energy = match e.edge {
            Edge::TurnOn => model.e_on.energy_at(current),
            Edge::TurnOff => model.e_off.energy_at(current),
        };
        report.device_mut(e.device).switching += energy * op.f_e;
    }
    report
}
