//! Carrier-based gating for the four ANPC strategies.
//!
//! Two in-phase triangular carriers (phase disposition) are compared with one
//! reference. `v_tri1` spans [0, 1] and peaks at θ = 0, `v_tri2 = v_tri1 − 1`.
//! Three comparator outputs drive every strategy:
//!
//! * `c1 = v_ref > v_tri1`
//! * `c2 = v_ref > v_tri2`
//! * `s  = v_ref > 0`
//!
//! Ties resolve to `false` (strict comparison).

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::types::{OperatingPoint, OperatingPointError, Switch};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModulationError {
    #[error("modulation index {m} outside [0, {max}] for {kind} reference")]
    ModulationIndex {
        m: f64,
        max: f64,
        kind: ReferenceKind,
    },
    #[error("carrier ratio must be positive (got {0})")]
    NonPositiveRatio(f64),
    #[error("carrier ratio f_sw/f_e = {0} is below 20")]
    RatioTooSmall(f64),
    #[error("dead time must be >= 0 (got {0} s)")]
    NegativeDeadTime(f64),
    #[error("sample step {step} s is coarser than dead time {dead_time} s")]
    CoarseSampling { step: f64, dead_time: f64 },
    #[error(transparent)]
    OperatingPoint(#[from] OperatingPointError),
}

/// Gating strategy of the leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    /// Clamp switches S5/S6 held off; behaves like a diode-clamped NPC.
    Dnpc,
    /// Same-side clamping: the zero state uses the cell that carries the active state.
    Sscm,
    /// Opposite-side clamping: outer switches at fundamental rate, S2/S3 at carrier rate.
    Oscm,
    /// Full-path clamping: both clamp paths conduct in every zero state.
    Fpcm,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Dnpc, Strategy::Sscm, Strategy::Oscm, Strategy::Fpcm];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Dnpc => "DNPC",
            Strategy::Sscm => "SSCM",
            Strategy::Oscm => "OSCM",
            Strategy::Fpcm => "FPCM",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_uppercase();
        let key = key.strip_prefix("ANPC-").unwrap_or(&key);
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == key)
            .ok_or_else(|| format!("unknown strategy `{s}` (expected DNPC, SSCM, OSCM or FPCM)"))
    }
}

/// Shape of the modulating reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReferenceKind {
    Sinusoidal,
    /// Sinusoid plus a 1/6 third harmonic; linear up to m = 2/√3.
    ThirdHarmonicInjection,
}

impl ReferenceKind {
    pub fn max_modulation_index(self) -> f64 {
        match self {
            ReferenceKind::Sinusoidal => 1.0,
            ReferenceKind::ThirdHarmonicInjection => 1.15,
        }
    }

    pub fn check(self, m: f64) -> Result<(), ModulationError> {
        let max = self.max_modulation_index();
        if (0.0..=max).contains(&m) {
            Ok(())
        } else {
            Err(ModulationError::ModulationIndex { m, max, kind: self })
        }
    }

    /// Reference value without range checks.
    pub(crate) fn eval(self, theta: f64, m: f64) -> f64 {
        match self {
            ReferenceKind::Sinusoidal => m * theta.sin(),
            ReferenceKind::ThirdHarmonicInjection => m * (theta.sin() + (3.0 * theta).sin() / 6.0),
        }
    }
}

impl fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReferenceKind::Sinusoidal => "sinusoidal",
            ReferenceKind::ThirdHarmonicInjection => "thi",
        })
    }
}

impl FromStr for ReferenceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sinusoidal" | "sine" | "spwm" => Ok(ReferenceKind::Sinusoidal),
            "thi" | "third-harmonic" | "third_harmonic_injection" => {
                Ok(ReferenceKind::ThirdHarmonicInjection)
            }
            _ => Err(format!("unknown reference kind `{s}` (expected sinusoidal or thi)")),
        }
    }
}

/// Normalised reference at fundamental angle `theta`.
pub fn reference_value(theta: f64, m: f64, kind: ReferenceKind) -> Result<f64, ModulationError> {
    kind.check(m)?;
    Ok(kind.eval(theta, m))
}

/// Instantaneous values of the two level-shifted carriers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierPair {
    pub v_tri1: f64,
    pub v_tri2: f64,
}

/// Carriers at `theta` for `ratio = f_sw / f_e` carrier periods per turn.
pub fn carrier_values(theta: f64, ratio: f64) -> Result<CarrierPair, ModulationError> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(ModulationError::NonPositiveRatio(ratio));
    }
    Ok(carriers(theta, ratio))
}

pub(crate) fn carriers(theta: f64, ratio: f64) -> CarrierPair {
    let phase = theta * ratio / TAU;
    let frac = phase - phase.floor();
    let v_tri1 = (2.0 * frac - 1.0).abs();
    CarrierPair {
        v_tri1,
        v_tri2: v_tri1 - 1.0,
    }
}

/// On/off state of S1..S6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GateVector([bool; 6]);

impl GateVector {
    pub const ALL_OFF: GateVector = GateVector([false; 6]);

    pub fn new(states: [bool; 6]) -> Self {
        GateVector(states)
    }

    /// Parses `"110000"`-style strings (S1 first).
    pub fn from_bits_str(bits: &str) -> Option<Self> {
        let bytes = bits.as_bytes();
        if bytes.len() != 6 {
            return None;
        }
        let mut out = [false; 6];
        for (slot, b) in out.iter_mut().zip(bytes) {
            *slot = match b {
                b'0' => false,
                b'1' => true,
                _ => return None,
            };
        }
        Some(GateVector(out))
    }

    pub fn is_on(&self, sw: Switch) -> bool {
        self.0[sw.index()]
    }

    pub fn set(&mut self, sw: Switch, on: bool) {
        self.0[sw.index()] = on;
    }

    pub fn states(&self) -> [bool; 6] {
        self.0
    }

    /// Compact key in 0..64 (bit i = S(i+1)).
    pub fn bits(&self) -> u8 {
        self.0
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &on)| acc | ((on as u8) << i))
    }

    pub fn from_bits(bits: u8) -> Self {
        let mut out = [false; 6];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = bits & (1 << i) != 0;
        }
        GateVector(out)
    }

    /// Output level implied by the gates alone.
    pub fn level(&self) -> OutputLevel {
        if self.is_on(Switch::S1) && self.is_on(Switch::S2) {
            OutputLevel::Positive
        } else if self.is_on(Switch::S3) && self.is_on(Switch::S4) {
            OutputLevel::Negative
        } else {
            OutputLevel::Zero
        }
    }
}

impl fmt::Display for GateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for on in self.0 {
            f.write_str(if on { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Leg output level: DC+ (P), neutral (0) or DC− (N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputLevel {
    Positive,
    Zero,
    Negative,
}

impl OutputLevel {
    pub fn symbol(self) -> &'static str {
        match self {
            OutputLevel::Positive => "P",
            OutputLevel::Zero => "0",
            OutputLevel::Negative => "N",
        }
    }
}

/// Comparator outputs `(c1, c2, s)` for one reference/carrier sample.
pub fn comparators(v_ref: f64, carriers: CarrierPair) -> (bool, bool, bool) {
    (v_ref > carriers.v_tri1, v_ref > carriers.v_tri2, v_ref > 0.0)
}

/// Gate pattern produced by `strategy` for the given comparator outputs.
pub fn gates_from_comparators(strategy: Strategy, c1: bool, c2: bool, s: bool) -> GateVector {
    // Order: S1, S2, S3, S4, S5, S6.
    let g = match strategy {
        Strategy::Dnpc => [c1, c2, !c1, !c2, false, false],
        Strategy::Sscm => [c1, s, !s, !c2, !c1, c2],
        Strategy::Oscm => {
            let s2 = if s { c1 } else { c2 };
            [s, s2, !s2, !s, !s, s]
        }
        // S6 follows S2 (not S4) so that the N state never bridges B to both
        // DC− and the neutral point.
        Strategy::Fpcm => [c1, c2, !c1, !c2, !c1, c2],
    };
    GateVector(g)
}

/// Gate pattern for one reference sample and carrier pair.
pub fn gate_vector(strategy: Strategy, v_ref: f64, v_tri1: f64, v_tri2: f64) -> GateVector {
    let (c1, c2, s) = comparators(v_ref, CarrierPair { v_tri1, v_tri2 });
    gates_from_comparators(strategy, c1, c2, s)
}

/// Sign of the reference over a half fundamental period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfCycle {
    Positive,
    Negative,
}

/// Within one half cycle the leg alternates between the active level
/// (P or N, duty `|v_ref|`) and the zero level (duty `1 − |v_ref|`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LegState {
    Active,
    Zero,
}

/// Gate vector held during `state` of `half`.
pub fn state_gates(strategy: Strategy, half: HalfCycle, state: LegState) -> GateVector {
    match half {
        HalfCycle::Positive => gates_from_comparators(strategy, state == LegState::Active, true, true),
        HalfCycle::Negative => gates_from_comparators(strategy, false, state == LegState::Zero, false),
    }
}

/// How often a switch changes state over one fundamental period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchingRate {
    Never,
    /// Two edges per fundamental period.
    Fundamental,
    /// Two edges per carrier period in the flagged half cycles.
    Carrier {
        positive_half: bool,
        negative_half: bool,
    },
}

/// Per-switch switching rate, indexed by [`Switch::index`].
pub fn switching_rates(strategy: Strategy) -> [SwitchingRate; 6] {
    let mut out = [SwitchingRate::Never; 6];
    for sw in Switch::ALL {
        let toggles = |half| {
            state_gates(strategy, half, LegState::Active).is_on(sw)
                != state_gates(strategy, half, LegState::Zero).is_on(sw)
        };
        let (pos, neg) = (toggles(HalfCycle::Positive), toggles(HalfCycle::Negative));
        out[sw.index()] = if pos || neg {
            SwitchingRate::Carrier {
                positive_half: pos,
                negative_half: neg,
            }
        } else {
            let held: Vec<bool> = [HalfCycle::Positive, HalfCycle::Negative]
                .into_iter()
                .map(|h| state_gates(strategy, h, LegState::Zero).is_on(sw))
                .collect();
            if held[0] != held[1] {
                SwitchingRate::Fundamental
            } else {
                SwitchingRate::Never
            }
        };
    }
    out
}

fn dead_time_steps(step: f64, dead_time: f64) -> Result<usize, ModulationError> {
    if !(dead_time >= 0.0) {
        return Err(ModulationError::NegativeDeadTime(dead_time));
    }
    if dead_time == 0.0 {
        return Ok(0);
    }
    if !(step > 0.0) || step > dead_time {
        return Err(ModulationError::CoarseSampling { step, dead_time });
    }
    Ok(((dead_time / step).round() as usize).max(1))
}

fn delay_turn_on(stream: &[GateVector], k: usize, initial_run: [usize; 6]) -> Vec<GateVector> {
    let mut run = initial_run;
    stream
        .iter()
        .map(|g| {
            let mut out = *g;
            for i in 0..6 {
                if g.0[i] {
                    run[i] = run[i].saturating_add(1);
                    out.0[i] = run[i] > k;
                } else {
                    run[i] = 0;
                }
            }
            out
        })
        .collect()
}

/// Delays every turn-on by `dead_time`; turn-offs pass through unchanged.
///
/// Samples are `step` seconds apart. A switch already on at the first sample
/// is taken to have been on before the stream started.
pub fn apply_dead_time(
    stream: &[GateVector],
    step: f64,
    dead_time: f64,
) -> Result<Vec<GateVector>, ModulationError> {
    let k = dead_time_steps(step, dead_time)?;
    if k == 0 || stream.is_empty() {
        return Ok(stream.to_vec());
    }
    let first = stream[0];
    let initial = std::array::from_fn(|i| if first.0[i] { usize::MAX } else { 0 });
    Ok(delay_turn_on(stream, k, initial))
}

/// Like [`apply_dead_time`] for one period of a periodic stream: history
/// before the first sample wraps around from the end.
pub fn apply_dead_time_periodic(
    stream: &[GateVector],
    step: f64,
    dead_time: f64,
) -> Result<Vec<GateVector>, ModulationError> {
    let k = dead_time_steps(step, dead_time)?;
    if k == 0 || stream.is_empty() {
        return Ok(stream.to_vec());
    }
    let initial = std::array::from_fn(|i| {
        let trailing = stream.iter().rev().take_while(|g| g.0[i]).count();
        if trailing == stream.len() {
            usize::MAX
        } else {
            trailing
        }
    });
    Ok(delay_turn_on(stream, k, initial))
}

/// Gate edge direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edge {
    TurnOn,
    TurnOff,
}

/// One gate transition of one switch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutationEvent {
    pub device: Switch,
    /// Fundamental angle in [0, 2π).
    pub theta: f64,
    pub edge: Edge,
    /// Load current magnitude at the instant.
    pub i_ds: f64,
    /// Current the device hard-commutates on this edge; zero for soft edges.
    pub i_switched: f64,
}

fn gates_at(strategy: Strategy, theta: f64, op: &OperatingPoint, kind: ReferenceKind) -> GateVector {
    let v_ref = kind.eval(theta, op.m);
    let (c1, c2, s) = comparators(v_ref, carriers(theta, op.frequency_ratio()));
    gates_from_comparators(strategy, c1, c2, s)
}

/// Every gate edge of every switch over one fundamental period.
///
/// Edges are located by bisecting each carrier ramp, so the result does not
/// depend on any sampling step. Each event's `i_switched` equals `i_ds`:
/// at gate level every edge is treated as hard-switched at the load current.
pub fn commutation_events(
    strategy: Strategy,
    op: &OperatingPoint,
    kind: ReferenceKind,
) -> Result<Vec<CommutationEvent>, ModulationError> {
    op.validate()?;
    kind.check(op.m)?;
    let ratio = op.frequency_ratio();
    if ratio < 20.0 {
        return Err(ModulationError::RatioTooSmall(ratio));
    }

    let ramp = PI / ratio;
    let n_ramps = (TAU / ramp).ceil() as usize;
    let comparator_outputs = |theta: f64| {
        let v_ref = kind.eval(theta, op.m);
        let (c1, c2, _) = comparators(v_ref, carriers(theta, ratio));
        [c1, c2]
    };

    // The reference changes sign at 0 and π for both reference shapes.
    let mut breakpoints = vec![0.0, PI];
    let mut lo_theta = 0.0;
    let mut lo_state = comparator_outputs(0.0);
    for k in 1..=n_ramps {
        let hi_theta = (k as f64 * ramp).min(TAU);
        let hi_state = comparator_outputs(hi_theta);
        for c in 0..2 {
            if lo_state[c] != hi_state[c] {
                let (mut a, mut b) = (lo_theta, hi_theta);
                for _ in 0..80 {
                    let mid = 0.5 * (a + b);
                    if mid <= a || mid >= b {
                        break;
                    }
                    if comparator_outputs(mid)[c] == lo_state[c] {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                breakpoints.push(b);
            }
        }
        lo_theta = hi_theta;
        lo_state = hi_state;
    }
    breakpoints.retain(|&t| t < TAU);
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let n = breakpoints.len();
    let mut events = Vec::new();
    for i in 0..n {
        let here = breakpoints[i];
        let prev = if i == 0 { breakpoints[n - 1] - TAU } else { breakpoints[i - 1] };
        let next = if i + 1 == n { breakpoints[0] + TAU } else { breakpoints[i + 1] };
        let before = gates_at(strategy, 0.5 * (prev + here), op, kind);
        let after = gates_at(strategy, 0.5 * (here + next), op, kind);
        if before == after {
            continue;
        }
        let i_ds = op.load_current(here).abs();
        for sw in Switch::ALL {
            if before.is_on(sw) != after.is_on(sw) {
                events.push(CommutationEvent {
                    device: sw,
                    theta: here,
                    edge: if after.is_on(sw) { Edge::TurnOn } else { Edge::TurnOff },
                    i_ds,
                    i_switched: i_ds,
                });
            }
        }
    }
    Ok(events)
}
