use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// One of the six switches of a leg.
///
/// ```text
///   DC+ ──S1── A ──S2── OUT ──S3── B ──S4── DC−
///              │                   │
///              S5 ────── N ─────── S6
/// ```
///
/// Forward conduction (drain to source) is DC+→A for S1, A→OUT for S2,
/// OUT→B for S3, B→DC− for S4, A→N for S5 and N→B for S6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Switch {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
}

impl Switch {
    pub const ALL: [Switch; 6] = [
        Switch::S1,
        Switch::S2,
        Switch::S3,
        Switch::S4,
        Switch::S5,
        Switch::S6,
    ];

    /// Upper-half devices; the lower half follows by half-wave symmetry.
    pub const TOP: [Switch; 3] = [Switch::S1, Switch::S2, Switch::S5];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Switch> {
        Switch::ALL.get(index).copied()
    }

    /// The device that plays the same role half a fundamental period later.
    pub fn mirror(self) -> Switch {
        match self {
            Switch::S1 => Switch::S4,
            Switch::S2 => Switch::S3,
            Switch::S3 => Switch::S2,
            Switch::S4 => Switch::S1,
            Switch::S5 => Switch::S6,
            Switch::S6 => Switch::S5,
        }
    }

    pub fn name(self) -> &'static str {
        ["S1", "S2", "S3", "S4", "S5", "S6"][self.index()]
    }
}

impl fmt::Display for Switch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Switch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Switch::ALL
            .iter()
            .copied()
            .find(|sw| sw.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown switch `{s}`"))
    }
}

/// Channel current direction through a GaN HEMT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// Drain to source.
    Forward,
    /// Source to drain (third-quadrant conduction).
    Reverse,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Forward, Direction::Reverse];

    pub fn suffix(self) -> char {
        match self {
            Direction::Forward => 'F',
            Direction::Reverse => 'R',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatingPointError {
    #[error("modulation index {0} outside [0, 1.15]")]
    ModulationIndex(f64),
    #[error("peak current {0} A is negative or not finite")]
    PeakCurrent(f64),
    #[error("load angle {0} rad is not finite")]
    LoadAngle(f64),
    #[error("DC bus voltage {0} V must be positive")]
    BusVoltage(f64),
    #[error("frequencies must satisfy f_sw > f_e > 0 (got f_e = {f_e} Hz, f_sw = {f_sw} Hz)")]
    Frequencies { f_e: f64, f_sw: f64 },
}

/// Electrical scenario of one inverter leg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Modulation index.
    pub m: f64,
    /// Load angle φ in radians; the load current lags the reference by φ.
    pub phi: f64,
    /// Peak load current in ampere.
    pub i_peak: f64,
    /// Total DC bus voltage in volt.
    pub v_dc: f64,
    /// Fundamental frequency in hertz.
    pub f_e: f64,
    /// Carrier (switching) frequency in hertz.
    pub f_sw: f64,
}

impl Default for OperatingPoint {
    /// Bench operating point: m = 0.7, cos φ = 0.9, 3 A peak, 200 V,
    /// 50 Hz fundamental, 50 kHz carrier.
    fn default() -> Self {
        OperatingPoint {
            m: 0.7,
            phi: 0.9f64.acos(),
            i_peak: 3.0,
            v_dc: 200.0,
            f_e: 50.0,
            f_sw: 50e3,
        }
    }
}

impl OperatingPoint {
    pub fn with_cos_phi(mut self, cos_phi: f64) -> Self {
        self.phi = cos_phi.clamp(-1.0, 1.0).acos();
        self
    }

    pub fn cos_phi(&self) -> f64 {
        self.phi.cos()
    }

    /// Carrier periods per fundamental period.
    pub fn frequency_ratio(&self) -> f64 {
        self.f_sw / self.f_e
    }

    /// Load angle reduced to [0, 2π).
    pub fn phi_normalized(&self) -> f64 {
        self.phi.rem_euclid(TAU)
    }

    pub fn validate(&self) -> Result<(), OperatingPointError> {
        if !(0.0..=1.15).contains(&self.m) {
            return Err(OperatingPointError::ModulationIndex(self.m));
        }
        if !(self.i_peak >= 0.0 && self.i_peak.is_finite()) {
            return Err(OperatingPointError::PeakCurrent(self.i_peak));
        }
        if !self.phi.is_finite() {
            return Err(OperatingPointError::LoadAngle(self.phi));
        }
        if !(self.v_dc > 0.0 && self.v_dc.is_finite()) {
            return Err(OperatingPointError::BusVoltage(self.v_dc));
        }
        if !(self.f_e > 0.0 && self.f_sw > self.f_e && self.f_sw.is_finite()) {
            return Err(OperatingPointError::Frequencies {
                f_e: self.f_e,
                f_sw: self.f_sw,
            });
        }
        Ok(())
    }

    /// Instantaneous load current `I_p · sin(θ − φ)`.
    pub fn load_current(&self, theta: f64) -> f64 {
        self.i_peak * (theta - self.phi).sin()
    }
}

/// Instantaneous load current at fundamental angle `theta`.
pub fn load_current(theta: f64, op: &OperatingPoint) -> f64 {
    op.load_current(theta)
}
