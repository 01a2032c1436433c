//! GaN HEMT parameters and switching-energy curves.
//!
//! Switching energy per edge is modelled as a power law `E = a·|I|^b`
//! evaluated at a fixed junction temperature (25 °C).

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeviceError {
    #[error("{field} must be positive (got {value})")]
    NonPositive { field: &'static str, value: f64 },
    #[error("energy curve coefficient must be >= 0 (got {0})")]
    NegativeCoefficient(f64),
    #[error("energy curve exponent must be > 0 (got {0})")]
    NonPositiveExponent(f64),
    #[error("switching frequency must be positive (got {0} Hz)")]
    NonPositiveFrequency(f64),
    #[error("sample {index} is invalid: current {current} A, energy {energy} J")]
    InvalidSample {
        index: usize,
        current: f64,
        energy: f64,
    },
    #[error("all sample energies are zero")]
    AllZeroEnergy,
    #[error("need at least 3 samples with positive current and energy, got {0}")]
    TooFewSamples(usize),
    #[error("need at least 3 distinct currents, got {0}")]
    NonDistinctCurrents(usize),
}

/// Datasheet values of the transistor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    /// On-state channel resistance (ohm).
    pub rds_on: f64,
    /// Blocking voltage rating (volt).
    pub v_ds_max: f64,
    /// Continuous drain current rating (ampere).
    pub i_d_rated: f64,
    /// Gate drive levels (volt); informational only.
    pub v_gs_on: f64,
    pub v_gs_off: f64,
}

impl Default for DeviceParams {
    /// 650 V / 10 A / 65 mΩ GaN HEMT driven at +6 V / −3 V.
    fn default() -> Self {
        DeviceParams {
            rds_on: 0.065,
            v_ds_max: 650.0,
            i_d_rated: 10.0,
            v_gs_on: 6.0,
            v_gs_off: -3.0,
        }
    }
}

impl DeviceParams {
    pub fn validate(&self) -> Result<(), DeviceError> {
        for (field, value) in [
            ("rds_on", self.rds_on),
            ("v_ds_max", self.v_ds_max),
            ("i_d_rated", self.i_d_rated),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(DeviceError::NonPositive { field, value });
            }
        }
        Ok(())
    }
}

/// Power-law switching energy `E(I) = coeff_a · |I|^exponent_b` in joule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCurve {
    coeff_a: f64,
    exponent_b: f64,
}

impl EnergyCurve {
    /// Turn-on energy of the reference device.
    pub const TURN_ON: EnergyCurve = EnergyCurve {
        coeff_a: 1.0527e-6,
        exponent_b: 1.6291,
    };

    /// Turn-off energy of the reference device.
    pub const TURN_OFF: EnergyCurve = EnergyCurve {
        coeff_a: 2.542e-6,
        exponent_b: 1.1738,
    };

    pub fn new(coeff_a: f64, exponent_b: f64) -> Result<Self, DeviceError> {
        if !(coeff_a >= 0.0 && coeff_a.is_finite()) {
            return Err(DeviceError::NegativeCoefficient(coeff_a));
        }
        if !(exponent_b > 0.0 && exponent_b.is_finite()) {
            return Err(DeviceError::NonPositiveExponent(exponent_b));
        }
        Ok(EnergyCurve {
            coeff_a,
            exponent_b,
        })
    }

    pub fn coeff_a(&self) -> f64 {
        self.coeff_a
    }

    pub fn exponent_b(&self) -> f64 {
        self.exponent_b
    }

    /// Energy of one edge at drain current `i_ds` (sign ignored).
    pub fn energy_at(&self, i_ds: f64) -> f64 {
        let i = i_ds.abs();
        if i == 0.0 {
            return 0.0;
        }
        self.coeff_a * i.powf(self.exponent_b)
    }

    /// Average power when switching `i_ds` once per period at `f_sw`.
    pub fn switch_power(&self, i_ds: f64, f_sw: f64) -> Result<f64, DeviceError> {
        if !(f_sw > 0.0 && f_sw.is_finite()) {
            return Err(DeviceError::NonPositiveFrequency(f_sw));
        }
        Ok(self.energy_at(i_ds) * f_sw)
    }
}

/// One point read off a datasheet energy curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample {
    pub current: f64,
    pub energy: f64,
}

impl EnergySample {
    pub fn new(current: f64, energy: f64) -> Self {
        EnergySample { current, energy }
    }
}

/// Result of [`fit_power_law`].
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    pub curve: EnergyCurve,
    /// Samples that entered the regression (positive current and energy).
    pub used: usize,
    /// Root-mean-square of the log-domain residuals.
    pub rms_log_residual: f64,
    /// Largest `|E_fit / E_sample − 1|` over the used samples.
    pub max_relative_residual: f64,
    /// Per-sample `(current, relative residual)` in input order.
    pub residuals: Vec<(f64, f64)>,
}

/// Least-squares fit of `ln E = ln a + b·ln I` over the samples with
/// positive current and energy.
pub fn fit_power_law(samples: &[EnergySample]) -> Result<PowerLawFit, DeviceError> {
    for (index, s) in samples.iter().enumerate() {
        if !(s.current.is_finite() && s.energy.is_finite() && s.current >= 0.0 && s.energy >= 0.0)
        {
            return Err(DeviceError::InvalidSample {
                index,
                current: s.current,
                energy: s.energy,
            });
        }
    }
    if !samples.is_empty() && samples.iter().all(|s| s.energy == 0.0) {
        return Err(DeviceError::AllZeroEnergy);
    }

    let usable: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.current > 0.0 && s.energy > 0.0)
        .map(|s| (s.current.ln(), s.energy.ln()))
        .collect();
    if usable.len() < 3 {
        return Err(DeviceError::TooFewSamples(usable.len()));
    }
    let mut currents: Vec<f64> = usable.iter().map(|&(x, _)| x).collect();
    currents.sort_by(f64::total_cmp);
    currents.dedup();
    if currents.len() < 3 {
        return Err(DeviceError::NonDistinctCurrents(currents.len()));
    }

    let n = usable.len() as f64;
    let mean_x = usable.iter().map(|&(x, _)| x).sum::<f64>() / n;
    let mean_y = usable.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in &usable {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let exponent_b = sxy / sxx;
    let coeff_a = (mean_y - exponent_b * mean_x).exp();
    let curve = EnergyCurve::new(coeff_a, exponent_b)?;

    let sum_sq: f64 = usable
        .iter()
        .map(|&(x, y)| {
            let r = y - (coeff_a.ln() + exponent_b * x);
            r * r
        })
        .sum();
    let residuals: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.current > 0.0 && s.energy > 0.0)
        .map(|s| (s.current, curve.energy_at(s.current) / s.energy - 1.0))
        .collect();
    let max_relative_residual = residuals.iter().map(|r| r.1.abs()).fold(0.0, f64::max);

    Ok(PowerLawFit {
        curve,
        used: usable.len(),
        rms_log_residual: (sum_sq / n).sqrt(),
        max_relative_residual,
        residuals,
    })
}
