//! Relative errors between an analytic and a simulated loss report.

use crate::modulation::Strategy;
use crate::report::LossReport;

use super::OracleError;

/// Default pass threshold on the leg-total relative error.
pub const DEFAULT_THRESHOLD: f64 = 0.03;

/// Errors are `|analytic − simulated| / simulated`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub strategy: Strategy,
    pub analytic_total: f64,
    pub simulated_total: f64,
    /// Per-device error on the device total, indexed by switch.
    pub device_errors: [f64; 6],
    pub total_error: f64,
    pub threshold: f64,
}

impl Comparison {
    /// Verdict on the leg total.
    pub fn pass(&self) -> bool {
        self.total_error <= self.threshold
    }
}

/// Relative error, 0 when both are zero and infinite when only `reference` is.
pub fn relative_error(value: f64, reference: f64) -> f64 {
    if value == reference {
        0.0
    } else if reference == 0.0 {
        f64::INFINITY
    } else {
        (value - reference).abs() / reference.abs()
    }
}

pub fn compare_reports(
    analytic: &LossReport,
    simulated: &LossReport,
    threshold: f64,
) -> Result<Comparison, OracleError> {
    if analytic.strategy != simulated.strategy {
        return Err(OracleError::Mismatch(format!(
            "strategies differ ({} vs {})",
            analytic.strategy, simulated.strategy
        )));
    }
    if analytic.operating_point != simulated.operating_point {
        return Err(OracleError::Mismatch("operating points differ".into()));
    }
    if !(threshold >= 0.0) {
        return Err(OracleError::InvalidConfig(format!("threshold must be >= 0 (got {threshold})")));
    }
    let device_errors =
        std::array::from_fn(|i| relative_error(analytic.devices[i].total(), simulated.devices[i].total()));
    let (a, s) = (analytic.leg_total(), simulated.leg_total());
    Ok(Comparison {
        strategy: analytic.strategy,
        analytic_total: a,
        simulated_total: s,
        device_errors,
        total_error: relative_error(a, s),
        threshold,
    })
}
