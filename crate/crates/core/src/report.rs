use crate::modulation::Strategy;
use crate::types::{OperatingPoint, Switch};

/// Loss breakdown of one switch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceLoss {
    pub device: Switch,
    /// Forward (drain to source) RMS current in ampere.
    pub rms_forward: f64,
    /// Reverse (third-quadrant) RMS current in ampere.
    pub rms_reverse: f64,
    /// Conduction loss in watt.
    pub conduction: f64,
    /// Switching loss in watt.
    pub switching: f64,
}

impl DeviceLoss {
    pub fn zero(device: Switch) -> Self {
        DeviceLoss {
            device,
            rms_forward: 0.0,
            rms_reverse: 0.0,
            conduction: 0.0,
            switching: 0.0,
        }
    }

    pub fn total(&self) -> f64 {
        self.conduction + self.switching
    }
}

/// Per-device losses of one leg for one strategy and operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct LossReport {
    pub strategy: Strategy,
    pub operating_point: OperatingPoint,
    /// Indexed by [`Switch::index`].
    pub devices: [DeviceLoss; 6],
}

impl LossReport {
    pub fn new(strategy: Strategy, operating_point: OperatingPoint) -> Self {
        LossReport {
            strategy,
            operating_point,
            devices: Switch::ALL.map(DeviceLoss::zero),
        }
    }

    pub fn device(&self, sw: Switch) -> &DeviceLoss {
        &self.devices[sw.index()]
    }

    pub fn device_mut(&mut self, sw: Switch) -> &mut DeviceLoss {
        &mut self.devices[sw.index()]
    }

    pub fn conduction_total(&self) -> f64 {
        self.devices.iter().map(|d| d.conduction).sum()
    }

    pub fn switching_total(&self) -> f64 {
        self.devices.iter().map(|d| d.switching).sum()
    }

    /// Sum of all device totals.
    pub fn leg_total(&self) -> f64 {
        self.devices.iter().map(DeviceLoss::total).sum()
    }
}
