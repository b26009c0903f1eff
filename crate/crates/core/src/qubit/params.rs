use serde::{Deserialize, Serialize};

use super::PhysicsError;
use crate::constants::PhysicalConstants;

/// Device constants of the rf-SQUID.
///
/// Flux bias is in units of the flux quantum; everything else is SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RfSquidParams {
    /// Loop inductance, H.
    pub inductance: f64,
    /// Junction capacitance, F.
    pub capacitance: f64,
    /// Junction critical current, A.
    pub critical_current: f64,
    /// External flux bias, units of phi0, in `[0, 1)`.
    pub flux_bias: f64,
    /// Temperature, K.
    pub temperature: f64,
    /// Assumed decoherence time, s.
    pub decoherence_time: f64,
}

impl Default for RfSquidParams {
    fn default() -> Self {
        Self::design()
    }
}

impl RfSquidParams {
    /// The reference design: C = 50 fF, L = 97 pH, Ic = 3.8 µA, biased at
    /// phi0/2, 0.3 K, 10 ns decoherence time.
    pub fn design() -> Self {
        RfSquidParams {
            inductance: 97e-12,
            capacitance: 50e-15,
            critical_current: 3.8e-6,
            flux_bias: 0.5,
            temperature: 0.3,
            decoherence_time: 10e-9,
        }
    }

    pub fn validate(&self) -> Result<(), PhysicsError> {
        let positive = [
            ("inductance", self.inductance),
            ("capacitance", self.capacitance),
            ("critical_current", self.critical_current),
            ("temperature", self.temperature),
            ("decoherence_time", self.decoherence_time),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(PhysicsError::InvalidParams(format!(
                    "{name} must be finite and strictly positive, got {value}"
                )));
            }
        }
        if !(0.0..1.0).contains(&self.flux_bias) {
            return Err(PhysicsError::InvalidParams(format!(
                "flux_bias must lie in [0, 1) phi0, got {}",
                self.flux_bias
            )));
        }
        Ok(())
    }

    pub fn with_flux_bias(mut self, flux_bias: f64) -> Self {
        self.flux_bias = flux_bias;
        self
    }

    /// Screening parameter 2π·L·Ic/phi0.
    pub fn beta_l(&self) -> f64 {
        let c = PhysicalConstants::STANDARD;
        2.0 * std::f64::consts::PI * self.inductance * self.critical_current / c.phi0
    }

    /// Plasma frequency 1/√(LC), rad/s.
    pub fn plasma_frequency(&self) -> f64 {
        1.0 / (self.inductance * self.capacitance).sqrt()
    }

    /// Josephson energy Ic·phi0/2π, J.
    pub fn josephson_energy(&self) -> f64 {
        self.critical_current * PhysicalConstants::STANDARD.phi0 / (2.0 * std::f64::consts::PI)
    }
}
