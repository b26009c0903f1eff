use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::constants::PhysicalConstants;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BiasLoopParams {
    /// Ratio of current induced in the qubit loop to the qubit's own current.
    pub mutual_coupling: f64,
    /// Qubit flux contributed by one stored fluxoid, phi0.
    pub flux_per_fluxoid: f64,
    /// Half-width of the I_extra trim range, in fluxoid equivalents.
    pub trim_range_fluxoids: f64,
    /// Smallest trim step, phi0.
    pub trim_resolution: f64,
}

impl Default for BiasLoopParams {
    fn default() -> Self {
        BiasLoopParams {
            mutual_coupling: 1e-5,
            flux_per_fluxoid: 1e-3,
            trim_range_fluxoids: 1.0,
            trim_resolution: 1e-6,
        }
    }
}

impl BiasLoopParams {
    pub const MAX_COUPLING: f64 = 1e-4;

    pub fn validate(&self) -> Result<(), String> {
        if !(self.mutual_coupling > 0.0 && self.mutual_coupling <= Self::MAX_COUPLING) {
            return Err(format!(
                "mutual_coupling must be in (0, {}], got {}",
                Self::MAX_COUPLING,
                self.mutual_coupling
            ));
        }
        for (name, v) in [
            ("flux_per_fluxoid", self.flux_per_fluxoid),
            ("trim_range_fluxoids", self.trim_range_fluxoids),
            ("trim_resolution", self.trim_resolution),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

/// Inductively coupled high-Ic rf-SQUID holding the qubit's flux bias:
/// an integer number of trapped fluxoids plus a continuous I_extra trim.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasLoop {
    pub params: BiasLoopParams,
    pub fluxoid_count: u64,
    /// Trim current, A.
    pub i_extra: f64,
    trim_flux: f64,
    mutual_inductance: f64,
}

impl BiasLoop {
    /// `qubit_inductance` sets the mutual inductance `M = k L` used to convert
    /// trim flux into I_extra.
    pub fn new(params: BiasLoopParams, qubit_inductance: f64) -> Self {
        BiasLoop {
            params,
            fluxoid_count: 0,
            i_extra: 0.0,
            trim_flux: 0.0,
            mutual_inductance: params.mutual_coupling * qubit_inductance,
        }
    }

    /// Ramp fluxoids in one by one up to the last count below `target`, then
    /// trim with I_extra. Returns the achieved flux, phi0.
    pub fn load_flux_bias(&mut self, target: f64) -> Result<f64, ProtocolError> {
        if !(0.0..1.0).contains(&target) {
            return Err(ProtocolError::TargetOutOfRange(target));
        }
        let p = &self.params;
        let count = ((target / p.flux_per_fluxoid) * (1.0 + 1e-12)).floor();
        let remainder = target - count * p.flux_per_fluxoid;
        let needed = remainder / p.flux_per_fluxoid;
        if needed.abs() > p.trim_range_fluxoids {
            return Err(ProtocolError::TrimRangeExceeded { needed, range: p.trim_range_fluxoids });
        }
        let trim = (remainder / p.trim_resolution).round() * p.trim_resolution;
        self.fluxoid_count = count as u64;
        self.trim_flux = trim;
        self.i_extra = trim * PhysicalConstants::STANDARD.phi0 / self.mutual_inductance;
        Ok(self.achieved_flux())
    }

    pub fn achieved_flux(&self) -> f64 {
        self.fluxoid_count as f64 * self.params.flux_per_fluxoid + self.trim_flux
    }

    pub fn trim_flux(&self) -> f64 {
        self.trim_flux
    }

    /// Current induced back into the qubit loop for a given qubit-loop current.
    pub fn induced_qubit_current(&self, qubit_current: f64) -> f64 {
        self.params.mutual_coupling * qubit_current.abs()
    }
}
