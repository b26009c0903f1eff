//! Physical constants.

use std::f64::consts::PI;

/// Constants used throughout the solver.
///
/// The flux quantum is the rounded value `2.07e-15 V·s` used by the device
/// design, not the CODATA value; everything else is CODATA 2018.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Magnetic flux quantum, V·s.
    pub phi0: f64,
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Planck constant, J·s.
    pub h: f64,
    /// Boltzmann constant, J/K.
    pub kb: f64,
}

impl PhysicalConstants {
    pub const STANDARD: PhysicalConstants = PhysicalConstants {
        phi0: 2.07e-15,
        hbar: 1.054_571_817e-34,
        h: 2.0 * PI * 1.054_571_817e-34,
        kb: 1.380_649e-23,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::STANDARD
    }
}
