use serde::{Deserialize, Serialize};

use super::PhysicsError;

/// Uniform flux grid, in units of phi0, including both hard-wall end points.
///
/// Nodes are laid out symmetrically about the window centre so that a window
/// symmetric about 0.5·phi0 maps onto itself under reflection exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxGrid {
    phi_min: f64,
    phi_max: f64,
    n_points: usize,
}

impl FluxGrid {
    pub const MIN_POINTS: usize = 201;

    pub fn new(phi_min: f64, phi_max: f64, n_points: usize) -> Result<Self, PhysicsError> {
        if !(phi_min.is_finite() && phi_max.is_finite()) {
            return Err(PhysicsError::InvalidGrid("window bounds must be finite".into()));
        }
        if !(phi_min < 0.5 && 0.5 < phi_max) {
            return Err(PhysicsError::InvalidGrid(format!(
                "window [{phi_min}, {phi_max}] must strictly contain 0.5 phi0"
            )));
        }
        if n_points < Self::MIN_POINTS || n_points.is_multiple_of(2) {
            return Err(PhysicsError::InvalidGrid(format!(
                "n_points must be odd and at least {}, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        Ok(FluxGrid { phi_min, phi_max, n_points })
    }

    /// 4001 points on [0.1, 0.9]·phi0.
    pub fn standard() -> Self {
        FluxGrid { phi_min: 0.1, phi_max: 0.9, n_points: 4001 }
    }

    pub fn phi_min(&self) -> f64 {
        self.phi_min
    }

    pub fn phi_max(&self) -> f64 {
        self.phi_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.phi_max - self.phi_min) / (self.n_points - 1) as f64
    }

    pub fn width(&self) -> f64 {
        self.phi_max - self.phi_min
    }

    /// Flux at node `i`.
    pub fn node(&self, i: usize) -> f64 {
        let centre = 0.5 * (self.phi_min + self.phi_max);
        let mid = (self.n_points / 2) as f64;
        centre + (i as f64 - mid) * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.node(i))
    }

    /// Nodes strictly inside the window (the hard walls are excluded).
    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..self.n_points - 1).map(|i| self.node(i)).collect()
    }

    /// Same window with `2n - 1` points (every old node is kept).
    pub fn refined(&self) -> Self {
        FluxGrid { n_points: 2 * self.n_points - 1, ..*self }
    }
}
