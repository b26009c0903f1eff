use super::{potential_energy, FluxGrid, PhysicsError, RfSquidParams};
use crate::constants::PhysicalConstants;

/// Real symmetric tridiagonal operator together with the coordinates of the
/// nodes it acts on and the quadrature weight used to normalize its
/// eigenvectors (`sum |psi_i|^2 * weight = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
    nodes: Vec<f64>,
    weight: f64,
}

impl TridiagonalOperator {
    /// Plain matrix with unit quadrature weight and nodes `0, 1, 2, ...`.
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self, PhysicsError> {
        let nodes = (0..diagonal.len()).map(|i| i as f64).collect();
        Self::with_nodes(diagonal, off_diagonal, nodes, 1.0)
    }

    pub fn with_nodes(
        diagonal: Vec<f64>,
        off_diagonal: Vec<f64>,
        nodes: Vec<f64>,
        weight: f64,
    ) -> Result<Self, PhysicsError> {
        let n = diagonal.len();
        if n < 3 {
            return Err(PhysicsError::TooFewInteriorPoints(n));
        }
        if off_diagonal.len() + 1 != n || nodes.len() != n {
            return Err(PhysicsError::InvalidGrid(format!(
                "inconsistent operator lengths: {n} diagonal, {} off-diagonal, {} nodes",
                off_diagonal.len(),
                nodes.len()
            )));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(PhysicsError::InvalidGrid(format!("quadrature weight {weight} must be positive")));
        }
        if diagonal.iter().chain(&off_diagonal).any(|v| !v.is_finite()) {
            return Err(PhysicsError::InvalidGrid("operator entries must be finite".into()));
        }
        Ok(TridiagonalOperator { diagonal, off_diagonal, nodes, weight })
    }

    pub fn dimension(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// `y = T x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dimension();
        (0..n)
            .map(|i| {
                let mut y = self.diagonal[i] * x[i];
                if i > 0 {
                    y += self.off_diagonal[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off_diagonal[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Gershgorin bounds enclosing the whole spectrum.
    pub fn spectrum_bounds(&self) -> (f64, f64) {
        let n = self.dimension();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off_diagonal[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off_diagonal[i].abs() } else { 0.0 };
            lo = lo.min(self.diagonal[i] - left - right);
            hi = hi.max(self.diagonal[i] + left + right);
        }
        (lo, hi)
    }
}

/// Central-difference discretization of `-(ħ²/2C) d²/dΦ² + V` on the interior
/// nodes of `grid`, with zero (hard-wall) boundary values. `potential` takes
/// flux in units of phi0 and returns joules; the derivative uses absolute
/// flux.
pub fn build_hamiltonian_with<F>(
    grid: &FluxGrid,
    capacitance: f64,
    potential: F,
) -> Result<TridiagonalOperator, PhysicsError>
where
    F: Fn(f64) -> f64,
{
    let c = PhysicalConstants::STANDARD;
    let nodes = grid.interior_nodes();
    let step = grid.spacing() * c.phi0;
    let hopping = c.hbar * c.hbar / (2.0 * capacitance * step * step);
    let diagonal = nodes.iter().map(|&phi| 2.0 * hopping + potential(phi)).collect();
    let off_diagonal = vec![-hopping; nodes.len().saturating_sub(1)];
    TridiagonalOperator::with_nodes(diagonal, off_diagonal, nodes, grid.spacing())
}

/// Discretized rf-SQUID Hamiltonian.
pub fn build_hamiltonian(
    params: &RfSquidParams,
    grid: &FluxGrid,
) -> Result<TridiagonalOperator, PhysicsError> {
    params.validate()?;
    build_hamiltonian_with(grid, params.capacitance, |phi| potential_energy(params, phi))
}
