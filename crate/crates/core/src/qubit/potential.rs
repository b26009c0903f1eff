use std::f64::consts::PI;

use super::{FluxGrid, RfSquidParams};
use crate::constants::PhysicalConstants;

/// rf-SQUID potential at total flux `phi` (units of phi0), in joules:
/// `(phi - phi_x)^2 phi0^2 / 2L - (Ic phi0 / 2π) cos(2π phi)`.
pub fn potential_energy(params: &RfSquidParams, phi: f64) -> f64 {
    let phi0 = PhysicalConstants::STANDARD.phi0;
    let offset = phi - params.flux_bias;
    offset * offset * phi0 * phi0 / (2.0 * params.inductance)
        - params.josephson_energy() * (2.0 * PI * phi).cos()
}

/// Potential sampled on a grid, with its wells and barrier located.
#[derive(Debug, Clone)]
pub struct PotentialProfile {
    pub grid: FluxGrid,
    /// Energy at each grid node, J.
    pub values: Vec<f64>,
    /// Barrier height above the deeper well, J. Zero for a single well.
    pub barrier_height: f64,
    /// Flux at each local minimum, ascending. Refined below grid resolution.
    pub well_minima: Vec<f64>,
    /// Potential at the deepest minimum, J.
    pub minimum_energy: f64,
}

impl PotentialProfile {
    pub fn sample(params: &RfSquidParams, grid: FluxGrid) -> Self {
        let nodes: Vec<f64> = grid.nodes().collect();
        let values: Vec<f64> = nodes.iter().map(|&phi| potential_energy(params, phi)).collect();
        let h = grid.spacing();

        let mut well_minima = Vec::new();
        let mut minimum_indices = Vec::new();
        for i in 1..values.len() - 1 {
            if values[i] < values[i - 1] && values[i] <= values[i + 1] {
                minimum_indices.push(i);
                well_minima.push(parabolic_vertex(&nodes, &values, i, h));
            }
        }
        let minima_values: Vec<f64> =
            well_minima.iter().map(|&phi| potential_energy(params, phi)).collect();
        let minimum_energy = minima_values
            .iter()
            .copied()
            .fold(values.iter().copied().fold(f64::INFINITY, f64::min), f64::min);

        let barrier_height = if minimum_indices.len() >= 2 {
            let (lo, hi) = (minimum_indices[0], *minimum_indices.last().unwrap());
            let top = (lo..=hi).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
            let top_phi = if top > lo && top < hi {
                parabolic_vertex(&nodes, &values, top, h)
            } else {
                nodes[top]
            };
            potential_energy(params, top_phi).max(values[top]) - minimum_energy
        } else {
            0.0
        };

        PotentialProfile { grid, values, barrier_height, well_minima, minimum_energy }
    }
}

/// Vertex of the parabola through nodes `i-1, i, i+1`.
fn parabolic_vertex(nodes: &[f64], values: &[f64], i: usize, h: f64) -> f64 {
    let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
    let curvature = a - 2.0 * b + c;
    if curvature == 0.0 {
        return nodes[i];
    }
    let shift = 0.5 * (a - c) / curvature;
    nodes[i] + shift.clamp(-1.0, 1.0) * h
}
