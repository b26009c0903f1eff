use std::io::Write;

use super::{
    build_hamiltonian, potential_energy, reduce_two_level, solve_lowest_levels, EigenSolution,
    FluxGrid, PhysicsError, RfSquidParams, TwoLevelSystem,
};

/// Levels solved for by default: two for the qubit, one to check separation,
/// one spare.
pub const DEFAULT_LEVELS: usize = 4;

/// Edge amplitude of the two lowest states must fall below this fraction of
/// their peak, otherwise the flux window is too narrow.
pub const EDGE_DECAY_LIMIT: f64 = 1e-8;

/// A solved device: spectrum plus its two-level reduction.
#[derive(Debug, Clone)]
pub struct QubitModel {
    pub params: RfSquidParams,
    pub grid: FluxGrid,
    pub solution: EigenSolution,
    pub two_level: TwoLevelSystem,
}

impl QubitModel {
    pub fn solve(params: RfSquidParams, grid: FluxGrid) -> Result<Self, PhysicsError> {
        let hamiltonian = build_hamiltonian(&params, &grid)?;
        let solution = solve_lowest_levels(&hamiltonian, DEFAULT_LEVELS)?;
        check_edge_decay(&solution, 2)?;
        let two_level = reduce_two_level(&solution, &params)?;
        Ok(QubitModel { params, grid, solution, two_level })
    }

    /// CSV with columns `phi,V,psi0,psi1` over the interior nodes.
    pub fn write_levels_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "phi,V,psi0,psi1")?;
        let sol = &self.solution;
        for (i, &phi) in sol.nodes.iter().enumerate() {
            writeln!(
                out,
                "{:.8},{:.9e},{:.9e},{:.9e}",
                phi,
                potential_energy(&self.params, phi),
                sol.wavefunctions[0][i],
                sol.wavefunctions[1][i]
            )?;
        }
        Ok(())
    }
}

fn check_edge_decay(sol: &EigenSolution, levels: usize) -> Result<(), PhysicsError> {
    for level in 0..levels.min(sol.levels()) {
        let psi = &sol.wavefunctions[level];
        let peak = psi.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let edge = psi[0].abs().max(psi[psi.len() - 1].abs());
        let ratio = edge / peak;
        if ratio > EDGE_DECAY_LIMIT {
            return Err(PhysicsError::BoundaryLeak { level, ratio, limit: EDGE_DECAY_LIMIT });
        }
    }
    Ok(())
}
