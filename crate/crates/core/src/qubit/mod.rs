//! Double-well rf-SQUID qubit: potential, Hamiltonian, spectrum, two-level
//! reduction, state evolution and operating-regime checks.

mod eigen;
mod grid;
mod hamiltonian;
mod model;
mod params;
mod potential;
mod regime;
mod state;
mod two_level;

use thiserror::Error;

pub use eigen::{solve_lowest_levels, EigenSolution, MAX_BISECTION_STEPS};
pub use grid::FluxGrid;
pub use hamiltonian::{build_hamiltonian, build_hamiltonian_with, TridiagonalOperator};
pub use model::QubitModel;
pub use params::RfSquidParams;
pub use potential::{potential_energy, PotentialProfile};
pub use regime::{regime_check, regime_check_levels, CheckRelation, RegimeCheck, RegimeReport, QUOTED_Q_FACTOR};
pub use state::{evolve_state, QubitState};
pub use two_level::{
    circulating_current, oscillation_probability, reduce_two_level, TwoLevelSystem,
    TWO_LEVEL_SEPARATION,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhysicsError {
    #[error("invalid device parameters: {0}")]
    InvalidParams(String),
    #[error("invalid flux grid: {0}")]
    InvalidGrid(String),
    #[error("operator needs at least 3 interior points, got {0}")]
    TooFewInteriorPoints(usize),
    #[error("cannot extract {requested} levels from a {dimension}-dimensional operator")]
    InvalidLevelCount { requested: usize, dimension: usize },
    #[error("eigensolver did not converge for level {level} after {iterations} iterations")]
    NotConverged { level: usize, iterations: usize },
    #[error("two-level reduction needs at least 3 levels, got {0}")]
    InsufficientLevels(usize),
    #[error("not a two-level system: (E2 - E1) / (E1 - E0) = {ratio:.3} is below {required}")]
    NotTwoLevel { ratio: f64, required: f64 },
    #[error("level {level} has not decayed at the window edge: edge/peak = {ratio:.3e} (limit {limit:.0e})")]
    BoundaryLeak { level: usize, ratio: f64, limit: f64 },
}
