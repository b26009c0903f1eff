use nalgebra::Matrix2;
use num_complex::Complex64;

use super::TwoLevelSystem;
use crate::constants::PhysicalConstants;

/// 2×2 density matrix in the localized `{Ψ+, Ψ-}` basis (index 0 is Ψ+).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    rho: Matrix2<Complex64>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Change of basis between `{Ψ+, Ψ-}` and the energy eigenstates; its own inverse.
fn hadamard() -> Matrix2<Complex64> {
    let s = c(std::f64::consts::FRAC_1_SQRT_2);
    Matrix2::new(s, s, s, -s)
}

impl QubitState {
    /// Flux localized in the left well.
    pub fn pure_plus() -> Self {
        QubitState { rho: Matrix2::new(c(1.0), c(0.0), c(0.0), c(0.0)) }
    }

    /// Flux localized in the right well.
    pub fn pure_minus() -> Self {
        QubitState { rho: Matrix2::new(c(0.0), c(0.0), c(0.0), c(1.0)) }
    }

    /// Wraps `rho` if it is Hermitian with unit trace and non-negative
    /// eigenvalues (to `tol`).
    pub fn from_matrix(rho: Matrix2<Complex64>, tol: f64) -> Option<Self> {
        let state = QubitState { rho };
        let (lo, hi) = state.eigenvalues();
        let valid = state.hermiticity_error() <= tol
            && (state.trace() - 1.0).abs() <= tol
            && lo >= -tol
            && hi <= 1.0 + tol;
        valid.then_some(state)
    }

    pub fn rho(&self) -> &Matrix2<Complex64> {
        &self.rho
    }

    pub fn population_plus(&self) -> f64 {
        self.rho[(0, 0)].re
    }

    /// Probability of reading "1" (right well).
    pub fn population_minus(&self) -> f64 {
        self.rho[(1, 1)].re
    }

    pub fn trace(&self) -> f64 {
        (self.rho[(0, 0)] + self.rho[(1, 1)]).re
    }

    pub fn hermiticity_error(&self) -> f64 {
        (self.rho - self.rho.adjoint()).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.rho[(0, 0)].re;
        let d = self.rho[(1, 1)].re;
        let b = 0.5 * (self.rho[(0, 1)] + self.rho[(1, 0)].conj());
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
        (mean - radius, mean + radius)
    }

    /// Trace distance `½ ||ρ - σ||₁`.
    pub fn trace_distance(&self, other: &QubitState) -> f64 {
        let diff = self.rho - other.rho;
        let a = diff[(0, 0)].re;
        let d = diff[(1, 1)].re;
        let b = diff[(0, 1)];
        // Eigenvalues of a traceless-plus-shift 2×2 Hermitian matrix.
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
        0.5 * ((mean - radius).abs() + (mean + radius).abs())
    }
}

/// Evolve `state` for `dt` seconds under the two-level Hamiltonian.
///
/// The coherence between the energy eigenstates rotates at `ΔE/ħ`; with
/// `decoherence_time` set it is additionally damped by `exp(-dt/t_d)`.
/// Starting from pure Ψ+ this gives a Ψ- population of
/// `½[1 - e^{-t/t_d} cos(ΔE t/ħ)]`.
pub fn evolve_state(
    state: &QubitState,
    dt: f64,
    tls: &TwoLevelSystem,
    decoherence_time: Option<f64>,
) -> QubitState {
    if dt == 0.0 {
        return *state;
    }
    let h = hadamard();
    let mut energy_basis = h * state.rho * h;
    let theta = tls.delta_e * dt / PhysicalConstants::STANDARD.hbar;
    let damping = decoherence_time.map_or(1.0, |td| (-dt / td).exp());
    let phase = Complex64::from_polar(damping, theta);
    energy_basis[(0, 1)] *= phase;
    energy_basis[(1, 0)] *= phase.conj();
    QubitState { rho: h * energy_basis * h }
}
