use super::{EigenSolution, PhysicsError, RfSquidParams};
use crate::constants::PhysicalConstants;

/// Minimum `(E2 - E1) / (E1 - E0)` for the two-level reduction to be accepted.
pub const TWO_LEVEL_SEPARATION: f64 = 10.0;

/// The two lowest levels and their well-localized combinations.
#[derive(Debug, Clone)]
pub struct TwoLevelSystem {
    pub e0: f64,
    pub e1: f64,
    /// Tunnel splitting `e1 - e0`, J.
    pub delta_e: f64,
    /// `delta_e / h`, Hz.
    pub oscillation_frequency: f64,
    /// `(phi_0 + phi_1)/√2`, localized in the left well.
    pub psi_plus: Vec<f64>,
    /// `(phi_0 - phi_1)/√2`, localized in the right well.
    pub psi_minus: Vec<f64>,
    /// Magnitude of the circulating current of the localized states, A.
    pub i_circ: f64,
    /// `(E2 - E1) / delta_e`.
    pub separation_ratio: f64,
}

impl TwoLevelSystem {
    /// Half a tunnelling period, `π ħ / ΔE`, s.
    pub fn half_period(&self) -> f64 {
        std::f64::consts::PI * PhysicalConstants::STANDARD.hbar / self.delta_e
    }
}

/// Reduce a solved spectrum to the two-level system spanned by levels 0 and 1.
pub fn reduce_two_level(sol: &EigenSolution, params: &RfSquidParams) -> Result<TwoLevelSystem, PhysicsError> {
    if sol.levels() < 3 {
        return Err(PhysicsError::InsufficientLevels(sol.levels()));
    }
    let (e0, e1, e2) = (sol.energies[0], sol.energies[1], sol.energies[2]);
    let delta_e = e1 - e0;
    let separation_ratio = (e2 - e1) / delta_e;
    // Written positively so a NaN ratio is rejected too.
    let resolved = delta_e > 0.0 && separation_ratio >= TWO_LEVEL_SEPARATION;
    if !resolved {
        return Err(PhysicsError::NotTwoLevel {
            ratio: separation_ratio,
            required: TWO_LEVEL_SEPARATION,
        });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (phi0_state, phi1_state) = (&sol.wavefunctions[0], &sol.wavefunctions[1]);
    let psi_plus: Vec<f64> = phi0_state.iter().zip(phi1_state).map(|(a, b)| s * (a + b)).collect();
    let psi_minus: Vec<f64> = phi0_state.iter().zip(phi1_state).map(|(a, b)| s * (a - b)).collect();
    let i_circ = circulating_current(&sol.nodes, &psi_plus, params).abs();
    Ok(TwoLevelSystem {
        e0,
        e1,
        delta_e,
        oscillation_frequency: delta_e / PhysicalConstants::STANDARD.h,
        psi_plus,
        psi_minus,
        i_circ,
        separation_ratio,
    })
}

/// Screening current implied by the expected flux of `amplitudes` on `nodes`,
/// `(phi_x - <phi>) phi0 / L`. Positive (counter-clockwise) for a left-well
/// state.
pub fn circulating_current(nodes: &[f64], amplitudes: &[f64], params: &RfSquidParams) -> f64 {
    let (mut weight, mut moment) = (0.0, 0.0);
    for (&phi, &a) in nodes.iter().zip(amplitudes) {
        weight += a * a;
        moment += phi * a * a;
    }
    let expected_flux = moment / weight;
    (params.flux_bias - expected_flux) * PhysicalConstants::STANDARD.phi0 / params.inductance
}

/// Probability of finding the flux in the right well a time `t` after it was
/// localized in the left well: `(1 - cos(ΔE t / ħ)) / 2`.
pub fn oscillation_probability(delta_e: f64, t: f64) -> f64 {
    0.5 * (1.0 - (delta_e * t / PhysicalConstants::STANDARD.hbar).cos())
}
