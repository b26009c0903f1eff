//! Qubit solver checked against independent oracles: a dense symmetric
//! eigensolver, brute-force potential scans, closed-form limits.

use std::f64::consts::PI;

use mqc_core::constants::PhysicalConstants;
use mqc_core::qubit::{
    build_hamiltonian, build_hamiltonian_with, circulating_current, evolve_state,
    oscillation_probability, potential_energy, reduce_two_level, regime_check,
    solve_lowest_levels, FluxGrid, PotentialProfile, QubitModel, QubitState, RfSquidParams,
    TridiagonalOperator,
};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

const C: PhysicalConstants = PhysicalConstants::STANDARD;

/// Dense oracle: full symmetric matrix, nalgebra's eigen decomposition,
/// eigenvalues sorted ascending.
fn dense_lowest(op: &TridiagonalOperator, k: usize) -> Vec<f64> {
    let n = op.dimension();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = op.diagonal()[i];
        if i + 1 < n {
            m[(i, i + 1)] = op.off_diagonal()[i];
            m[(i + 1, i)] = op.off_diagonal()[i];
        }
    }
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values.truncate(k);
    values
}

/// Brute-force barrier: deepest point on a 1e5-node scan vs V at 0.5.
fn barrier_oracle(params: &RfSquidParams) -> f64 {
    let n = 100_000;
    let min = (0..=n)
        .map(|i| 0.1 + 0.8 * i as f64 / n as f64)
        .map(|phi| potential_energy(params, phi))
        .fold(f64::INFINITY, f64::min);
    potential_energy(params, 0.5) - min
}

fn design_model() -> QubitModel {
    QubitModel::solve(RfSquidParams::design(), FluxGrid::standard()).unwrap()
}

#[test]
fn barrier_height_matches_fine_scan() {
    let p = RfSquidParams::design();
    let profile = PotentialProfile::sample(&p, FluxGrid::standard());
    let oracle = barrier_oracle(&p);
    assert!(oracle > 0.0);
    assert!(
        (profile.barrier_height - oracle).abs() <= 1e-6 * oracle,
        "{} vs {}",
        profile.barrier_height,
        oracle
    );
}

#[test]
fn free_particle_approaches_box_spectrum() {
    let grid = FluxGrid::new(0.1, 0.9, 2001).unwrap();
    let cap = 50e-15;
    let op = build_hamiltonian_with(&grid, cap, |_| 0.0).unwrap();
    let sol = solve_lowest_levels(&op, 3).unwrap();
    let width = grid.width() * C.phi0;
    for k in 1..=3 {
        let exact = C.hbar * C.hbar * PI * PI * (k * k) as f64 / (2.0 * cap * width * width);
        let rel = (sol.energies[k - 1] - exact).abs() / exact;
        assert!(rel < 0.01, "k = {k}: rel err {rel}");
    }
}

#[test]
fn harmonic_well_has_even_gaps() {
    let grid = FluxGrid::new(0.1, 0.9, 4001).unwrap();
    let cap = 50e-15;
    let omega = 4.5e11;
    let op = build_hamiltonian_with(&grid, cap, |phi| {
        let x = (phi - 0.5) * C.phi0;
        0.5 * cap * omega * omega * x * x
    })
    .unwrap();
    let sol = solve_lowest_levels(&op, 4).unwrap();
    for w in sol.energies.windows(2) {
        let gap = w[1] - w[0];
        assert!((gap / (C.hbar * omega) - 1.0).abs() < 0.005, "gap ratio {}", gap / (C.hbar * omega));
    }
    assert!((sol.energies[0] / (0.5 * C.hbar * omega) - 1.0).abs() < 0.005);
}

#[test]
fn lowest_levels_sit_below_the_barrier() {
    let p = RfSquidParams::design();
    let grid = FluxGrid::new(0.2, 0.8, 2001).unwrap();
    let op = build_hamiltonian(&p, &grid).unwrap();
    let sol = solve_lowest_levels(&op, 2).unwrap();
    let profile = PotentialProfile::sample(&p, grid);
    let v0 = barrier_oracle(&p);
    for e in &sol.energies {
        assert!(e - profile.minimum_energy < v0);
    }
}

#[test]
fn production_solver_matches_dense_oracle() {
    for (p, grid) in [
        (RfSquidParams::design(), FluxGrid::new(0.1, 0.9, 401).unwrap()),
        (RfSquidParams::design(), FluxGrid::new(0.2, 0.8, 301).unwrap()),
        (RfSquidParams::design().with_flux_bias(0.48), FluxGrid::new(0.1, 0.9, 401).unwrap()),
    ] {
        let op = build_hamiltonian(&p, &grid).unwrap();
        let fast = solve_lowest_levels(&op, 4).unwrap();
        let dense = dense_lowest(&op, 4);
        for (a, b) in fast.energies.iter().zip(&dense) {
            assert!(((a - b) / b).abs() < 1e-9, "{a} vs {b}");
        }
        // Splitting agrees too, which is the demanding part.
        let split_fast = fast.energies[1] - fast.energies[0];
        let split_dense = dense[1] - dense[0];
        assert!(((split_fast - split_dense) / split_dense).abs() < 1e-5);
    }
}

#[test]
fn dense_oracle_reproduces_design_frequency_at_401_points() {
    let p = RfSquidParams::design();
    let op = build_hamiltonian(&p, &FluxGrid::new(0.1, 0.9, 401).unwrap()).unwrap();
    let dense = dense_lowest(&op, 2);
    let f = (dense[1] - dense[0]) / C.h;
    // 1.12 GHz quoted; the discretized value is ~1.108 GHz.
    assert!((f / 1.12e9 - 1.0).abs() < 0.2, "{f}");
    assert!((f / 1.1078e9 - 1.0).abs() < 0.005, "{f}");
}

#[test]
fn design_splitting_and_two_level_reduction() {
    let m = design_model();
    let tls = &m.two_level;
    assert!((tls.oscillation_frequency / 1.12e9 - 1.0).abs() < 0.2);
    assert!((tls.delta_e - 7.42e-25).abs() < 0.2 * 7.42e-25);
    assert!(tls.separation_ratio >= 10.0);
    let sol = &m.solution;
    assert!(sol.inner(&tls.psi_plus, &tls.psi_minus).abs() < 1e-10);
    assert!((sol.inner(&tls.psi_plus, &tls.psi_plus) - 1.0).abs() < 1e-10);
    for psi in &sol.wavefunctions {
        assert!((sol.inner(psi, psi) - 1.0).abs() < 1e-10);
    }
    for w in sol.energies.windows(2) {
        assert!(w[0] < w[1]);
    }
    // Left-well mass, integrated directly over phi < 0.5.
    let left: f64 = sol
        .nodes
        .iter()
        .zip(&tls.psi_plus)
        .filter(|(x, _)| **x < 0.5)
        .map(|(_, a)| a * a * sol.spacing)
        .sum();
    assert!(left > 0.9, "left mass {left}");
    assert!(sol.mass_below(&tls.psi_minus, 0.5) < 0.1);
}

#[test]
fn parity_of_the_two_lowest_levels() {
    let m = design_model();
    assert!((m.solution.mirror_overlap(0) - 1.0).abs() < 1e-8);
    assert!((m.solution.mirror_overlap(1) + 1.0).abs() < 1e-8);
}

#[test]
fn grid_convergence_of_the_splitting() {
    let p = RfSquidParams::design();
    let coarse = QubitModel::solve(p, FluxGrid::new(0.1, 0.9, 2001).unwrap()).unwrap();
    let fine = QubitModel::solve(p, coarse.grid.refined()).unwrap();
    let rel = (coarse.two_level.delta_e - fine.two_level.delta_e).abs() / fine.two_level.delta_e;
    assert!(rel < 0.005, "{rel}");
    // The default grid is converged well below 0.1%.
    let default = design_model();
    let rel = (default.two_level.delta_e - fine.two_level.delta_e).abs() / fine.two_level.delta_e;
    assert!(rel < 0.001, "{rel}");
}

#[test]
fn localized_currents_are_opposite_and_even_state_carries_none() {
    let m = design_model();
    let p = &m.params;
    let nodes = &m.solution.nodes;
    let plus = circulating_current(nodes, &m.two_level.psi_plus, p);
    let minus = circulating_current(nodes, &m.two_level.psi_minus, p);
    let even = circulating_current(nodes, &m.solution.wavefunctions[0], p);
    assert!(plus > 0.0 && minus < 0.0);
    assert!((plus + minus).abs() < 1e-9 * plus);
    assert!(even.abs() < 1e-9 * p.critical_current);
    // Screening current implied by <phi>: ~0.63 Ic for these parameters.
    let ratio = plus / p.critical_current;
    assert!(ratio > 0.5 && ratio < 0.9, "{ratio}");
}

#[test]
fn not_two_level_when_splitting_is_large() {
    // Nearly single-well device: the first three levels are roughly evenly spaced.
    let mut p = RfSquidParams::design();
    p.critical_current = 3.3e-6;
    let op = build_hamiltonian(&p, &FluxGrid::standard()).unwrap();
    let sol = solve_lowest_levels(&op, 4).unwrap();
    assert!(reduce_two_level(&sol, &p).is_err());
}

#[test]
fn damped_evolution_matches_closed_form_and_step_composition() {
    let m = design_model();
    let tls = &m.two_level;
    let td = 10e-9;
    let total = 30e-9;
    let closed = 0.5 * (1.0 - (-3.0f64).exp() * (tls.delta_e * total / C.hbar).cos());
    let one_shot = evolve_state(&QubitState::pure_plus(), total, tls, Some(td));
    assert!((one_shot.population_minus() - closed).abs() < 1e-3);
    let steps = 10_000;
    let mut s = QubitState::pure_plus();
    for _ in 0..steps {
        s = evolve_state(&s, total / steps as f64, tls, Some(td));
    }
    assert!((s.population_minus() - closed).abs() < 1e-3);
    assert!((s.population_minus() - one_shot.population_minus()).abs() < 1e-9);
}

#[test]
fn bias_sensitivity_at_isolation_scale() {
    let base = design_model().two_level.oscillation_frequency;
    let mut previous = base;
    let mut shifts = Vec::new();
    for k in 1..=3 {
        let dphi = 1e-5 * k as f64;
        let p = RfSquidParams::design().with_flux_bias(0.5 + dphi);
        let f = QubitModel::solve(p, FluxGrid::standard()).unwrap().two_level.oscillation_frequency;
        assert!(f.is_finite() && f > 0.0);
        // Detuning from the symmetry point only increases the splitting.
        assert!(f >= previous, "k = {k}: {f} < {previous}");
        previous = f;
        shifts.push((f - base) / base);
    }
    let minus = QubitModel::solve(RfSquidParams::design().with_flux_bias(0.5 - 1e-5), FluxGrid::standard())
        .unwrap()
        .two_level
        .oscillation_frequency;
    assert!(((minus - base) / base - shifts[0]).abs() < 1e-3);
    assert!(shifts[2] < 1.0, "relative shift at 3e-5 phi0: {}", shifts[2]);
    eprintln!("relative frequency shift at 1e-5 phi0 detuning: {:.3e}", shifts[0]);
}

#[test]
fn regime_report_values() {
    let m = design_model();
    let r = regime_check(&m.params, &m.two_level);
    assert!((r.omega_p / 4.5e11 - 1.0).abs() < 0.01);
    assert!((r.beta_l - 1.12).abs() < 0.005);
    assert!(r.check("beta_l_lower").unwrap().passed);
    assert!(r.check("beta_l_upper").unwrap().passed);
    assert!(r.check("thermal_vs_plasma").unwrap().passed);
    assert!(r.check("levels_below_barrier").unwrap().passed);
    assert!(r.check("thermalization").unwrap().passed);
    assert!(r.check("thermalization_quoted_q").unwrap().passed);
    assert!((r.thermal_over_quoted_q() / 1.4e-29 - 1.0).abs() < 0.02);
    assert!((r.q_factor / 3.3e3 - 1.0).abs() < 0.02);
    // With these parameters ħω_p exceeds the barrier; recorded, not hidden.
    let pb = r.check("plasma_vs_barrier").unwrap();
    assert!(!pb.passed && pb.lhs > pb.rhs);
    for c in &r.checks {
        assert_eq!(c.passed, c.relation.holds(c.lhs, c.rhs));
    }
}

#[test]
fn hot_device_fails_thermal_check_and_weak_junction_fails_window() {
    let m = design_model();
    let mut hot = m.params;
    hot.temperature = 10.0;
    let r = regime_check(&hot, &m.two_level);
    assert!(!r.check("thermal_vs_plasma").unwrap().passed);
    let mut weak = m.params;
    // beta_L = 0.5
    weak.critical_current = 0.5 * C.phi0 / (2.0 * PI * weak.inductance);
    let r = regime_check(&weak, &m.two_level);
    assert!((r.beta_l - 0.5).abs() < 1e-12);
    assert!(!r.check("beta_l_lower").unwrap().passed);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composed_evolution_recovers_closed_form(cuts in proptest::collection::vec(0.0f64..1.0, 1..12), total in 0.0f64..20e-9) {
        let m = design_model_cached();
        let tls = &m.two_level;
        let mut points: Vec<f64> = cuts.iter().map(|c| c * total).collect();
        points.push(0.0);
        points.push(total);
        points.sort_by(f64::total_cmp);
        let mut s = QubitState::pure_plus();
        for w in points.windows(2) {
            s = evolve_state(&s, w[1] - w[0], tls, None);
            prop_assert!((s.trace() - 1.0).abs() < 1e-12);
            let (lo, hi) = s.eigenvalues();
            prop_assert!(lo > -1e-12 && hi < 1.0 + 1e-12);
            prop_assert!(s.hermiticity_error() < 1e-12);
        }
        let expected = oscillation_probability(tls.delta_e, total);
        prop_assert!((s.population_minus() - expected).abs() < 1e-9);
    }

    #[test]
    fn damped_evolution_stays_physical(dt in 0.0f64..50e-9, td in 1e-10f64..1e-7) {
        let m = design_model_cached();
        let s = evolve_state(&QubitState::pure_plus(), dt, &m.two_level, Some(td));
        prop_assert!((s.trace() - 1.0).abs() < 1e-12);
        let (lo, hi) = s.eigenvalues();
        prop_assert!(lo > -1e-12 && hi < 1.0 + 1e-12);
    }
}

fn design_model_cached() -> &'static QubitModel {
    static MODEL: std::sync::OnceLock<QubitModel> = std::sync::OnceLock::new();
    MODEL.get_or_init(design_model)
}
