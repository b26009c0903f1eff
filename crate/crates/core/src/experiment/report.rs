use std::fmt::Write;

use crate::config::Config;
use crate::constants::PhysicalConstants;
use crate::control::{ControlCircuit, CHAIN_MODULUS};
use crate::error::Result;
use crate::qubit::{
    build_hamiltonian, regime_check, regime_check_levels, solve_lowest_levels, PhysicsError, QubitModel,
    RegimeReport, TwoLevelSystem,
};

/// Regime report for a solved device, printable as text or a CSV row.
#[derive(Debug, Clone)]
pub struct RegimeSummary {
    pub report: RegimeReport,
    /// `None` when the spectrum does not reduce to two levels.
    pub two_level: Option<TwoLevelSystem>,
    /// Why the two-level reduction was refused, if it was.
    pub reduction_error: Option<String>,
}

/// Regime report for the configured device. A device outside the two-level
/// regime still gets a report, built from its two lowest levels.
pub fn report_regime(config: &Config) -> Result<RegimeSummary> {
    config.validate()?;
    let grid = config.grid.to_grid()?;
    match QubitModel::solve(config.device, grid) {
        Ok(model) => Ok(RegimeSummary::new(&model)),
        Err(e @ (PhysicsError::NotTwoLevel { .. } | PhysicsError::BoundaryLeak { .. })) => {
            let op = build_hamiltonian(&config.device, &grid)?;
            let sol = solve_lowest_levels(&op, 2)?;
            Ok(RegimeSummary {
                report: regime_check_levels(&config.device, sol.energies[0], sol.energies[1]),
                two_level: None,
                reduction_error: Some(e.to_string()),
            })
        }
        Err(e) => Err(e.into()),
    }
}

impl RegimeSummary {
    pub fn new(model: &QubitModel) -> Self {
        RegimeSummary {
            report: regime_check(&model.params, &model.two_level),
            two_level: Some(model.two_level.clone()),
            reduction_error: None,
        }
    }

    pub fn to_text(&self) -> String {
        let r = &self.report;
        let h = PhysicalConstants::STANDARD.h;
        let mut s = String::new();
        let _ = writeln!(s, "beta_L            {:.4}", r.beta_l);
        let _ = writeln!(s, "omega_p           {:.4e} rad/s", r.omega_p);
        let _ = writeln!(s, "hbar*omega_p      {:.4e} J", r.plasma_energy);
        let _ = writeln!(s, "V0                {:.4e} J", r.barrier_height);
        let _ = writeln!(s, "kB*T              {:.4e} J", r.thermal_energy);
        let _ = writeln!(s, "deltaE            {:.4e} J ({:.4} GHz)", r.delta_e, r.delta_e / h * 1e-9);
        match (&self.two_level, &self.reduction_error) {
            (Some(tls), _) => {
                let _ = writeln!(s, "(E2-E1)/deltaE    {:.2}", tls.separation_ratio);
                let _ = writeln!(s, "I_circ            {:.4e} A", tls.i_circ);
            }
            (None, Some(e)) => {
                let _ = writeln!(s, "two-level reduction refused: {e}");
            }
            (None, None) => {}
        }
        let _ = writeln!(s, "Q = omega_p*t_d/(2 ln 2)  {:.4e}", r.q_factor);
        let _ = writeln!(s, "Q quoted                  {:.4e}", r.q_quoted);
        let _ = writeln!(
            s,
            "note: quoted Q is {:.1}x the closed-form value; kB*T/Q is {:.3e} J with the quoted Q and {:.3e} J with the closed form",
            r.q_discrepancy(),
            r.thermal_over_quoted_q(),
            r.thermal_over_q()
        );
        for c in &r.checks {
            let _ = writeln!(
                s,
                "[{}] {:<24} {} = {:.4e} {} {} = {:.4e}",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.lhs_label,
                c.lhs,
                c.relation.symbol(),
                c.rhs_label,
                c.rhs
            );
        }
        s
    }

    pub fn csv_header(&self) -> String {
        let mut cols = vec![
            "beta_l", "omega_p", "plasma_energy", "barrier_height", "thermal_energy", "delta_e", "q_factor",
            "q_quoted", "thermal_over_quoted_q",
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
        cols.extend(self.report.checks.iter().map(|c| c.name.to_string()));
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let r = &self.report;
        let mut cols: Vec<String> = [
            r.beta_l,
            r.omega_p,
            r.plasma_energy,
            r.barrier_height,
            r.thermal_energy,
            r.delta_e,
            r.q_factor,
            r.q_quoted,
            r.thermal_over_quoted_q(),
        ]
        .iter()
        .map(|v| format!("{v:.6e}"))
        .collect();
        cols.extend(r.checks.iter().map(|c| if c.passed { "pass" } else { "fail" }.to_string()));
        cols.join(",")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimingRow {
    pub n: u32,
    pub expected_ps: u64,
    pub measured_ps: u64,
}

/// Run the full protocol once for every `n` on a calibrated circuit.
pub fn timing_table(config: &Config) -> Result<Vec<TimingRow>> {
    config.validate()?;
    let mut cc = ControlCircuit::calibrated(config.circuit, config.device.inductance)?;
    cc.load_flux_bias(config.device.flux_bias)?;
    let mut rows = Vec::with_capacity(CHAIN_MODULUS as usize);
    for n in 0..CHAIN_MODULUS {
        let (outcome, _) = cc.run_protocol(n)?;
        rows.push(TimingRow {
            n,
            expected_ps: u64::from(CHAIN_MODULUS - n) * config.circuit.ring_period_ps,
            measured_ps: outcome.interval_ps(),
        });
    }
    Ok(rows)
}

/// For every `k` in 1..=128, preload the chain at `128 - k` and count the
/// drain pulses. Returns `(k, pulses)`.
pub fn drain_table(config: &Config) -> Result<Vec<(u32, u32)>> {
    config.validate()?;
    let mut cc = ControlCircuit::calibrated(config.circuit, config.device.inductance)?;
    let mut rows = Vec::with_capacity(CHAIN_MODULUS as usize);
    for k in 1..=CHAIN_MODULUS {
        cc.preload_chain(CHAIN_MODULUS - k);
        rows.push((k, cc.drain_tff()?));
    }
    Ok(rows)
}
