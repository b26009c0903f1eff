use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::control::{ControlCircuit, DelayBudget, ProtocolError, StartOutcome, CHAIN_MODULUS};
use crate::error::Result;
use crate::qubit::{evolve_state, QubitModel, QubitState};
use crate::readout::ReadoutChain;

/// Outcome of one prepare / evolve / measure cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub n: u32,
    pub trial_index: u64,
    /// `(128 - n) T`, s.
    pub scheduled_t: f64,
    /// Measured free-evolution time, ps.
    pub evolution_ps: u64,
    pub data_out: bool,
    pub collapse_draw: f64,
    /// Ψ− population at actuation.
    pub p_one: f64,
    pub jout_current_fraction: f64,
    pub drain_pulses: u32,
}

/// Random stream for one trial: the run seed selects the key, `(n, index)`
/// the ChaCha stream, so any trial can be replayed in isolation.
pub fn trial_rng(seed: u64, n: u32, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(n) << 48) ^ trial_index);
    rng
}

/// Everything shared by the trials of one run: the solved qubit and a
/// calibrated, idle control circuit that each trial clones.
#[derive(Debug, Clone)]
pub struct TrialContext {
    pub config: Config,
    pub model: QubitModel,
    pub budget: DelayBudget,
    circuit: ControlCircuit,
}

fn hygiene(msg: String) -> ProtocolError {
    ProtocolError::Hygiene(msg)
}

impl TrialContext {
    pub fn new(config: &Config) -> Result<Self> {
        config.validate()?;
        let model = QubitModel::solve(config.device, config.grid.to_grid()?)?;
        Self::with_model(config, model)
    }

    /// Reuse an already solved qubit model.
    pub fn with_model(config: &Config, model: QubitModel) -> Result<Self> {
        config.validate()?;
        let mut circuit = ControlCircuit::new(config.circuit, config.device.inductance)?;
        let budget = circuit.calibrate_delay()?;
        ReadoutChain::new(config.readout)?;
        Ok(TrialContext { config: config.clone(), model, budget, circuit })
    }

    pub fn circuit(&self) -> &ControlCircuit {
        &self.circuit
    }

    /// `(128 - n) T`, ps.
    pub fn scheduled_ps(&self, n: u32) -> u64 {
        u64::from(CHAIN_MODULUS - n) * self.config.circuit.ring_period_ps
    }

    pub fn scheduled_t(&self, n: u32) -> f64 {
        self.scheduled_ps(n) as f64 * 1e-12
    }

    pub fn run_trial(&self, n: u32, trial_index: u64) -> Result<TrialRecord> {
        self.run(n, trial_index, false).map(|(r, _)| r)
    }

    /// Same as [`TrialContext::run_trial`] with the event trace recorded.
    pub fn run_trial_traced(&self, n: u32, trial_index: u64) -> Result<(TrialRecord, String)> {
        self.run(n, trial_index, true)
    }

    fn run(&self, n: u32, trial_index: u64, traced: bool) -> Result<(TrialRecord, String)> {
        let device = &self.config.device;
        let tls = &self.model.two_level;
        let mut rng = trial_rng(self.config.experiment.rng_seed, n, trial_index);
        let mut cc = self.circuit.clone();
        if traced {
            cc.enable_trace();
        }
        let resolution = self.config.circuit.bias.trim_resolution;
        cc.load_flux_bias(device.flux_bias)?;

        let spacing = self.config.circuit.slow_train_spacing_ps;
        cc.apply_set(cc.now() + spacing)?;
        let state = QubitState::pure_plus();
        let mut chain = ReadoutChain::new(self.config.readout)?;
        chain.set_states(cc.readout_dro_states());

        cc.program_delay(n)?;
        cc.close_switch()?;
        let outcome: StartOutcome = cc.apply_start(cc.now() + spacing)?;
        let restored = cc.qubit_flux();
        if (restored - device.flux_bias).abs() > resolution {
            return Err(hygiene(format!("bias {restored} phi0 not restored after START")).into());
        }
        let expected = self.scheduled_ps(n);
        if outcome.interval_ps() != expected {
            return Err(ProtocolError::TimingViolation { measured_ps: outcome.interval_ps(), expected_ps: expected }.into());
        }

        let dt = outcome.interval_ps() as f64 * 1e-12;
        let decoherence = self.config.experiment.decoherence_enabled.then_some(device.decoherence_time);
        let state = evolve_state(&state, dt, tls, decoherence);
        let p_one = state.population_minus().clamp(0.0, 1.0);

        chain.arm(outcome.actuation)?;
        let draw: f64 = rng.random();
        let sign = if draw < p_one { 1 } else { -1 };
        let result = chain.sense(sign, tls.i_circ)?;
        if result.data_out {
            cc.record_data_out()?;
        }

        cc.finish_measurement()?;
        if cc.readout_dro_states() != [true, false, false] {
            return Err(hygiene(format!("readout DROs {:?} after OUT", cc.readout_dro_states())).into());
        }
        if cc.out_pulses() != 1 {
            return Err(hygiene(format!("{} OUT pulses in one trial", cc.out_pulses())).into());
        }
        if cc.data_out_count() != u64::from(result.data_out) {
            return Err(hygiene(format!("{} Data Out pulses for decision {}", cc.data_out_count(), result.data_out)).into());
        }
        let drain_pulses = cc.drain_tff()?;
        cc.ready_next()?;
        if cc.chain_counter() != 0 || cc.tipping_stored() || cc.end_stored() || cc.readout_dro_states() != [false; 3] {
            return Err(hygiene("circuit not idle after drain".into()).into());
        }

        let record = TrialRecord {
            n,
            trial_index,
            scheduled_t: self.scheduled_t(n),
            evolution_ps: outcome.interval_ps(),
            data_out: result.data_out,
            collapse_draw: draw,
            p_one,
            jout_current_fraction: result.jout_current_fraction,
            drain_pulses,
        };
        Ok((record, cc.trace_text()))
    }
}
