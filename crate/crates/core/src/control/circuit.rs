use serde::{Deserialize, Serialize};

use super::{BiasLoop, BiasLoopParams, ProtocolError};
use crate::rsfq::{CellDelays, ComponentId, ComponentKind, Netlist, NetlistError, NodeId, SimTime, Simulation};

pub const TFF_STAGES: usize = 7;
/// Pulses needed for one output of the TFF chain.
pub const CHAIN_MODULUS: u32 = 1 << TFF_STAGES;
const MAX_DRAIN_PULSES: u32 = 2 * CHAIN_MODULUS + 1;
const EVENT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CircuitParams {
    pub delays: CellDelays,
    pub ring_period_ps: u64,
    /// Spacing of the programming and drain trains, ps.
    pub slow_train_spacing_ps: u64,
    /// How far SET pulls the qubit bias below its target, phi0.
    pub tip_magnitude: f64,
    /// Time the ring keeps running after readout actuation, ps.
    pub hold_after_actuation_ps: u64,
    pub bias: BiasLoopParams,
}

impl Default for CircuitParams {
    fn default() -> Self {
        CircuitParams {
            delays: CellDelays::default(),
            ring_period_ps: 100,
            slow_train_spacing_ps: 1000,
            tip_magnitude: 0.05,
            hold_after_actuation_ps: 13_000,
            bias: BiasLoopParams::default(),
        }
    }
}

impl CircuitParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.ring_period_ps == 0 {
            return Err("ring_period_ps must be positive".into());
        }
        let d = &self.delays;
        let max_delay = [d.jtl, d.tff, d.dro, d.splitter, d.confluence].into_iter().max().unwrap_or(0);
        if self.slow_train_spacing_ps == 0 || self.slow_train_spacing_ps <= max_delay {
            return Err(format!(
                "slow_train_spacing_ps ({}) must exceed every cell delay ({max_delay})",
                self.slow_train_spacing_ps
            ));
        }
        if !(self.tip_magnitude > 0.0 && self.tip_magnitude < 0.5) {
            return Err(format!("tip_magnitude must be in (0, 0.5), got {}", self.tip_magnitude));
        }
        self.bias.validate()
    }
}

/// Compensation delay on the START → tipping-DRO path and the latency it
/// must match: from the ring tick that completes the count to readout
/// actuation (TFF chain, END DRO, OUT fan-out).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelayBudget {
    pub jtl_delay_ps: u64,
    pub out_path_latency_ps: u64,
    /// Part of the latency between END DRO release and actuation.
    pub end_to_actuation_ps: u64,
}

/// Times recorded while START propagates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StartOutcome {
    pub start: SimTime,
    /// Tipping DRO release: the qubit bias returns to its target.
    pub evolution_start: SimTime,
    pub end_dro_release: SimTime,
    /// OUT pulse reaches the readout.
    pub actuation: SimTime,
}

impl StartOutcome {
    /// Free-evolution time, ps.
    pub fn interval_ps(&self) -> u64 {
        self.actuation - self.evolution_start
    }
}

/// Named cells and ports of the control circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircuitHandles {
    pub set_port: NodeId,
    pub start_port: NodeId,
    pub program_port: NodeId,
    /// Clock of readout squid 1's DRO, used to clear it between trials.
    pub reset_port: NodeId,
    pub data_out_port: NodeId,
    pub out_node: NodeId,
    pub tipping_dro: ComponentId,
    pub end_dro: ComponentId,
    pub tff_chain: [ComponentId; TFF_STAGES],
    /// The ring oscillator; its switch is the explicit boolean on this cell.
    pub ring_osc: ComponentId,
    pub jtl_delay: ComponentId,
    pub confluence: ComponentId,
    pub tff_out_converter: ComponentId,
    pub jout_converter: ComponentId,
    pub data_out_converter: ComponentId,
    pub readout_dros: [ComponentId; 3],
}

/// The SFQ control circuit driving one qubit, with its flux-bias loop.
///
/// SET fans out to the tipping DRO, the END DRO and readout DROs 2 and 3.
/// START fans out to the compensation JTL (→ tipping DRO clock) and the ring
/// oscillator. The ring and the programming port merge into the 7-stage TFF
/// chain, whose output clocks the END DRO. The END DRO output is the OUT
/// pulse: it sets readout DRO 1, clocks DROs 2 and 3 and actuates J_out.
#[derive(Debug, Clone)]
pub struct ControlCircuit {
    sim: Simulation,
    params: CircuitParams,
    handles: CircuitHandles,
    bias: BiasLoop,
}

struct Builder {
    net: Netlist,
}

impl Builder {
    fn node(&mut self, name: &str) -> Result<NodeId, NetlistError> {
        self.net.add_node(name)
    }

    fn cell(
        &mut self,
        name: &str,
        kind: ComponentKind,
        inputs: &[NodeId],
        outputs: &[NodeId],
    ) -> Result<ComponentId, NetlistError> {
        self.net.add_component(name, kind, inputs, outputs)
    }

    fn split(&mut self, name: &str, input: NodeId, delay: u64) -> Result<(NodeId, NodeId), NetlistError> {
        let a = self.node(&format!("{name}.a"))?;
        let b = self.node(&format!("{name}.b"))?;
        self.cell(name, ComponentKind::Splitter { delay }, &[input], &[a, b])?;
        Ok((a, b))
    }

    fn sink(&mut self, name: &str, input: NodeId) -> Result<ComponentId, NetlistError> {
        self.cell(name, ComponentKind::EscapeSink, &[input], &[])
    }
}

fn build(params: &CircuitParams) -> Result<(Netlist, CircuitHandles), NetlistError> {
    let d = params.delays;
    let mut b = Builder { net: Netlist::new() };

    let set_port = b.node("set_in")?;
    let start_port = b.node("start_in")?;
    let program_port = b.node("program_in")?;
    let reset_port = b.node("reset_in")?;
    let data_out_port = b.node("data_out_in")?;

    let (tip_in, set_rest) = b.split("set_split1", set_port, d.splitter)?;
    let (end_in, set_sq) = b.split("set_split2", set_rest, d.splitter)?;
    let (sq2_in, sq3_in) = b.split("set_split3", set_sq, d.splitter)?;

    let (to_jtl, ring_start) = b.split("start_split", start_port, d.splitter)?;
    let tip_clk = b.node("tip_clk")?;
    let jtl_delay = b.cell("jtl_delay", ComponentKind::Jtl { delay: d.jtl }, &[to_jtl], &[tip_clk])?;
    let tip_out = b.node("tip_out")?;
    let tipping_dro = b.cell("tipping_dro", ComponentKind::dro(d.dro), &[tip_in, tip_clk], &[tip_out])?;
    b.sink("tip_release", tip_out)?;

    let ring_out = b.node("ring_out")?;
    let ring_osc = b.net.add_ring_oscillator("ring_osc", params.ring_period_ps, false, ring_start, ring_out)?;

    let mut chain_node = b.node("chain0")?;
    let confluence = b.cell(
        "chain_merge",
        ComponentKind::ConfluenceBuffer { delay: d.confluence },
        &[ring_out, program_port],
        &[chain_node],
    )?;
    let mut tff_chain = [ComponentId(0); TFF_STAGES];
    for (i, slot) in tff_chain.iter_mut().enumerate() {
        let next = b.node(&format!("chain{}", i + 1))?;
        *slot = b.cell(&format!("tff{i}"), ComponentKind::tff(d.tff), &[chain_node], &[next])?;
        chain_node = next;
    }
    let (end_clk, tff_out) = b.split("tff_out_split", chain_node, d.splitter)?;
    let tff_out_converter = b.cell("tff_out", ComponentKind::converter(), &[tff_out], &[])?;

    let out_node = b.node("out")?;
    let end_dro = b.cell("end_dro", ComponentKind::dro(d.dro), &[end_in, end_clk], &[out_node])?;
    let (out_a, out_b) = b.split("out_split1", out_node, d.splitter)?;
    let (sq1_in, sq2_clk) = b.split("out_split2", out_a, d.splitter)?;
    let (sq3_clk, jout) = b.split("out_split3", out_b, d.splitter)?;
    let jout_converter = b.cell("jout", ComponentKind::converter(), &[jout], &[])?;

    let mut readout_dros = [ComponentId(0); 3];
    for (i, (input, clock)) in [(sq1_in, reset_port), (sq2_in, sq2_clk), (sq3_in, sq3_clk)].into_iter().enumerate() {
        let out = b.node(&format!("sq{}_out", i + 1))?;
        readout_dros[i] = b.cell(&format!("sq{}_dro", i + 1), ComponentKind::dro(d.dro), &[input, clock], &[out])?;
        b.sink(&format!("sq{}_release", i + 1), out)?;
    }
    let data_out_converter = b.cell("data_out", ComponentKind::converter(), &[data_out_port], &[])?;

    let handles = CircuitHandles {
        set_port,
        start_port,
        program_port,
        reset_port,
        data_out_port,
        out_node,
        tipping_dro,
        end_dro,
        tff_chain,
        ring_osc,
        jtl_delay,
        confluence,
        tff_out_converter,
        jout_converter,
        data_out_converter,
        readout_dros,
    };
    Ok((b.net, handles))
}

impl ControlCircuit {
    /// Builds the circuit with the compensation JTL at `params.delays.jtl`;
    /// call [`ControlCircuit::calibrate_delay`] before timing-critical use.
    pub fn new(params: CircuitParams, qubit_inductance: f64) -> Result<Self, ProtocolError> {
        params.validate().map_err(ProtocolError::Hygiene)?;
        let (net, handles) = build(&params)?;
        Ok(ControlCircuit {
            sim: Simulation::new(net),
            params,
            handles,
            bias: BiasLoop::new(params.bias, qubit_inductance),
        })
    }

    pub fn calibrated(params: CircuitParams, qubit_inductance: f64) -> Result<Self, ProtocolError> {
        let mut cc = Self::new(params, qubit_inductance)?;
        cc.calibrate_delay()?;
        Ok(cc)
    }

    pub fn params(&self) -> &CircuitParams {
        &self.params
    }

    pub fn handles(&self) -> &CircuitHandles {
        &self.handles
    }

    pub fn simulation(&self) -> &Simulation {
        &self.sim
    }

    pub fn netlist(&self) -> &Netlist {
        self.sim.netlist()
    }

    pub fn bias(&self) -> &BiasLoop {
        &self.bias
    }

    pub fn now(&self) -> SimTime {
        self.sim.now()
    }

    pub fn enable_trace(&mut self) {
        self.sim.enable_trace();
    }

    pub fn trace_text(&self) -> String {
        self.sim.trace_text()
    }

    /// Override one cell's delay (for delay-variation studies).
    pub fn set_cell_delay(&mut self, id: ComponentId, delay: u64) {
        self.sim.set_delay(id, delay);
    }

    pub fn load_flux_bias(&mut self, target: f64) -> Result<f64, ProtocolError> {
        self.bias.load_flux_bias(target)
    }

    /// External flux seen by the qubit: the loaded bias, minus the tip while
    /// the tipping DRO holds SET.
    pub fn qubit_flux(&self) -> f64 {
        let tipped = self.tipping_stored();
        self.bias.achieved_flux() - if tipped { self.params.tip_magnitude } else { 0.0 }
    }

    pub fn tipping_stored(&self) -> bool {
        self.sim.dro_stored(self.handles.tipping_dro).unwrap_or(false)
    }

    pub fn end_stored(&self) -> bool {
        self.sim.dro_stored(self.handles.end_dro).unwrap_or(false)
    }

    /// Stored flags of readout DROs 1, 2, 3.
    pub fn readout_dro_states(&self) -> [bool; 3] {
        self.handles.readout_dros.map(|id| self.sim.dro_stored(id).unwrap_or(false))
    }

    pub fn switch_closed(&self) -> bool {
        self.sim.switch_closed(self.handles.ring_osc).unwrap_or(false)
    }

    /// Value held by the TFF chain, stage 0 least significant.
    pub fn chain_counter(&self) -> u32 {
        self.handles
            .tff_chain
            .iter()
            .enumerate()
            .map(|(i, id)| u32::from(self.sim.tff_state(*id).unwrap_or(false)) << i)
            .sum()
    }

    /// Force the chain to `value mod 128` (test fixture).
    pub fn preload_chain(&mut self, value: u32) {
        for (i, id) in self.handles.tff_chain.iter().enumerate() {
            self.sim.set_tff_state(*id, (value >> i) & 1 == 1);
        }
    }

    /// OUT pulses emitted by the END DRO so far.
    pub fn out_pulses(&self) -> u64 {
        self.sim.stats(self.handles.end_dro).pulses_out
    }

    /// Clock pulses that found the END DRO empty.
    pub fn end_dro_escapes(&self) -> u64 {
        self.sim.stats(self.handles.end_dro).escapes
    }

    pub fn tff_out_count(&self) -> u64 {
        self.sim.sfqdc_read(self.handles.tff_out_converter).unwrap_or(0)
    }

    pub fn data_out_count(&self) -> u64 {
        self.sim.sfqdc_read(self.handles.data_out_converter).unwrap_or(0)
    }

    pub fn actuation_count(&self) -> u64 {
        self.sim.sfqdc_read(self.handles.jout_converter).unwrap_or(0)
    }

    fn settle(&mut self) -> Result<(), ProtocolError> {
        self.sim.run_to_quiescence(EVENT_BUDGET)?;
        Ok(())
    }

    fn slow_time(&self, k: u64) -> SimTime {
        self.sim.now() + k * self.params.slow_train_spacing_ps
    }

    pub fn apply_set(&mut self, t: SimTime) -> Result<(), ProtocolError> {
        if self.tipping_stored() {
            return Err(ProtocolError::DoubleSet);
        }
        self.sim.inject_pulse(self.handles.set_port, t)?;
        self.settle()
    }

    /// Send `n` slow pulses into the TFF chain, adding `n` to its counter.
    pub fn program_delay(&mut self, n: u32) -> Result<(), ProtocolError> {
        if n >= CHAIN_MODULUS {
            return Err(ProtocolError::DelayOutOfRange(n));
        }
        if self.switch_closed() {
            return Err(ProtocolError::SwitchClosed("programming"));
        }
        for k in 1..=u64::from(n) {
            self.sim.inject_pulse(self.handles.program_port, self.slow_time(k))?;
        }
        self.settle()
    }

    fn set_switch(&mut self, closed: bool) -> Result<(), ProtocolError> {
        let now = self.sim.now();
        self.sim.schedule_switch(self.handles.ring_osc, closed, now)?;
        self.sim.run_until(now);
        Ok(())
    }

    pub fn close_switch(&mut self) -> Result<(), ProtocolError> {
        self.set_switch(true)
    }

    pub fn open_switch(&mut self) -> Result<(), ProtocolError> {
        self.set_switch(false)
    }

    /// Inject START at `t` and run until the OUT pulse actuates the readout.
    pub fn apply_start(&mut self, t: SimTime) -> Result<StartOutcome, ProtocolError> {
        if !self.tipping_stored() {
            return Err(ProtocolError::StartWithoutSet);
        }
        if !self.switch_closed() {
            return Err(ProtocolError::SwitchOpen);
        }
        let jout = self.handles.jout_converter;
        let base = self.actuation_count();
        self.sim.inject_pulse(self.handles.start_port, t)?;
        let total_delay: u64 = self.netlist().components().iter().filter_map(|c| c.kind.delay()).sum();
        let deadline = t + (u64::from(CHAIN_MODULUS) + 2) * self.params.ring_period_ps + total_delay;
        let reached = self
            .sim
            .run_until_condition(deadline, |s| s.sfqdc_read(jout).unwrap_or(0) > base);
        if !reached {
            return Err(ProtocolError::NoActuation { deadline_ps: deadline.ps() });
        }
        let missing = |what: &str| ProtocolError::Hygiene(format!("{what} did not release during START"));
        let evolution_start = self.sim.dro_last_release(self.handles.tipping_dro).ok_or_else(|| missing("tipping DRO"))?;
        let end_dro_release = self.sim.dro_last_release(self.handles.end_dro).ok_or_else(|| missing("END DRO"))?;
        let actuation = self.sim.converter_last_arrival(jout).ok_or_else(|| missing("J_out"))?;
        Ok(StartOutcome { start: t, evolution_start, end_dro_release, actuation })
    }

    /// Keep the ring running for the configured hold time, then open the
    /// switch and let the circuit settle.
    pub fn finish_measurement(&mut self) -> Result<(), ProtocolError> {
        let until = self.sim.now() + self.params.hold_after_actuation_ps;
        self.sim.run_until(until);
        self.open_switch()?;
        self.settle()
    }

    /// Feed slow pulses until the TFF-out converter counts one; the chain is
    /// then at zero. Returns the number of pulses used.
    pub fn drain_tff(&mut self) -> Result<u32, ProtocolError> {
        if self.switch_closed() {
            return Err(ProtocolError::SwitchClosed("draining"));
        }
        let base = self.tff_out_count();
        for k in 1..=MAX_DRAIN_PULSES {
            self.sim.inject_pulse(self.handles.program_port, self.slow_time(1))?;
            self.settle()?;
            if self.tff_out_count() > base {
                return Ok(k);
            }
        }
        Err(ProtocolError::DrainExhausted(MAX_DRAIN_PULSES))
    }

    /// Emit the Data Out pulse for a "1" decision.
    pub fn record_data_out(&mut self) -> Result<(), ProtocolError> {
        let now = self.sim.now();
        self.sim.inject_pulse(self.handles.data_out_port, now)?;
        self.sim.run_until(now);
        Ok(())
    }

    /// Clear readout DRO 1 and zero the converters for the next trial.
    pub fn ready_next(&mut self) -> Result<(), ProtocolError> {
        if self.readout_dro_states()[0] {
            self.sim.inject_pulse(self.handles.reset_port, self.slow_time(1))?;
            self.settle()?;
        }
        for id in [self.handles.tff_out_converter, self.handles.jout_converter, self.handles.data_out_converter] {
            self.sim.reset_converter(id);
        }
        Ok(())
    }

    /// Measure the OUT-path latency on an idle copy with the compensation
    /// JTL at zero, then set the JTL to match it.
    pub fn calibrate_delay(&mut self) -> Result<DelayBudget, ProtocolError> {
        let mut probe = self.clone();
        probe.sim.reset_state();
        probe.sim.set_delay(self.handles.jtl_delay, 0);
        probe.apply_set(SimTime::ZERO)?;
        probe.program_delay(CHAIN_MODULUS - 1)?;
        probe.close_switch()?;
        let t = probe.slow_time(1);
        let outcome = probe.apply_start(t)?;
        let latency = outcome.interval_ps() - self.params.ring_period_ps;
        self.sim.set_delay(self.handles.jtl_delay, latency);
        Ok(DelayBudget {
            jtl_delay_ps: latency,
            out_path_latency_ps: latency,
            end_to_actuation_ps: outcome.actuation - outcome.end_dro_release,
        })
    }

    /// The compensation JTL's current delay, ps.
    pub fn jtl_delay_ps(&self) -> u64 {
        self.sim.kind(self.handles.jtl_delay).delay().unwrap_or(0)
    }

    /// One full SET → program → START → finish → drain → reset cycle.
    pub fn run_protocol(&mut self, n: u32) -> Result<(StartOutcome, u32), ProtocolError> {
        let t = self.slow_time(1);
        self.apply_set(t)?;
        self.program_delay(n)?;
        self.close_switch()?;
        let t = self.slow_time(1);
        let outcome = self.apply_start(t)?;
        self.finish_measurement()?;
        let drained = self.drain_tff()?;
        self.ready_next()?;
        Ok((outcome, drained))
    }
}
