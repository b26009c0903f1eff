use mqc_core::rsfq::{ComponentId, ComponentKind, EventPayload, Netlist, NetlistError, NodeId, SimTime, Simulation};
use proptest::prelude::*;

fn jtl_line(delay: u64) -> (Simulation, NodeId, ComponentId) {
    let mut net = Netlist::new();
    let a = net.add_node("a").unwrap();
    let b = net.add_node("b").unwrap();
    net.add_component("j", ComponentKind::Jtl { delay }, &[a], &[b]).unwrap();
    let conv = net.add_component("c", ComponentKind::converter(), &[b], &[]).unwrap();
    (Simulation::new(net), a, conv)
}

struct Chain {
    sim: Simulation,
    input: NodeId,
    tffs: Vec<ComponentId>,
    out: ComponentId,
}

fn tff_chain(stages: usize, delay: u64) -> Chain {
    let mut net = Netlist::new();
    let input = net.add_node("in").unwrap();
    let mut prev = input;
    let mut tffs = Vec::new();
    for i in 0..stages {
        let next = net.add_node(&format!("q{i}")).unwrap();
        tffs.push(net.add_component(&format!("t{i}"), ComponentKind::tff(delay), &[prev], &[next]).unwrap());
        prev = next;
    }
    let out = net.add_component("out", ComponentKind::converter(), &[prev], &[]).unwrap();
    Chain { sim: Simulation::new(net), input, tffs, out }
}

impl Chain {
    fn preload(&mut self, value: u32) {
        for (i, id) in self.tffs.iter().enumerate() {
            self.sim.set_tff_state(*id, (value >> i) & 1 == 1);
        }
    }

    fn counter(&self) -> u32 {
        self.tffs
            .iter()
            .enumerate()
            .map(|(i, id)| u32::from(self.sim.tff_state(*id).unwrap()) << i)
            .sum()
    }

    fn feed(&mut self, pulses: u64, spacing: u64) -> u64 {
        let start = self.sim.now();
        for k in 1..=pulses {
            self.sim.inject_pulse(self.input, start + k * spacing).unwrap();
        }
        self.sim.run_to_quiescence(1 << 24).unwrap();
        self.sim.sfqdc_read(self.out).unwrap()
    }
}

fn ring(switch_closed: bool) -> (Simulation, NodeId, ComponentId, ComponentId) {
    let mut net = Netlist::new();
    let start = net.add_node("start").unwrap();
    let out = net.add_node("out").unwrap();
    let ro = net.add_ring_oscillator("ro", 100, switch_closed, start, out).unwrap();
    let conv = net.add_component("c", ComponentKind::converter(), &[out], &[]).unwrap();
    (Simulation::new(net), start, ro, conv)
}

#[test]
fn jtl_is_a_pure_delay() {
    let (mut sim, a, conv) = jtl_line(10);
    sim.inject_pulse(a, SimTime(0)).unwrap();
    sim.run_to_quiescence(10).unwrap();
    assert_eq!(sim.converter_last_arrival(conv), Some(SimTime(10)));
}

#[test]
fn equal_time_events_run_in_injection_order() {
    let mut net = Netlist::new();
    let a = net.add_node("a").unwrap();
    let b = net.add_node("b").unwrap();
    let mut sim = Simulation::new(net);
    sim.inject_pulse(b, SimTime(5)).unwrap();
    sim.inject_pulse(a, SimTime(5)).unwrap();
    let first = sim.step().unwrap();
    let second = sim.step().unwrap();
    assert!(first.sequence < second.sequence);
    assert!(matches!(first.payload, EventPayload::Pulse(n) if n == b));
    assert!(sim.step().is_none());
}

#[test]
fn past_injection_is_rejected() {
    let (mut sim, a, _) = jtl_line(10);
    sim.inject_pulse(a, SimTime(100)).unwrap();
    sim.run_to_quiescence(10).unwrap();
    assert_eq!(
        sim.inject_pulse(a, SimTime(50)),
        Err(NetlistError::PastInjection { now: 110, requested: 50 })
    );
}

#[test]
fn splitter_and_confluence() {
    let mut net = Netlist::new();
    let i = net.add_node("i").unwrap();
    let (x, y) = (net.add_node("x").unwrap(), net.add_node("y").unwrap());
    let s = net.add_component("s", ComponentKind::Splitter { delay: 2 }, &[i], &[x, y]).unwrap();
    let m = net.add_node("m").unwrap();
    let cb = net
        .add_component("cb", ComponentKind::ConfluenceBuffer { delay: 2 }, &[x, y], &[m])
        .unwrap();
    let conv = net.add_component("c", ComponentKind::converter(), &[m], &[]).unwrap();
    let mut sim = Simulation::new(net);
    sim.enable_trace();
    sim.inject_pulse(i, SimTime(0)).unwrap();
    sim.run_to_quiescence(100).unwrap();
    assert_eq!(sim.sfqdc_read(conv), Some(2));
    assert_eq!(sim.stats(s).pulses_out, 2 * sim.stats(s).pulses_in);
    assert_eq!(sim.stats(cb).pulses_out, sim.stats(cb).pulses_in);
    let trace = sim.trace().unwrap();
    let arrivals: Vec<u64> = trace
        .entries()
        .iter()
        .filter(|e| e.action == "merge")
        .map(|e| e.time.ps())
        .collect();
    assert_eq!(arrivals, vec![2, 2]);
}

#[test]
fn fan_out_without_splitter_is_rejected() {
    let mut net = Netlist::new();
    let a = net.add_node("a").unwrap();
    let b = net.add_node("b").unwrap();
    let c = net.add_node("c").unwrap();
    net.add_component("j1", ComponentKind::Jtl { delay: 1 }, &[a], &[b]).unwrap();
    let err = net.add_component("j2", ComponentKind::Jtl { delay: 1 }, &[a], &[c]).unwrap_err();
    assert!(matches!(err, NetlistError::FanOut { .. }));
}

fn dro_fixture() -> (Simulation, NodeId, NodeId, ComponentId, ComponentId) {
    let mut net = Netlist::new();
    let i = net.add_node("in").unwrap();
    let clk = net.add_node("clk").unwrap();
    let o = net.add_node("out").unwrap();
    let dro = net.add_component("d", ComponentKind::dro(5), &[i, clk], &[o]).unwrap();
    let conv = net.add_component("c", ComponentKind::converter(), &[o], &[]).unwrap();
    (Simulation::new(net), i, clk, dro, conv)
}

#[test]
fn dro_releases_once() {
    let (mut sim, i, clk, dro, conv) = dro_fixture();
    sim.enable_trace();
    sim.inject_pulse(i, SimTime(0)).unwrap();
    sim.inject_pulse(clk, SimTime(50)).unwrap();
    sim.inject_pulse(clk, SimTime(100)).unwrap();
    sim.run_to_quiescence(100).unwrap();
    assert_eq!(sim.sfqdc_read(conv), Some(1));
    assert_eq!(sim.converter_last_arrival(conv), Some(SimTime(55)));
    assert_eq!(sim.stats(dro).escapes, 1);
    assert_eq!(sim.trace().unwrap().count_action("escape"), 1);
}

#[test]
fn dro_clock_on_empty_escapes_and_double_store_is_absorbed() {
    let (mut sim, i, clk, dro, conv) = dro_fixture();
    sim.inject_pulse(clk, SimTime(0)).unwrap();
    sim.inject_pulse(i, SimTime(10)).unwrap();
    sim.inject_pulse(i, SimTime(20)).unwrap();
    sim.inject_pulse(clk, SimTime(30)).unwrap();
    sim.run_to_quiescence(100).unwrap();
    assert_eq!(sim.sfqdc_read(conv), Some(1));
    let st = sim.stats(dro);
    assert_eq!((st.escapes, st.absorbed), (1, 1));
}

#[test]
fn chain_divides_by_128() {
    let mut chain = tff_chain(7, 5);
    assert_eq!(chain.feed(256, 20), 2);
    assert_eq!(chain.counter(), 0);
}

#[test]
fn preloaded_chain_fires_on_next_pulse() {
    let mut chain = tff_chain(7, 5);
    chain.preload(127);
    assert_eq!(chain.feed(1, 20), 1);
    assert_eq!(chain.counter(), 0);
}

#[test]
fn programming_127_pulses_matches_preload() {
    let mut programmed = tff_chain(7, 5);
    programmed.feed(127, 1000);
    assert_eq!(programmed.counter(), 127);
    assert_eq!(programmed.feed(1, 1000), 1);
}

#[test]
fn ring_ticks_every_period() {
    let (mut sim, start, _, conv) = ring(true);
    sim.enable_trace();
    sim.inject_pulse(start, SimTime(0)).unwrap();
    sim.run_until(SimTime(300));
    assert_eq!(sim.sfqdc_read(conv), Some(3));
    let ticks: Vec<u64> = sim
        .trace()
        .unwrap()
        .entries()
        .iter()
        .filter(|e| e.action == "count")
        .map(|e| e.time.ps())
        .collect();
    assert_eq!(ticks, vec![100, 200, 300]);
}

#[test]
fn open_ring_lets_start_escape() {
    let (mut sim, start, ro, conv) = ring(false);
    sim.inject_pulse(start, SimTime(0)).unwrap();
    assert_eq!(sim.run_to_quiescence(10), Ok(1));
    assert_eq!(sim.sfqdc_read(conv), Some(0));
    assert_eq!(sim.stats(ro).escapes, 1);
}

#[test]
fn opening_the_switch_stops_the_ring() {
    let (mut sim, start, ro, conv) = ring(true);
    sim.inject_pulse(start, SimTime(0)).unwrap();
    sim.schedule_switch(ro, false, SimTime(250)).unwrap();
    sim.run_to_quiescence(100).unwrap();
    assert_eq!(sim.sfqdc_read(conv), Some(2));
    assert_eq!(sim.stats(ro).escapes, 1);
}

#[test]
fn converter_counts_and_resets() {
    let (mut sim, a, conv) = jtl_line(1);
    assert_eq!(sim.sfqdc_read(conv), Some(0));
    for t in [0, 10, 20] {
        sim.inject_pulse(a, SimTime(t)).unwrap();
    }
    sim.run_to_quiescence(100).unwrap();
    assert_eq!(sim.sfqdc_read(conv), Some(3));
    sim.reset_converter(conv);
    assert_eq!(sim.sfqdc_read(conv), Some(0));
}

#[test]
fn trace_format_is_line_oriented() {
    let (mut sim, a, _) = jtl_line(10);
    sim.enable_trace();
    sim.inject_pulse(a, SimTime(0)).unwrap();
    sim.run_to_quiescence(10).unwrap();
    assert_eq!(sim.trace_text(), "0 a jtl pass\n10 b sfqdc count\n");
}

#[test]
fn reset_state_restores_power_on_values() {
    let mut chain = tff_chain(7, 5);
    chain.feed(77, 50);
    let mut fresh = tff_chain(7, 5);
    chain.sim.reset_state();
    assert_eq!(chain.counter(), 0);
    assert_eq!(chain.feed(300, 50), fresh.feed(300, 50));
}

fn random_circuit_run(gaps: &[u8]) -> String {
    let mut chain = tff_chain(7, 3);
    chain.sim.enable_trace();
    for &gap in gaps {
        let t = chain.sim.now() + u64::from(gap);
        chain.sim.inject_pulse(chain.input, t).unwrap();
    }
    chain.sim.run_to_quiescence(1 << 20).unwrap();
    chain.sim.trace_text()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identical_stimulus_gives_identical_trace(stim in prop::collection::vec(0u8..50, 1..200)) {
        prop_assert_eq!(random_circuit_run(&stim), random_circuit_run(&stim));
    }

    #[test]
    fn chain_matches_integer_counter(preload in 0u32..128, length in 0u64..600, spacing in 1u64..40) {
        let mut chain = tff_chain(7, 5);
        chain.preload(preload);
        let outputs = chain.feed(length, spacing);
        let total = u64::from(preload) + length;
        prop_assert_eq!(outputs, total / 128);
        prop_assert_eq!(u64::from(chain.counter()), total % 128);
    }

    #[test]
    fn causality_and_conservation(
        pulses in prop::collection::vec((0u64..200, 0usize..2), 1..60),
        delays in prop::array::uniform4(0u64..20),
    ) {
        let mut net = Netlist::new();
        let a = net.add_node("a").unwrap();
        let clk = net.add_node("clk").unwrap();
        let (x, y) = (net.add_node("x").unwrap(), net.add_node("y").unwrap());
        let split = net.add_component("s", ComponentKind::Splitter { delay: delays[0] }, &[a], &[x, y]).unwrap();
        let m = net.add_node("m").unwrap();
        let cb = net.add_component("cb", ComponentKind::ConfluenceBuffer { delay: delays[1] }, &[x, y], &[m]).unwrap();
        let o = net.add_node("o").unwrap();
        let dro = net.add_component("d", ComponentKind::dro(delays[2]), &[m, clk], &[o]).unwrap();
        let p = net.add_node("p").unwrap();
        net.add_component("j", ComponentKind::Jtl { delay: delays[3] }, &[o], &[p]).unwrap();
        net.add_component("c", ComponentKind::converter(), &[p], &[]).unwrap();
        let mut sim = Simulation::new(net);
        for &(t, port) in &pulses {
            sim.inject_pulse(if port == 0 { a } else { clk }, SimTime(t)).unwrap();
        }
        let mut last = SimTime::ZERO;
        while let Some(ev) = sim.step() {
            prop_assert!(ev.time >= last);
            last = ev.time;
        }
        let (s, c, d) = (sim.stats(split), sim.stats(cb), sim.stats(dro));
        prop_assert_eq!(s.pulses_out, 2 * s.pulses_in);
        prop_assert_eq!(c.pulses_out, c.pulses_in);
        prop_assert!(d.pulses_out <= c.pulses_out);
    }
}
