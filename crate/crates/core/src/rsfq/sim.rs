use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::behavior::{dro_behavior, ring_oscillator_behavior, tff_behavior, DroOutcome, DroPort, RingInput, RingOutcome};
use super::trace::{TraceEntry, TraceSite};
use super::{ComponentId, ComponentKind, Netlist, NetlistError, NodeId, SimTime, TraceLog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventPayload {
    Pulse(NodeId),
    Switch { component: ComponentId, closed: bool },
}

/// A scheduled event. Ordered by `(time, sequence)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SfqEvent {
    pub time: SimTime,
    pub sequence: u64,
    pub payload: EventPayload,
}

/// Pulse bookkeeping per component.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ComponentStats {
    pub pulses_in: u64,
    pub pulses_out: u64,
    pub escapes: u64,
    pub absorbed: u64,
}

/// A netlist plus its event queue.
///
/// Single-threaded; independent instances share nothing and may run on
/// different threads.
#[derive(Debug, Clone)]
pub struct Simulation {
    netlist: Netlist,
    queue: BinaryHeap<Reverse<SfqEvent>>,
    now: SimTime,
    next_sequence: u64,
    stats: Vec<ComponentStats>,
    dangling_escapes: u64,
    trace: Option<TraceLog>,
}

impl Simulation {
    pub fn new(netlist: Netlist) -> Self {
        let stats = vec![ComponentStats::default(); netlist.components().len()];
        Simulation {
            netlist,
            queue: BinaryHeap::new(),
            now: SimTime::ZERO,
            next_sequence: 0,
            stats,
            dangling_escapes: 0,
            trace: None,
        }
    }

    /// Record every delivered event from now on.
    pub fn enable_trace(&mut self) {
        if self.trace.is_none() {
            self.trace = Some(TraceLog::new());
        }
    }

    pub fn trace(&self) -> Option<&TraceLog> {
        self.trace.as_ref()
    }

    pub fn trace_text(&self) -> String {
        self.trace.as_ref().map(|t| t.to_text(&self.netlist)).unwrap_or_default()
    }

    pub fn netlist(&self) -> &Netlist {
        &self.netlist
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    pub fn next_event_time(&self) -> Option<SimTime> {
        self.queue.peek().map(|Reverse(e)| e.time)
    }

    fn push(&mut self, time: SimTime, payload: EventPayload) {
        debug_assert!(time >= self.now);
        let event = SfqEvent { time, sequence: self.next_sequence, payload };
        self.next_sequence += 1;
        self.queue.push(Reverse(event));
    }

    fn check_time(&self, time: SimTime) -> Result<(), NetlistError> {
        if time < self.now {
            return Err(NetlistError::PastInjection { now: self.now.ps(), requested: time.ps() });
        }
        Ok(())
    }

    pub fn inject_pulse(&mut self, node: NodeId, time: SimTime) -> Result<(), NetlistError> {
        if !self.netlist.contains_node(node) {
            return Err(NetlistError::UnknownNode(node.0));
        }
        self.check_time(time)?;
        self.push(time, EventPayload::Pulse(node));
        Ok(())
    }

    /// Schedule a ring-oscillator switch change.
    pub fn schedule_switch(
        &mut self,
        component: ComponentId,
        closed: bool,
        time: SimTime,
    ) -> Result<(), NetlistError> {
        if !self.netlist.contains_component(component) {
            return Err(NetlistError::UnknownComponent(component.0));
        }
        let c = self.netlist.component(component);
        if !matches!(c.kind, ComponentKind::RingOscillator { .. }) {
            return Err(NetlistError::WrongKind(c.name.clone(), "ring oscillator"));
        }
        self.check_time(time)?;
        self.push(time, EventPayload::Switch { component, closed });
        Ok(())
    }

    fn log(&mut self, time: SimTime, site: TraceSite, kind: &'static str, action: &'static str) {
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceEntry { time, site, kind, action });
        }
    }

    fn emit(&mut self, id: ComponentId, port: usize, delay: u64) {
        let node = self.netlist.component(id).outputs[port];
        self.stats[id.0].pulses_out += 1;
        self.push(self.now + delay, EventPayload::Pulse(node));
    }

    /// Process the least pending event. `None` once the queue is empty.
    pub fn step(&mut self) -> Option<SfqEvent> {
        let Reverse(event) = self.queue.pop()?;
        self.now = event.time;
        match event.payload {
            EventPayload::Pulse(node) => self.deliver(node),
            EventPayload::Switch { component, closed } => {
                if let ComponentKind::RingOscillator { switch_closed, .. } =
                    &mut self.netlist.component_mut(component).kind
                {
                    *switch_closed = closed;
                }
                let action = if closed { "switch-close" } else { "switch-open" };
                self.log(event.time, TraceSite::Control(component), "ring", action);
            }
        }
        Some(event)
    }

    fn deliver(&mut self, node: NodeId) {
        let now = self.now;
        let site = TraceSite::Node(node);
        let Some((id, port)) = self.netlist.listener(node) else {
            self.dangling_escapes += 1;
            self.log(now, site, "none", "escape");
            return;
        };
        self.stats[id.0].pulses_in += 1;
        let kind = &mut self.netlist.component_mut(id).kind;
        let label = kind.label();
        let action = match kind {
            ComponentKind::Jtl { delay } => {
                let d = *delay;
                self.emit(id, 0, d);
                "pass"
            }
            ComponentKind::Splitter { delay } => {
                let d = *delay;
                self.emit(id, 0, d);
                self.emit(id, 1, d);
                "split"
            }
            ComponentKind::ConfluenceBuffer { delay } => {
                let d = *delay;
                self.emit(id, 0, d);
                "merge"
            }
            ComponentKind::Dro { stored, delay, last_release } => {
                let d = *delay;
                let dro_port = if port == 0 { DroPort::In } else { DroPort::Clock };
                let outcome = dro_behavior(stored, dro_port);
                if outcome == DroOutcome::Released {
                    *last_release = Some(now);
                }
                match outcome {
                    DroOutcome::Stored => "store",
                    DroOutcome::Absorbed => {
                        self.stats[id.0].absorbed += 1;
                        "store-absorbed"
                    }
                    DroOutcome::Released => {
                        self.emit(id, 0, d);
                        "release"
                    }
                    DroOutcome::Escaped => {
                        self.stats[id.0].escapes += 1;
                        "escape"
                    }
                }
            }
            ComponentKind::Tff { state, delay } => {
                let d = *delay;
                if tff_behavior(state) {
                    self.emit(id, 0, d);
                    "toggle-carry"
                } else {
                    "toggle-set"
                }
            }
            ComponentKind::RingOscillator { period, switch_closed } => {
                let (period, closed) = (*period, *switch_closed);
                let input = if port == 0 { RingInput::Start } else { RingInput::Lap };
                match ring_oscillator_behavior(closed, input) {
                    RingOutcome::Admitted => {
                        let lap = self.netlist.component(id).outputs[1];
                        self.push(now + period, EventPayload::Pulse(lap));
                        "start"
                    }
                    RingOutcome::Emit => {
                        let lap = self.netlist.component(id).outputs[1];
                        self.emit(id, 0, 0);
                        self.push(now + period, EventPayload::Pulse(lap));
                        "tick"
                    }
                    RingOutcome::Escaped => {
                        self.stats[id.0].escapes += 1;
                        "escape"
                    }
                }
            }
            ComponentKind::SfqDcConverter { count, first_arrival, last_arrival } => {
                *count += 1;
                first_arrival.get_or_insert(now);
                *last_arrival = Some(now);
                "count"
            }
            ComponentKind::EscapeSink => {
                self.stats[id.0].escapes += 1;
                "escape"
            }
        };
        self.log(now, site, label, action);
    }

    /// Process every event at or before `until`, then advance the clock to it.
    pub fn run_until(&mut self, until: SimTime) -> usize {
        let mut processed = 0;
        while self.next_event_time().is_some_and(|t| t <= until) {
            self.step();
            processed += 1;
        }
        self.now = self.now.max(until);
        processed
    }

    /// Drain the queue; fails if more than `budget` events are needed (for
    /// example because a ring oscillator is still circulating).
    pub fn run_to_quiescence(&mut self, budget: usize) -> Result<usize, NetlistError> {
        for processed in 0..=budget {
            if self.step().is_none() {
                return Ok(processed);
            }
        }
        Err(NetlistError::Runaway(budget))
    }

    /// Step until `done` holds or the next event lies after `deadline`.
    /// Returns whether `done` was reached.
    pub fn run_until_condition<F>(&mut self, deadline: SimTime, mut done: F) -> bool
    where
        F: FnMut(&Simulation) -> bool,
    {
        while self.next_event_time().is_some_and(|t| t <= deadline) {
            self.step();
            if done(self) {
                return true;
            }
        }
        false
    }

    pub fn kind(&self, id: ComponentId) -> &ComponentKind {
        &self.netlist.component(id).kind
    }

    pub fn stats(&self, id: ComponentId) -> ComponentStats {
        self.stats[id.0]
    }

    pub fn dangling_escapes(&self) -> u64 {
        self.dangling_escapes
    }

    pub fn dro_stored(&self, id: ComponentId) -> Option<bool> {
        match self.kind(id) {
            ComponentKind::Dro { stored, .. } => Some(*stored),
            _ => None,
        }
    }

    pub fn dro_last_release(&self, id: ComponentId) -> Option<SimTime> {
        match self.kind(id) {
            ComponentKind::Dro { last_release, .. } => *last_release,
            _ => None,
        }
    }

    pub fn tff_state(&self, id: ComponentId) -> Option<bool> {
        match self.kind(id) {
            ComponentKind::Tff { state, .. } => Some(*state),
            _ => None,
        }
    }

    pub fn switch_closed(&self, id: ComponentId) -> Option<bool> {
        match self.kind(id) {
            ComponentKind::RingOscillator { switch_closed, .. } => Some(*switch_closed),
            _ => None,
        }
    }

    /// Cumulative count of an SFQ/dc converter.
    pub fn sfqdc_read(&self, id: ComponentId) -> Option<u64> {
        match self.kind(id) {
            ComponentKind::SfqDcConverter { count, .. } => Some(*count),
            _ => None,
        }
    }

    pub fn converter_last_arrival(&self, id: ComponentId) -> Option<SimTime> {
        match self.kind(id) {
            ComponentKind::SfqDcConverter { last_arrival, .. } => *last_arrival,
            _ => None,
        }
    }

    pub fn reset_converter(&mut self, id: ComponentId) {
        if let ComponentKind::SfqDcConverter { count, first_arrival, last_arrival } =
            &mut self.netlist.component_mut(id).kind
        {
            *count = 0;
            *first_arrival = None;
            *last_arrival = None;
        }
    }

    /// Overwrite a stateful cell's state directly (test fixtures, presets).
    pub fn set_tff_state(&mut self, id: ComponentId, value: bool) {
        if let ComponentKind::Tff { state, .. } = &mut self.netlist.component_mut(id).kind {
            *state = value;
        }
    }

    pub fn set_dro_state(&mut self, id: ComponentId, value: bool) {
        if let ComponentKind::Dro { stored, .. } = &mut self.netlist.component_mut(id).kind {
            *stored = value;
        }
    }

    /// Empty the queue, rewind the clock and return every stateful cell to
    /// its power-on value: DROs and TFFs cleared, converters zeroed, switches
    /// open. Delays and topology are kept; the trace, if enabled, is cleared.
    pub fn reset_state(&mut self) {
        self.queue.clear();
        self.now = SimTime::ZERO;
        self.next_sequence = 0;
        self.dangling_escapes = 0;
        self.stats.iter_mut().for_each(|s| *s = ComponentStats::default());
        if let Some(trace) = self.trace.as_mut() {
            trace.clear();
        }
        for c in self.netlist.components.iter_mut() {
            match &mut c.kind {
                ComponentKind::Dro { stored, last_release, .. } => {
                    *stored = false;
                    *last_release = None;
                }
                ComponentKind::Tff { state, .. } => *state = false,
                ComponentKind::RingOscillator { switch_closed, .. } => *switch_closed = false,
                ComponentKind::SfqDcConverter { count, first_arrival, last_arrival } => {
                    *count = 0;
                    *first_arrival = None;
                    *last_arrival = None;
                }
                _ => {}
            }
        }
    }

    pub fn set_delay(&mut self, id: ComponentId, value: u64) {
        match &mut self.netlist.component_mut(id).kind {
            ComponentKind::Jtl { delay }
            | ComponentKind::Splitter { delay }
            | ComponentKind::ConfluenceBuffer { delay }
            | ComponentKind::Dro { delay, .. }
            | ComponentKind::Tff { delay, .. } => *delay = value,
            _ => {}
        }
    }
}
