//! Deterministic discrete-event kernel for single-flux-quantum pulses and the
//! behavioral cell models it drives.
//!
//! Time is integer picoseconds. Events are ordered by `(time, sequence)`,
//! where `sequence` is a global insertion counter, so equal-time events are
//! processed first-in first-out and every run of the same stimulus produces
//! the same trace.

mod behavior;
mod netlist;
mod sim;
mod time;
mod trace;

use thiserror::Error;

pub use behavior::{
    dro_behavior, ring_oscillator_behavior, tff_behavior, DroOutcome, DroPort, RingInput,
    RingOutcome,
};
pub use netlist::{CellDelays, Component, ComponentId, ComponentKind, Netlist, NodeId};
pub use sim::{ComponentStats, EventPayload, SfqEvent, Simulation};
pub use time::SimTime;
pub use trace::{TraceEntry, TraceLog};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("invalid name `{0}`: names must be non-empty and contain no whitespace")]
    InvalidName(String),
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("unknown component {0}")]
    UnknownComponent(usize),
    #[error("node `{node}` already driven by `{existing}`")]
    MultipleDrivers { node: String, existing: String },
    #[error("node `{node}` already feeds `{existing}`; fan-out needs an explicit splitter")]
    FanOut { node: String, existing: String },
    #[error("{kind} takes {expected_in} inputs and {expected_out} outputs, got {got_in} and {got_out}")]
    Arity {
        kind: &'static str,
        expected_in: usize,
        expected_out: usize,
        got_in: usize,
        got_out: usize,
    },
    #[error("ring oscillator period must be positive")]
    ZeroPeriod,
    #[error("cannot schedule at {requested} ps, simulation is already at {now} ps")]
    PastInjection { now: u64, requested: u64 },
    #[error("component `{0}` is not a {1}")]
    WrongKind(String, &'static str),
    #[error("event budget of {0} exhausted before the queue drained")]
    Runaway(usize),
}
