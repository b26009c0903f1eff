//! The control circuit: flux-bias loop, timing chain and the
//! SET / program / START / drain protocol, built from [`crate::rsfq`] cells.

mod bias;
mod circuit;

use thiserror::Error;

use crate::rsfq::NetlistError;

pub use bias::{BiasLoop, BiasLoopParams};
pub use circuit::{
    CircuitParams, ControlCircuit, DelayBudget, StartOutcome, CHAIN_MODULUS, TFF_STAGES,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("SET applied twice without an intervening START")]
    DoubleSet,
    #[error("START applied without a stored SET")]
    StartWithoutSet,
    #[error("programmed delay {0} is outside 0..=127")]
    DelayOutOfRange(u32),
    #[error("ring-oscillator switch must be open for {0}")]
    SwitchClosed(&'static str),
    #[error("ring-oscillator switch must be closed for START")]
    SwitchOpen,
    #[error("flux target {0} phi0 is outside [0, 1)")]
    TargetOutOfRange(f64),
    #[error("flux target needs {needed:.4} fluxoid-equivalents of trim, range is ±{range}")]
    TrimRangeExceeded { needed: f64, range: f64 },
    #[error("no readout actuation before {deadline_ps} ps")]
    NoActuation { deadline_ps: u64 },
    #[error("TFF chain produced no output after {0} drain pulses")]
    DrainExhausted(u32),
    #[error("timing violation: measured {measured_ps} ps between evolution start and actuation, expected {expected_ps} ps")]
    TimingViolation { measured_ps: u64, expected_ps: u64 },
    #[error("protocol hygiene: {0}")]
    Hygiene(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}
