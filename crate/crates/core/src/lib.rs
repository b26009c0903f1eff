//! Numerical and pulse-level simulation of a macroscopic-quantum-coherence
//! experiment on an rf-SQUID flux qubit driven by on-chip RSFQ logic.
//!
//! The crate is layered bottom-up:
//!
//! * [`qubit`] solves the double-well Hamiltonian on a flux grid, reduces it to
//!   a two-level system and evolves the 2×2 density matrix.
//! * [`rsfq`] is a deterministic discrete-event kernel with behavioral models of
//!   the single-flux-quantum cells (JTL, splitter, confluence buffer, DRO, TFF,
//!   ring oscillator, SFQ/dc converter, escape sink).
//! * [`control`] wires the control circuit from those cells and implements the
//!   flux-bias loop, the SET / program / START protocol, delay calibration and
//!   the TFF drain.
//! * [`readout`] is the lumped model of the actively switched output chain.
//! * [`experiment`] binds everything into repeated prepare / evolve / measure
//!   trials and estimates the oscillation probability curve.

pub mod config;
pub mod constants;
pub mod control;
pub mod error;
pub mod experiment;
pub mod qubit;
pub mod readout;
pub mod rsfq;

pub use config::{CircuitConfig, Config, ExperimentSettings, GridConfig};
pub use constants::PhysicalConstants;
pub use control::{BiasLoop, ControlCircuit, DelayBudget, ProtocolError, StartOutcome};
pub use error::{Error, ErrorCategory, Result};
pub use experiment::{ProbabilityCurve, TrialRecord};
pub use qubit::{
    EigenSolution, FluxGrid, PotentialProfile, QubitModel, QubitState, RegimeReport,
    RfSquidParams, TridiagonalOperator, TwoLevelSystem,
};
pub use readout::{BiasedDcSquid, ReadoutChain, ReadoutParams, ReadoutResult};
pub use rsfq::{ComponentId, ComponentKind, Netlist, NodeId, SfqEvent, SimTime, Simulation, TraceLog};
