//! Pure state-transition functions of the stateful cells.

/// Input ports of a destructive read-out cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DroPort {
    In,
    Clock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DroOutcome {
    Stored,
    /// Second fluxoid on a full cell; dropped.
    Absorbed,
    /// Stored fluxoid read out; one output pulse.
    Released,
    /// Clock on an empty cell; the pulse leaves through the escape junction.
    Escaped,
}

impl DroOutcome {
    pub fn emits(self) -> bool {
        self == DroOutcome::Released
    }
}

pub fn dro_behavior(stored: &mut bool, port: DroPort) -> DroOutcome {
    match (port, *stored) {
        (DroPort::In, false) => {
            *stored = true;
            DroOutcome::Stored
        }
        (DroPort::In, true) => DroOutcome::Absorbed,
        (DroPort::Clock, true) => {
            *stored = false;
            DroOutcome::Released
        }
        (DroPort::Clock, false) => DroOutcome::Escaped,
    }
}

/// Toggle; returns whether a carry pulse is emitted (on the 1 → 0 edge).
pub fn tff_behavior(state: &mut bool) -> bool {
    let carry = *state;
    *state = !*state;
    carry
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingInput {
    /// External START pulse.
    Start,
    /// The circulating pulse completing one lap.
    Lap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOutcome {
    /// Pulse admitted to the loop; no output yet.
    Admitted,
    /// Lap completed: one output pulse, keep circulating.
    Emit,
    /// Switch open: pulse leaves through the escape junction.
    Escaped,
}

pub fn ring_oscillator_behavior(switch_closed: bool, input: RingInput) -> RingOutcome {
    match (switch_closed, input) {
        (false, _) => RingOutcome::Escaped,
        (true, RingInput::Start) => RingOutcome::Admitted,
        (true, RingInput::Lap) => RingOutcome::Emit,
    }
}
