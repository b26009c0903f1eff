//! Actively switched output chain: three biased dc-SQUIDs gating the path
//! from the qubit loop to the J_out threshold junction.
//!
//! The inductance network is lumped into one transfer ratio per squid
//! configuration. Each squid either routes signal toward J_out ("on") or
//! isolates ("off"). Squid 1 routes when its DRO is stored; squids 2 and 3
//! route when their DROs are empty, so the post-SET configuration isolates
//! the qubit and the OUT pulse reverses it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rsfq::SimTime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReadoutError {
    #[error("invalid readout parameters: {0}")]
    InvalidParams(String),
    #[error("cannot arm from squid states {states:?}; expected [false, true, true]")]
    NotArmable { states: [bool; 3] },
    #[error("readout chain sensed before arming")]
    NotArmed,
    #[error("qubit sign must be +1 or -1, got {0}")]
    InvalidSign(i8),
}

/// Transfer coefficients of one squid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquidCoupling {
    /// While routing signal to the readout.
    pub on: f64,
    /// While isolating.
    pub off: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReadoutParams {
    /// Qubit → J_out current ratio with the chain armed.
    pub kappa_armed: f64,
    /// Critical current of J_out, A.
    pub jout_critical_current: f64,
    /// J_out bias as a fraction of its critical current once armed.
    pub jout_bias_fraction: f64,
    pub squid1: SquidCoupling,
    /// Larger junctions: weaker coupling in both states.
    pub squid2: SquidCoupling,
    pub squid3: SquidCoupling,
}

impl Default for ReadoutParams {
    fn default() -> Self {
        ReadoutParams {
            kappa_armed: 0.125,
            jout_critical_current: 3.8e-6,
            jout_bias_fraction: 0.95,
            squid1: SquidCoupling { on: 1.0, off: 0.02 },
            squid2: SquidCoupling { on: 0.5, off: 0.01 },
            squid3: SquidCoupling { on: 1.0, off: 0.02 },
        }
    }
}

impl ReadoutParams {
    pub fn validate(&self) -> Result<(), ReadoutError> {
        let bad = |m: String| Err(ReadoutError::InvalidParams(m));
        if !(self.kappa_armed.is_finite() && self.kappa_armed >= 0.0) {
            return bad(format!("kappa_armed must be non-negative, got {}", self.kappa_armed));
        }
        if !(self.jout_critical_current.is_finite() && self.jout_critical_current > 0.0) {
            return bad(format!("jout_critical_current must be positive, got {}", self.jout_critical_current));
        }
        if !(self.jout_bias_fraction > 0.0 && self.jout_bias_fraction < 1.0) {
            return bad(format!("jout_bias_fraction must be in (0, 1), got {}", self.jout_bias_fraction));
        }
        for (i, c) in [self.squid1, self.squid2, self.squid3].iter().enumerate() {
            if !(c.off >= 0.0 && c.off < c.on && c.on.is_finite()) {
                return bad(format!("squid{}: need 0 <= off < on, got off {} on {}", i + 1, c.off, c.on));
            }
        }
        if self.squid2 == self.squid1 || self.squid2 == self.squid3 {
            return bad("squid2 couplings must differ from squids 1 and 3".into());
        }
        Ok(())
    }

    fn coupling(&self, id: usize) -> SquidCoupling {
        [self.squid1, self.squid2, self.squid3][id]
    }

    /// Transfer ratio for a given set of DRO states.
    pub fn transfer_ratio(&self, states: [bool; 3]) -> f64 {
        let gain: f64 = (0..3)
            .map(|i| {
                let c = self.coupling(i);
                let coef = if routes(i, states[i]) { c.on } else { c.off };
                coef / c.on
            })
            .product();
        self.kappa_armed * gain
    }

    /// Transfer ratio in the post-SET (evolution) configuration.
    pub fn kappa_idle(&self) -> f64 {
        self.transfer_ratio(POST_SET)
    }
}

const POST_SET: [bool; 3] = [false, true, true];
const ARMED: [bool; 3] = [true, false, false];

fn routes(index: usize, stored: bool) -> bool {
    if index == 0 {
        stored
    } else {
        !stored
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InductanceState {
    High,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedDcSquid {
    /// 1, 2 or 3.
    pub id: u8,
    pub dro_stored: bool,
    pub coupling: SquidCoupling,
}

impl BiasedDcSquid {
    pub fn inductance_state(&self) -> InductanceState {
        if self.dro_stored {
            InductanceState::High
        } else {
            InductanceState::Low
        }
    }

    pub fn routes_signal(&self) -> bool {
        routes(usize::from(self.id - 1), self.dro_stored)
    }

    pub fn transfer(&self) -> f64 {
        if self.routes_signal() {
            self.coupling.on
        } else {
            self.coupling.off
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutResult {
    pub data_out: bool,
    /// J_out current over its critical current at the decision.
    pub jout_current_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutChain {
    params: ReadoutParams,
    squids: [BiasedDcSquid; 3],
    /// Current J_out bias fraction: zero until armed.
    jout_bias: f64,
    armed_at: Option<SimTime>,
}

impl ReadoutChain {
    /// A chain in the post-SET configuration.
    pub fn new(params: ReadoutParams) -> Result<Self, ReadoutError> {
        params.validate()?;
        let mut chain = ReadoutChain {
            params,
            squids: [1u8, 2, 3].map(|id| BiasedDcSquid {
                id,
                dro_stored: false,
                coupling: params.coupling(usize::from(id - 1)),
            }),
            jout_bias: 0.0,
            armed_at: None,
        };
        chain.set_states(POST_SET);
        Ok(chain)
    }

    pub fn params(&self) -> &ReadoutParams {
        &self.params
    }

    pub fn squids(&self) -> &[BiasedDcSquid; 3] {
        &self.squids
    }

    pub fn states(&self) -> [bool; 3] {
        self.squids.map(|s| s.dro_stored)
    }

    /// Mirror DRO states from the control circuit. Disarms the chain.
    pub fn set_states(&mut self, states: [bool; 3]) {
        for (s, v) in self.squids.iter_mut().zip(states) {
            s.dro_stored = v;
        }
        self.jout_bias = 0.0;
        self.armed_at = None;
    }

    pub fn is_armed(&self) -> bool {
        self.armed_at.is_some()
    }

    pub fn armed_at(&self) -> Option<SimTime> {
        self.armed_at
    }

    /// Current transfer ratio for the present squid states.
    pub fn kappa(&self) -> f64 {
        self.params.transfer_ratio(self.states())
    }

    pub fn kappa_idle(&self) -> f64 {
        self.params.kappa_idle()
    }

    pub fn kappa_armed(&self) -> f64 {
        self.params.kappa_armed
    }

    pub fn jout_bias(&self) -> f64 {
        self.jout_bias
    }

    /// Current pushed back into the qubit loop by a circulating `i_circ`.
    pub fn back_action_current(&self, i_circ: f64) -> f64 {
        self.kappa() * i_circ.abs()
    }

    /// OUT pulse arrives: squid 1 goes high, squids 2 and 3 go low, J_out is biased.
    pub fn arm(&mut self, out_pulse_time: SimTime) -> Result<(), ReadoutError> {
        let states = self.states();
        if states != POST_SET || self.is_armed() {
            return Err(ReadoutError::NotArmable { states });
        }
        self.set_states(ARMED);
        self.jout_bias = self.params.jout_bias_fraction;
        self.armed_at = Some(out_pulse_time);
        Ok(())
    }

    /// `sign` is +1 for Ψ− ("1") and −1 for Ψ+ ("0"); `i_circ` its magnitude, A.
    pub fn sense(&self, sign: i8, i_circ: f64) -> Result<ReadoutResult, ReadoutError> {
        if !self.is_armed() {
            return Err(ReadoutError::NotArmed);
        }
        if sign != 1 && sign != -1 {
            return Err(ReadoutError::InvalidSign(sign));
        }
        let fraction = self.jout_bias
            + f64::from(sign) * self.kappa() * i_circ.abs() / self.params.jout_critical_current;
        Ok(ReadoutResult { data_out: fraction >= 1.0, jout_current_fraction: fraction })
    }

    /// kappa_idle / kappa_armed.
    pub fn isolation_ratio(&self) -> f64 {
        if self.params.kappa_armed == 0.0 {
            return 0.0;
        }
        self.kappa_idle() / self.params.kappa_armed
    }
}
