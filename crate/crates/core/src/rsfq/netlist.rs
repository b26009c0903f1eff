use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{NetlistError, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentId(pub usize);

/// Per-cell propagation delays, ps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CellDelays {
    pub jtl: u64,
    pub tff: u64,
    pub dro: u64,
    pub splitter: u64,
    pub confluence: u64,
}

impl Default for CellDelays {
    fn default() -> Self {
        CellDelays { jtl: 10, tff: 5, dro: 5, splitter: 2, confluence: 2 }
    }
}

impl CellDelays {
    pub fn zero() -> Self {
        CellDelays { jtl: 0, tff: 0, dro: 0, splitter: 0, confluence: 0 }
    }
}

/// Behavioral cell together with its mutable state.
#[derive(Debug, Clone, PartialEq)]
pub enum ComponentKind {
    /// Pure delay.
    Jtl { delay: u64 },
    /// One input, two simultaneous outputs.
    Splitter { delay: u64 },
    /// Two inputs merged onto one output.
    ConfluenceBuffer { delay: u64 },
    /// Destructive read-out: ports `[in, clock]`, one output.
    Dro { stored: bool, delay: u64, last_release: Option<SimTime> },
    /// Toggle flip-flop; emits on the 1 → 0 edge.
    Tff { state: bool, delay: u64 },
    /// Ports `[start, lap]` in and `[out, lap]` out; the lap node closes the loop.
    RingOscillator { period: u64, switch_closed: bool },
    /// Counts arriving pulses.
    SfqDcConverter { count: u64, first_arrival: Option<SimTime>, last_arrival: Option<SimTime> },
    /// Absorbs pulses.
    EscapeSink,
}

impl ComponentKind {
    pub fn label(&self) -> &'static str {
        match self {
            ComponentKind::Jtl { .. } => "jtl",
            ComponentKind::Splitter { .. } => "splitter",
            ComponentKind::ConfluenceBuffer { .. } => "cb",
            ComponentKind::Dro { .. } => "dro",
            ComponentKind::Tff { .. } => "tff",
            ComponentKind::RingOscillator { .. } => "ring",
            ComponentKind::SfqDcConverter { .. } => "sfqdc",
            ComponentKind::EscapeSink => "escape",
        }
    }

    fn arity(&self) -> (usize, usize) {
        match self {
            ComponentKind::Jtl { .. } | ComponentKind::Tff { .. } => (1, 1),
            ComponentKind::Splitter { .. } => (1, 2),
            ComponentKind::ConfluenceBuffer { .. } | ComponentKind::Dro { .. } => (2, 1),
            ComponentKind::RingOscillator { .. } => (2, 2),
            ComponentKind::SfqDcConverter { .. } | ComponentKind::EscapeSink => (1, 0),
        }
    }

    /// Propagation delay of delaying cells; `None` for the rest.
    pub fn delay(&self) -> Option<u64> {
        match self {
            ComponentKind::Jtl { delay }
            | ComponentKind::Splitter { delay }
            | ComponentKind::ConfluenceBuffer { delay }
            | ComponentKind::Dro { delay, .. }
            | ComponentKind::Tff { delay, .. } => Some(*delay),
            _ => None,
        }
    }

    pub fn dro(delay: u64) -> Self {
        ComponentKind::Dro { stored: false, delay, last_release: None }
    }

    pub fn tff(delay: u64) -> Self {
        ComponentKind::Tff { state: false, delay }
    }

    pub fn converter() -> Self {
        ComponentKind::SfqDcConverter { count: 0, first_arrival: None, last_arrival: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub name: String,
    pub kind: ComponentKind,
    pub inputs: Vec<NodeId>,
    pub outputs: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Node {
    pub name: String,
    pub driver: Option<(ComponentId, usize)>,
    pub listener: Option<(ComponentId, usize)>,
}

/// Nodes and the cells connecting them.
///
/// Every node has at most one driver and at most one listener; a second
/// listener is a construction error, fan-out goes through a splitter. Nodes
/// without a driver are external ports. A pulse arriving on a node without a
/// listener leaves the circuit and is logged as an escape.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Netlist {
    pub(crate) nodes: Vec<Node>,
    pub(crate) components: Vec<Component>,
    names: HashMap<String, usize>,
    component_names: HashMap<String, usize>,
}

fn check_name(name: &str) -> Result<(), NetlistError> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(NetlistError::InvalidName(name.to_string()));
    }
    Ok(())
}

impl Netlist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: &str) -> Result<NodeId, NetlistError> {
        check_name(name)?;
        if self.names.contains_key(name) {
            return Err(NetlistError::DuplicateName(name.to_string()));
        }
        let id = self.nodes.len();
        self.nodes.push(Node { name: name.to_string(), driver: None, listener: None });
        self.names.insert(name.to_string(), id);
        Ok(NodeId(id))
    }

    pub fn add_component(
        &mut self,
        name: &str,
        kind: ComponentKind,
        inputs: &[NodeId],
        outputs: &[NodeId],
    ) -> Result<ComponentId, NetlistError> {
        check_name(name)?;
        if self.component_names.contains_key(name) {
            return Err(NetlistError::DuplicateName(name.to_string()));
        }
        let (expected_in, expected_out) = kind.arity();
        if inputs.len() != expected_in || outputs.len() != expected_out {
            return Err(NetlistError::Arity {
                kind: kind.label(),
                expected_in,
                expected_out,
                got_in: inputs.len(),
                got_out: outputs.len(),
            });
        }
        if let ComponentKind::RingOscillator { period: 0, .. } = kind {
            return Err(NetlistError::ZeroPeriod);
        }
        for node in inputs.iter().chain(outputs) {
            self.check_node(*node)?;
        }
        for node in inputs {
            if let Some((existing, _)) = self.nodes[node.0].listener {
                return Err(NetlistError::FanOut {
                    node: self.nodes[node.0].name.clone(),
                    existing: self.components[existing.0].name.clone(),
                });
            }
        }
        for node in outputs {
            if let Some((existing, _)) = self.nodes[node.0].driver {
                return Err(NetlistError::MultipleDrivers {
                    node: self.nodes[node.0].name.clone(),
                    existing: self.components[existing.0].name.clone(),
                });
            }
        }
        let id = ComponentId(self.components.len());
        for (port, node) in inputs.iter().enumerate() {
            self.nodes[node.0].listener = Some((id, port));
        }
        for (port, node) in outputs.iter().enumerate() {
            self.nodes[node.0].driver = Some((id, port));
        }
        self.components.push(Component {
            name: name.to_string(),
            kind,
            inputs: inputs.to_vec(),
            outputs: outputs.to_vec(),
        });
        self.component_names.insert(name.to_string(), id.0);
        Ok(id)
    }

    /// Adds a ring oscillator and the internal node that closes its loop.
    pub fn add_ring_oscillator(
        &mut self,
        name: &str,
        period: u64,
        switch_closed: bool,
        start: NodeId,
        out: NodeId,
    ) -> Result<ComponentId, NetlistError> {
        if period == 0 {
            return Err(NetlistError::ZeroPeriod);
        }
        let lap = self.add_node(&format!("{name}.lap"))?;
        self.add_component(
            name,
            ComponentKind::RingOscillator { period, switch_closed },
            &[start, lap],
            &[out, lap],
        )
    }

    fn check_node(&self, node: NodeId) -> Result<(), NetlistError> {
        if node.0 < self.nodes.len() {
            Ok(())
        } else {
            Err(NetlistError::UnknownNode(node.0))
        }
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.names.get(name).copied().map(NodeId)
    }

    pub fn component_id(&self, name: &str) -> Option<ComponentId> {
        self.component_names.get(name).copied().map(ComponentId)
    }

    pub fn node_name(&self, node: NodeId) -> &str {
        &self.nodes[node.0].name
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, id: ComponentId) -> &Component {
        &self.components[id.0]
    }

    pub(crate) fn component_mut(&mut self, id: ComponentId) -> &mut Component {
        &mut self.components[id.0]
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        node.0 < self.nodes.len()
    }

    pub fn contains_component(&self, id: ComponentId) -> bool {
        id.0 < self.components.len()
    }

    /// Listener of `node`, if any.
    pub fn listener(&self, node: NodeId) -> Option<(ComponentId, usize)> {
        self.nodes[node.0].listener
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fan_out_without_splitter_is_rejected() {
        let mut n = Netlist::new();
        let a = n.add_node("a").unwrap();
        let b = n.add_node("b").unwrap();
        let c = n.add_node("c").unwrap();
        n.add_component("j1", ComponentKind::Jtl { delay: 1 }, &[a], &[b]).unwrap();
        let err = n.add_component("j2", ComponentKind::Jtl { delay: 1 }, &[a], &[c]).unwrap_err();
        assert!(matches!(err, NetlistError::FanOut { .. }));
    }

    #[test]
    fn second_driver_is_rejected() {
        let mut n = Netlist::new();
        let a = n.add_node("a").unwrap();
        let b = n.add_node("b").unwrap();
        let c = n.add_node("c").unwrap();
        n.add_component("j1", ComponentKind::Jtl { delay: 1 }, &[a], &[c]).unwrap();
        let err = n.add_component("j2", ComponentKind::Jtl { delay: 1 }, &[b], &[c]).unwrap_err();
        assert!(matches!(err, NetlistError::MultipleDrivers { .. }));
    }

    #[test]
    fn arity_and_names_are_checked() {
        let mut n = Netlist::new();
        let a = n.add_node("a").unwrap();
        assert!(matches!(n.add_node("a"), Err(NetlistError::DuplicateName(_))));
        assert!(matches!(n.add_node("has space"), Err(NetlistError::InvalidName(_))));
        let err = n.add_component("s", ComponentKind::Splitter { delay: 0 }, &[a], &[]).unwrap_err();
        assert!(matches!(err, NetlistError::Arity { kind: "splitter", .. }));
        let out = n.add_node("out").unwrap();
        assert_eq!(n.add_ring_oscillator("ro", 0, true, a, out), Err(NetlistError::ZeroPeriod));
    }
}
