use std::io::{self, Write};

use super::{ComponentId, Netlist, NodeId, SimTime};

/// Where a trace entry happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSite {
    Node(NodeId),
    /// Control action on a component (switch changes).
    Control(ComponentId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEntry {
    pub time: SimTime,
    pub site: TraceSite,
    pub kind: &'static str,
    pub action: &'static str,
}

/// Ordered record of every delivered event.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceLog {
    entries: Vec<TraceEntry>,
}

impl TraceLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn push(&mut self, entry: TraceEntry) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[TraceEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn count_action(&self, action: &str) -> usize {
        self.entries.iter().filter(|e| e.action == action).count()
    }

    /// Line-oriented export, `time_ps node_id component_kind action`. Control
    /// entries use the component name in the node column.
    pub fn write_to<W: Write>(&self, netlist: &Netlist, mut out: W) -> io::Result<()> {
        for e in &self.entries {
            let site = match e.site {
                TraceSite::Node(node) => netlist.node_name(node),
                TraceSite::Control(c) => netlist.component(c).name.as_str(),
            };
            writeln!(out, "{} {} {} {}", e.time, site, e.kind, e.action)?;
        }
        Ok(())
    }

    pub fn to_text(&self, netlist: &Netlist) -> String {
        let mut buf = Vec::new();
        self.write_to(netlist, &mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("trace is ASCII")
    }
}
