//! Gate-level netlist IR.
//!
//! A [`Netlist`] is immutable once parsed. Flip-flops cut the design into a
//! combinational view: each DFF's Q net acts as a pseudo primary input and its
//! D net as a pseudo primary output. `topo_order` orders the combinational
//! gates only.

mod bench;
mod cone;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use cone::NetSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetlistError {
    #[error("line {line}: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("line {line}: unknown gate kind `{kind}`")]
    UnknownGateKind { line: usize, kind: String },
    #[error("net `{0}` has no driver")]
    UndrivenNet(String),
    #[error("line {line}: net `{net}` is driven more than once")]
    MultiplyDrivenNet { line: usize, net: String },
    #[error("combinational loop through net `{0}`")]
    CombinationalLoop(String),
    #[error("unknown net `{0}`")]
    UnknownNet(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetId(pub u32);

impl NetId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Or,
    Nand,
    Nor,
    Xor,
    Xnor,
    Not,
    Buff,
    Dff,
}

impl GateKind {
    pub fn parse(s: &str) -> Option<GateKind> {
        let kind = match s.to_ascii_uppercase().as_str() {
            "AND" => GateKind::And,
            "OR" => GateKind::Or,
            "NAND" => GateKind::Nand,
            "NOR" => GateKind::Nor,
            "XOR" => GateKind::Xor,
            "XNOR" => GateKind::Xnor,
            "NOT" | "INV" => GateKind::Not,
            "BUFF" | "BUF" => GateKind::Buff,
            "DFF" => GateKind::Dff,
            _ => return None,
        };
        Some(kind)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Nand => "NAND",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Not => "NOT",
            GateKind::Buff => "BUFF",
            GateKind::Dff => "DFF",
        }
    }

    pub fn is_unary(self) -> bool {
        matches!(self, GateKind::Not | GateKind::Buff | GateKind::Dff)
    }

    /// Boolean evaluation over 64 packed patterns.
    pub fn eval(self, inputs: impl Iterator<Item = u64>) -> u64 {
        let mut inputs = inputs;
        let first = inputs.next().unwrap_or(0);
        match self {
            GateKind::And => inputs.fold(first, |acc, v| acc & v),
            GateKind::Nand => !inputs.fold(first, |acc, v| acc & v),
            GateKind::Or => inputs.fold(first, |acc, v| acc | v),
            GateKind::Nor => !inputs.fold(first, |acc, v| acc | v),
            GateKind::Xor => inputs.fold(first, |acc, v| acc ^ v),
            GateKind::Xnor => !inputs.fold(first, |acc, v| acc ^ v),
            GateKind::Not => !first,
            GateKind::Buff | GateKind::Dff => first,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<NetId>,
    pub output: NetId,
}

/// What drives a net.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    PrimaryInput,
    /// Index into [`Netlist::gates`]; the gate is combinational.
    Gate(usize),
    /// Index into [`Netlist::gates`]; the gate is a DFF and this is its Q pin.
    DffOutput(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    names: Vec<String>,
    index: BTreeMap<String, NetId>,
    gates: Vec<Gate>,
    drivers: Vec<Driver>,
    primary_inputs: Vec<NetId>,
    primary_outputs: Vec<NetId>,
    dff_boundaries: Vec<(NetId, NetId)>,
    topo_order: Vec<usize>,
    // Combinational gates reading each net; DFF gates are excluded.
    fanout: Vec<Vec<usize>>,
    pseudo_outputs: BTreeSet<NetId>,
}

/// `[A-Za-z_][A-Za-z0-9_.]*`
pub fn is_valid_net_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

impl Netlist {
    /// Parses ISCAS bench text.
    pub fn parse_bench(text: &str) -> Result<Netlist, NetlistError> {
        bench::parse(text)
    }

    pub(crate) fn build(
        names: Vec<String>,
        gates: Vec<Gate>,
        drivers: Vec<Option<Driver>>,
        primary_inputs: Vec<NetId>,
        primary_outputs: Vec<NetId>,
    ) -> Result<Netlist, NetlistError> {
        let drivers = drivers
            .into_iter()
            .enumerate()
            .map(|(i, d)| d.ok_or_else(|| NetlistError::UndrivenNet(names[i].clone())))
            .collect::<Result<Vec<_>, _>>()?;

        let mut fanout = alloc::vec![Vec::new(); names.len()];
        let mut dff_boundaries = Vec::new();
        for (gi, g) in gates.iter().enumerate() {
            if g.kind == GateKind::Dff {
                dff_boundaries.push((g.inputs[0], g.output));
            } else {
                for &i in &g.inputs {
                    if !fanout[i.index()].contains(&gi) {
                        fanout[i.index()].push(gi);
                    }
                }
            }
        }

        // Kahn's algorithm over combinational gates, seeded in declaration order.
        let mut pending: Vec<usize> = gates
            .iter()
            .map(|g| {
                if g.kind == GateKind::Dff {
                    0
                } else {
                    g.inputs
                        .iter()
                        .filter(|i| matches!(drivers[i.index()], Driver::Gate(_)))
                        .count()
                }
            })
            .collect();
        let mut ready: BTreeSet<usize> = (0..gates.len())
            .filter(|&g| gates[g].kind != GateKind::Dff && pending[g] == 0)
            .collect();
        let comb_count = gates.iter().filter(|g| g.kind != GateKind::Dff).count();
        let mut topo_order = Vec::with_capacity(comb_count);
        while let Some(g) = ready.pop_first() {
            topo_order.push(g);
            let out = gates[g].output.index();
            for &consumer in &fanout[out] {
                let n = gates[consumer].inputs.iter().filter(|i| i.index() == out).count();
                pending[consumer] -= n;
                if pending[consumer] == 0 {
                    ready.insert(consumer);
                }
            }
        }
        if topo_order.len() != comb_count {
            let stuck = (0..gates.len())
                .find(|&g| gates[g].kind != GateKind::Dff && pending[g] > 0)
                .expect("unsorted gate");
            return Err(NetlistError::CombinationalLoop(names[gates[stuck].output.index()].clone()));
        }

        let mut pseudo_outputs: BTreeSet<NetId> = primary_outputs.iter().copied().collect();
        pseudo_outputs.extend(dff_boundaries.iter().map(|&(d, _)| d));

        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), NetId(i as u32))).collect();
        Ok(Netlist {
            names,
            index,
            gates,
            drivers,
            primary_inputs,
            primary_outputs,
            dff_boundaries,
            topo_order,
            fanout,
            pseudo_outputs,
        })
    }

    pub fn net_count(&self) -> usize {
        self.names.len()
    }

    pub fn nets(&self) -> impl Iterator<Item = NetId> + '_ {
        (0..self.names.len() as u32).map(NetId)
    }

    pub fn net_name(&self, net: NetId) -> &str {
        &self.names[net.index()]
    }

    pub fn net_id(&self, name: &str) -> Option<NetId> {
        self.index.get(name).copied()
    }

    /// Resolves names to ids, failing on the first unknown name.
    pub fn resolve<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<NetSet, NetlistError> {
        names
            .into_iter()
            .map(|n| self.net_id(n).ok_or_else(|| NetlistError::UnknownNet(n.into())))
            .collect()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn driver(&self, net: NetId) -> Driver {
        self.drivers[net.index()]
    }

    pub fn primary_inputs(&self) -> &[NetId] {
        &self.primary_inputs
    }

    pub fn primary_outputs(&self) -> &[NetId] {
        &self.primary_outputs
    }

    /// `(d_input_net, q_output_net)` for each flip-flop.
    pub fn dff_boundaries(&self) -> &[(NetId, NetId)] {
        &self.dff_boundaries
    }

    /// Combinational gate indices in a valid topological order.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo_order
    }

    /// Primary inputs followed by DFF Q nets.
    pub fn pseudo_inputs(&self) -> Vec<NetId> {
        let mut v = self.primary_inputs.clone();
        v.extend(self.dff_boundaries.iter().map(|&(_, q)| q));
        v
    }

    pub fn is_pseudo_input(&self, net: NetId) -> bool {
        matches!(self.drivers[net.index()], Driver::PrimaryInput | Driver::DffOutput(_))
    }

    /// Primary outputs and DFF D nets, deduplicated.
    pub fn pseudo_outputs(&self) -> &BTreeSet<NetId> {
        &self.pseudo_outputs
    }

    pub fn is_pseudo_output(&self, net: NetId) -> bool {
        self.pseudo_outputs.contains(&net)
    }

    /// Combinational gates reading `net`.
    pub fn fanout_gates(&self, net: NetId) -> &[usize] {
        &self.fanout[net.index()]
    }
}
