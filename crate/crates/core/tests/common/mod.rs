#![allow(dead_code)]

use std::fmt::Write as _;

use ftmea_core::{Countermeasure, Domain, ItemKind, MeasureKind, Netlist, Rating, RiskItem, Worksheet};
use proptest::prelude::*;

pub const FIXTURES: [&str; 8] = [
    "nand_not",
    "c17",
    "overlap6",
    "adder4",
    "register_locked",
    "register_unlocked",
    "register_bypass",
    "parity_reg",
];

pub fn fixture_text(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}.bench", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn fixture(name: &str) -> Netlist {
    Netlist::parse_bench(&fixture_text(name)).unwrap()
}

pub fn rating(v: u8) -> Rating {
    Rating::new(v as i64).unwrap()
}

pub fn item(id: &str, kind: ItemKind, s: u8, o: u8, d: u8) -> RiskItem {
    RiskItem {
        id: id.into(),
        kind,
        description: String::new(),
        effect_group: "E".into(),
        severity: rating(s),
        occurrence: rating(o),
        detection: rating(d),
    }
}

pub fn measure(id: &str, kind: MeasureKind, domain: Domain) -> Countermeasure {
    Countermeasure { id: id.into(), kind, domain, description: String::new(), anchors: None }
}

/// Shape of a random gate-level circuit; rendered to bench text by [`RandomCircuit::bench`].
#[derive(Debug, Clone)]
pub struct RandomCircuit {
    pub inputs: usize,
    pub dffs: usize,
    /// `(kind, raw source picks)`; picks are reduced modulo the nets defined so far.
    pub gates: Vec<(usize, Vec<usize>)>,
    pub dff_sources: Vec<usize>,
    pub outputs: Vec<usize>,
}

const KINDS: [&str; 8] = ["AND", "NAND", "OR", "NOR", "XOR", "XNOR", "NOT", "BUFF"];

impl RandomCircuit {
    pub fn bench(&self) -> String {
        let mut text = String::new();
        let mut nets: Vec<String> = Vec::new();
        for i in 0..self.inputs {
            writeln!(text, "INPUT(i{i})").unwrap();
            nets.push(format!("i{i}"));
        }
        for j in 0..self.dffs {
            nets.push(format!("q{j}"));
        }
        for (g, (kind, picks)) in self.gates.iter().enumerate() {
            let kind = KINDS[kind % KINDS.len()];
            let arity = if matches!(kind, "NOT" | "BUFF") { 1 } else { picks.len().max(2) };
            let args: Vec<&str> = (0..arity)
                .map(|k| nets[picks.get(k).copied().unwrap_or(k) % nets.len()].as_str())
                .collect();
            writeln!(text, "g{g} = {kind}({})", args.join(", ")).unwrap();
            nets.push(format!("g{g}"));
        }
        for j in 0..self.dffs {
            let src = &nets[self.dff_sources.get(j).copied().unwrap_or(0) % nets.len()];
            writeln!(text, "q{j} = DFF({src})").unwrap();
        }
        let mut outs: Vec<&String> = self.outputs.iter().map(|o| &nets[o % nets.len()]).collect();
        outs.sort();
        outs.dedup();
        for o in outs {
            writeln!(text, "OUTPUT({o})").unwrap();
        }
        text
    }

    pub fn netlist(&self) -> Netlist {
        Netlist::parse_bench(&self.bench()).unwrap()
    }
}

pub fn circuit_strategy(max_inputs: usize, max_dffs: usize, max_gates: usize) -> impl Strategy<Value = RandomCircuit> {
    (1..=max_inputs, 0..=max_dffs).prop_flat_map(move |(inputs, dffs)| {
        (
            Just(inputs),
            Just(dffs),
            prop::collection::vec((0usize..8, prop::collection::vec(any::<usize>(), 1..=4)), 1..=max_gates),
            prop::collection::vec(any::<usize>(), dffs),
            prop::collection::vec(any::<usize>(), 1..=3),
        )
            .prop_map(|(inputs, dffs, gates, dff_sources, outputs)| RandomCircuit {
                inputs,
                dffs,
                gates,
                dff_sources,
                outputs,
            })
    })
}

/// Fanout-free tree circuit: every net feeds at most one gate and the root is the only output.
pub fn fanout_free_bench(kinds: &[usize], arities: &[usize]) -> String {
    let mut text = String::new();
    let mut frontier: Vec<String> = Vec::new();
    let mut next_input = 0;
    let mut fresh = |text: &mut String| {
        let n = format!("i{next_input}");
        next_input += 1;
        writeln!(text, "INPUT({n})").unwrap();
        n
    };
    for (g, &kind) in kinds.iter().enumerate() {
        let kind = KINDS[kind % KINDS.len()];
        let arity = if matches!(kind, "NOT" | "BUFF") { 1 } else { arities.get(g).copied().unwrap_or(2).clamp(2, 3) };
        let mut args = Vec::new();
        for _ in 0..arity {
            args.push(frontier.pop().unwrap_or_else(|| fresh(&mut text)));
        }
        writeln!(text, "t{g} = {kind}({})", args.join(", ")).unwrap();
        frontier.insert(0, format!("t{g}"));
    }
    // Join whatever is left into a single root.
    let mut g = kinds.len();
    while frontier.len() > 1 {
        let (a, b) = (frontier.pop().unwrap(), frontier.pop().unwrap());
        writeln!(text, "t{g} = AND({a}, {b})").unwrap();
        frontier.insert(0, format!("t{g}"));
        g += 1;
    }
    writeln!(text, "OUTPUT({})", frontier[0]).unwrap();
    text
}

/// Worksheet of `ratings.len()` items, each with one prevention and one detection measure.
pub fn ladder_worksheet(ratings: &[(u8, u8, u8, bool)]) -> Worksheet {
    let items = ratings
        .iter()
        .enumerate()
        .map(|(i, &(s, o, d, threat))| {
            let kind = if threat { ItemKind::ThreatMode } else { ItemKind::FailureMode };
            item(&format!("I{i:03}"), kind, s, o, d)
        })
        .collect::<Vec<_>>();
    let mut measures = Vec::new();
    let mut applicability = Vec::new();
    for i in 0..ratings.len() {
        measures.push(measure(&format!("P{i:03}"), MeasureKind::Prevention, Domain::Safety));
        measures.push(measure(&format!("D{i:03}"), MeasureKind::Detection, Domain::Security));
        applicability.push((format!("I{i:03}"), format!("P{i:03}")));
        applicability.push((format!("I{i:03}"), format!("D{i:03}")));
    }
    Worksheet::new(items, measures, applicability).unwrap()
}

pub fn ratings_strategy(max_items: usize) -> impl Strategy<Value = Vec<(u8, u8, u8, bool)>> {
    prop::collection::vec((1u8..=10, 1u8..=10, 1u8..=10, any::<bool>()), 1..=max_items)
}

/// Re-emits `n` as bench text with every net renamed by `rename` and the gate
/// lines in reverse order. When `buffer` is set, a BUFF named `{net}__b` is
/// inserted between that net and its combinational readers.
pub fn rewrite(n: &Netlist, rename: impl Fn(&str) -> String, buffer: Option<ftmea_core::NetId>) -> String {
    let name = |id: ftmea_core::NetId| rename(n.net_name(id));
    let mut text = String::new();
    for &i in n.primary_inputs() {
        writeln!(text, "INPUT({})", name(i)).unwrap();
    }
    for &o in n.primary_outputs() {
        writeln!(text, "OUTPUT({})", name(o)).unwrap();
    }
    for gate in n.gates().iter().rev() {
        let args: Vec<String> = gate
            .inputs
            .iter()
            .map(|&i| {
                if Some(i) == buffer && gate.kind != ftmea_core::GateKind::Dff {
                    format!("{}__b", name(i))
                } else {
                    name(i)
                }
            })
            .collect();
        writeln!(text, "{} = {}({})", name(gate.output), gate.kind.as_str(), args.join(", ")).unwrap();
    }
    if let Some(b) = buffer {
        writeln!(text, "{0}__b = BUFF({0})", name(b)).unwrap();
    }
    text
}
