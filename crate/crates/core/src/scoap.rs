//! SCOAP combinational testability.
//!
//! Controllability (CC0/CC1) is propagated forward in topological order and
//! observability (CO) backward. Primary inputs and DFF Q nets score 1/1;
//! primary outputs and DFF D nets observe at 0. XOR/XNOR with more than two
//! inputs are scored as a left-associated chain of two-input XORs.

use alloc::vec;
use alloc::vec::Vec;

use crate::netlist::{Driver, GateKind, NetId, NetSet, Netlist, NetlistError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScoapError {
    #[error("score overflow at net `{0}`")]
    Overflow(alloc::string::String),
    #[error("empty net set")]
    EmptyNetSet,
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoapReport {
    cc0: Vec<u64>,
    cc1: Vec<u64>,
    // None when the net has no path to any pseudo-output.
    co: Vec<Option<u64>>,
}

impl ScoapReport {
    pub fn cc0(&self, net: NetId) -> u64 {
        self.cc0[net.index()]
    }

    pub fn cc1(&self, net: NetId) -> u64 {
        self.cc1[net.index()]
    }

    pub fn co(&self, net: NetId) -> Option<u64> {
        self.co[net.index()]
    }

    pub fn len(&self) -> usize {
        self.cc0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cc0.is_empty()
    }

    /// Mean of `cc0 + cc1` over `nets`.
    pub fn mean_controllability(&self, nets: &NetSet) -> Result<f64, ScoapError> {
        if nets.is_empty() {
            return Err(ScoapError::EmptyNetSet);
        }
        let mut total = 0f64;
        for &n in nets {
            if n.index() >= self.len() {
                return Err(NetlistError::UnknownNet(alloc::format!("#{}", n.0)).into());
            }
            total += self.cc0(n) as f64 + self.cc1(n) as f64;
        }
        Ok(total / nets.len() as f64)
    }
}

#[derive(Clone, Copy)]
struct Cc {
    zero: u64,
    one: u64,
}

struct Scorer<'a> {
    netlist: &'a Netlist,
}

impl Scorer<'_> {
    fn overflow(&self, net: NetId) -> ScoapError {
        ScoapError::Overflow(self.netlist.net_name(net).into())
    }

    fn add(&self, net: NetId, terms: &[u64]) -> Result<u64, ScoapError> {
        terms.iter().try_fold(0u64, |acc, &t| acc.checked_add(t)).ok_or_else(|| self.overflow(net))
    }

    fn sum(&self, net: NetId, values: impl Iterator<Item = u64>) -> Result<u64, ScoapError> {
        let mut acc = 0u64;
        for v in values {
            acc = acc.checked_add(v).ok_or_else(|| self.overflow(net))?;
        }
        Ok(acc)
    }

    fn xor2(&self, net: NetId, a: Cc, b: Cc) -> Result<Cc, ScoapError> {
        let one = self.add(net, &[a.zero, b.one])?.min(self.add(net, &[a.one, b.zero])?);
        let zero = self.add(net, &[a.zero, b.zero])?.min(self.add(net, &[a.one, b.one])?);
        Ok(Cc { zero: self.add(net, &[zero, 1])?, one: self.add(net, &[one, 1])? })
    }

    /// Controllabilities of the left-associated XOR chain; the last element is
    /// the raw XOR of all inputs.
    fn xor_chain(&self, net: NetId, inputs: &[Cc]) -> Result<Vec<Cc>, ScoapError> {
        let mut chain = Vec::with_capacity(inputs.len() - 1);
        let mut acc = inputs[0];
        for &next in &inputs[1..] {
            acc = self.xor2(net, acc, next)?;
            chain.push(acc);
        }
        Ok(chain)
    }

    fn gate_cc(&self, kind: GateKind, out: NetId, ins: &[Cc]) -> Result<Cc, ScoapError> {
        let min0 = || ins.iter().map(|c| c.zero).min().unwrap_or(0);
        let min1 = || ins.iter().map(|c| c.one).min().unwrap_or(0);
        let sum0 = || self.sum(out, ins.iter().map(|c| c.zero));
        let sum1 = || self.sum(out, ins.iter().map(|c| c.one));
        let inc = |v: u64| self.add(out, &[v, 1]);
        Ok(match kind {
            GateKind::And => Cc { zero: inc(min0())?, one: inc(sum1()?)? },
            GateKind::Nand => Cc { zero: inc(sum1()?)?, one: inc(min0())? },
            GateKind::Or => Cc { zero: inc(sum0()?)?, one: inc(min1())? },
            GateKind::Nor => Cc { zero: inc(min1())?, one: inc(sum0()?)? },
            GateKind::Not => Cc { zero: inc(ins[0].one)?, one: inc(ins[0].zero)? },
            GateKind::Buff | GateKind::Dff => Cc { zero: inc(ins[0].zero)?, one: inc(ins[0].one)? },
            GateKind::Xor | GateKind::Xnor => {
                let last = *self.xor_chain(out, ins)?.last().expect("xor has two or more inputs");
                if kind == GateKind::Xor {
                    last
                } else {
                    Cc { zero: last.one, one: last.zero }
                }
            }
        })
    }

    /// Observability of each input pin given the gate output's observability.
    fn pin_co(&self, kind: GateKind, out: NetId, out_co: u64, ins: &[Cc]) -> Result<Vec<u64>, ScoapError> {
        let others = |skip: usize, pick: fn(&Cc) -> u64| {
            self.sum(out, ins.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, c)| pick(c)))
        };
        let mut pins = vec![0u64; ins.len()];
        match kind {
            GateKind::And | GateKind::Nand => {
                for (i, pin) in pins.iter_mut().enumerate() {
                    *pin = self.add(out, &[out_co, others(i, |c| c.one)?, 1])?;
                }
            }
            GateKind::Or | GateKind::Nor => {
                for (i, pin) in pins.iter_mut().enumerate() {
                    *pin = self.add(out, &[out_co, others(i, |c| c.zero)?, 1])?;
                }
            }
            GateKind::Not | GateKind::Buff | GateKind::Dff => pins[0] = self.add(out, &[out_co, 1])?,
            GateKind::Xor | GateKind::Xnor => {
                // Walk the chain from the output back to the first input.
                let chain = self.xor_chain(out, ins)?;
                let easiest = |c: &Cc| c.zero.min(c.one);
                let mut step_co = out_co;
                for k in (1..ins.len()).rev() {
                    let left = if k == 1 { ins[0] } else { chain[k - 2] };
                    pins[k] = self.add(out, &[step_co, easiest(&left), 1])?;
                    step_co = self.add(out, &[step_co, easiest(&ins[k]), 1])?;
                }
                pins[0] = step_co;
            }
        }
        Ok(pins)
    }
}

/// Scores every net of the combinational view.
pub fn compute_scoap(netlist: &Netlist) -> Result<ScoapReport, ScoapError> {
    let scorer = Scorer { netlist };
    let n = netlist.net_count();
    let mut cc = vec![Cc { zero: 1, one: 1 }; n];
    for &g in netlist.topo_order() {
        let gate = &netlist.gates()[g];
        let ins: Vec<Cc> = gate.inputs.iter().map(|i| cc[i.index()]).collect();
        cc[gate.output.index()] = scorer.gate_cc(gate.kind, gate.output, &ins)?;
    }

    let mut co: Vec<Option<u64>> = vec![None; n];
    for &po in netlist.pseudo_outputs() {
        co[po.index()] = Some(0);
    }
    for &g in netlist.topo_order().iter().rev() {
        let gate = &netlist.gates()[g];
        let Some(out_co) = co[gate.output.index()] else { continue };
        let ins: Vec<Cc> = gate.inputs.iter().map(|i| cc[i.index()]).collect();
        let pins = scorer.pin_co(gate.kind, gate.output, out_co, &ins)?;
        for (&net, pin) in gate.inputs.iter().zip(pins) {
            let slot = &mut co[net.index()];
            *slot = Some(slot.map_or(pin, |c| c.min(pin)));
        }
    }
    debug_assert!(netlist
        .nets()
        .filter(|&n| matches!(netlist.driver(n), Driver::PrimaryInput | Driver::DffOutput(_)))
        .all(|n| cc[n.index()].zero == 1 && cc[n.index()].one == 1));

    Ok(ScoapReport {
        cc0: cc.iter().map(|c| c.zero).collect(),
        cc1: cc.iter().map(|c| c.one).collect(),
        co,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scores(text: &str) -> (Netlist, ScoapReport) {
        let n = Netlist::parse_bench(text).unwrap();
        let r = compute_scoap(&n).unwrap();
        (n, r)
    }

    fn triple(n: &Netlist, r: &ScoapReport, name: &str) -> (u64, u64, Option<u64>) {
        let id = n.net_id(name).unwrap();
        (r.cc0(id), r.cc1(id), r.co(id))
    }

    #[test]
    fn nand_not() {
        let (n, r) = scores("INPUT(a)\nINPUT(b)\ng1 = NAND(a, b)\nOUTPUT(y)\ny = NOT(g1)");
        assert_eq!(triple(&n, &r, "g1"), (3, 2, Some(1)));
        assert_eq!(triple(&n, &r, "y"), (3, 4, Some(0)));
        assert_eq!(triple(&n, &r, "a"), (1, 1, Some(3)));
        assert_eq!(triple(&n, &r, "b"), (1, 1, Some(3)));
    }

    #[test]
    fn single_buff() {
        let (n, r) = scores("INPUT(a)\ny = BUFF(a)\nOUTPUT(y)");
        assert_eq!(triple(&n, &r, "y"), (2, 2, Some(0)));
        assert_eq!(triple(&n, &r, "a"), (1, 1, Some(1)));
    }

    #[test]
    fn or_nor_rules() {
        let (n, r) = scores("INPUT(a)\nINPUT(b)\nINPUT(c)\no = OR(a, b, c)\nz = NOR(o, c)\nOUTPUT(z)");
        assert_eq!(triple(&n, &r, "o"), (4, 2, Some(2)));
        // NOR: cc0 = min cc1 + 1, cc1 = sum cc0 + 1
        assert_eq!(triple(&n, &r, "z"), (2, 6, Some(0)));
        // OR pin: CO(o) + sum of the other inputs' CC0 + 1
        assert_eq!(triple(&n, &r, "a"), (1, 1, Some(5)));
        // c feeds both gates; either path gives 5
        assert_eq!(triple(&n, &r, "c"), (1, 1, Some(5)));
    }

    #[test]
    fn xor_two_and_three_inputs() {
        let (n, r) = scores("INPUT(a)\nINPUT(b)\nx = XOR(a, b)\nOUTPUT(x)");
        assert_eq!(triple(&n, &r, "x"), (3, 3, Some(0)));
        assert_eq!(triple(&n, &r, "a"), (1, 1, Some(2)));

        // XOR(a, n, c) with n = NOT(b): chain t = XOR(a, n) then XOR(t, c)
        let (n, r) = scores("INPUT(a)\nINPUT(b)\nINPUT(c)\nnb = NOT(b)\nx = XNOR(a, nb, c)\nOUTPUT(x)");
        // t: cc = (min(1+2, 1+2)+1, min(1+2, 1+2)+1) = (4, 4); XOR(t, c) = (6, 6); XNOR swaps
        assert_eq!(triple(&n, &r, "x"), (6, 6, Some(0)));
        // CO(c) = 0 + min(cc(t)) + 1 = 5; CO(t) = 0 + 1 + 1 = 2
        assert_eq!(triple(&n, &r, "c"), (1, 1, Some(5)));
        // CO(a) = CO(t) + min(cc(nb)) + 1 = 2 + 2 + 1; CO(nb) = 2 + 1 + 1
        assert_eq!(triple(&n, &r, "a"), (1, 1, Some(5)));
        assert_eq!(triple(&n, &r, "nb"), (2, 2, Some(4)));
        assert_eq!(triple(&n, &r, "b"), (1, 1, Some(5)));
    }

    #[test]
    fn dangling_net_unobservable() {
        let (n, r) = scores("INPUT(a)\nINPUT(b)\nu = AND(a, b)\ny = NOT(a)\nOUTPUT(y)");
        assert_eq!(triple(&n, &r, "u"), (2, 3, None));
        assert_eq!(r.co(n.net_id("b").unwrap()), None);
    }

    #[test]
    fn dff_boundary() {
        let (n, r) = scores("INPUT(a)\nd = AND(a, q)\nq = DFF(d)\ny = NOT(q)\nOUTPUT(y)");
        assert_eq!(triple(&n, &r, "q"), (1, 1, Some(1)));
        assert_eq!(triple(&n, &r, "d"), (2, 3, Some(0)));
    }

    #[test]
    fn mean_controllability() {
        let (n, r) = scores("INPUT(a)\nINPUT(b)\ng1 = NAND(a, b)\nOUTPUT(y)\ny = NOT(g1)");
        let a = n.resolve(["a"]).unwrap();
        assert_eq!(r.mean_controllability(&a).unwrap(), 2.0);
        let ag = n.resolve(["a", "g1"]).unwrap();
        assert_eq!(r.mean_controllability(&ag).unwrap(), 3.5);
        assert_eq!(r.mean_controllability(&n.resolve(["a", "a"]).unwrap()).unwrap(), 2.0);
        assert_eq!(r.mean_controllability(&NetSet::new()), Err(ScoapError::EmptyNetSet));
    }

    #[test]
    fn overflow_is_an_error() {
        // Each AND level doubles CC1; 70 levels overflow u64.
        let mut text = alloc::string::String::from("INPUT(a)\nn0 = BUFF(a)\n");
        for i in 1..70 {
            text += &alloc::format!("n{i} = AND(n{}, n{})\n", i - 1, i - 1);
        }
        text += "OUTPUT(n69)\n";
        let n = Netlist::parse_bench(&text).unwrap();
        assert!(matches!(compute_scoap(&n), Err(ScoapError::Overflow(_))));
    }
}
