//! Cone-of-influence queries over the combinational view.

use alloc::collections::btree_set::{self, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use super::{Driver, NetId, Netlist, NetlistError};

/// An ordered set of nets.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct NetSet(BTreeSet<NetId>);

impl NetSet {
    pub fn new() -> NetSet {
        NetSet::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, net: NetId) -> bool {
        self.0.contains(&net)
    }

    pub fn insert(&mut self, net: NetId) -> bool {
        self.0.insert(net)
    }

    pub fn iter(&self) -> btree_set::Iter<'_, NetId> {
        self.0.iter()
    }

    pub fn intersection_len(&self, other: &NetSet) -> usize {
        self.0.intersection(&other.0).count()
    }

    pub fn intersection(&self, other: &NetSet) -> NetSet {
        NetSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn union(&self, other: &NetSet) -> NetSet {
        NetSet(self.0.union(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &NetSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<NetId> for NetSet {
    fn from_iter<I: IntoIterator<Item = NetId>>(iter: I) -> Self {
        NetSet(iter.into_iter().collect())
    }
}

impl Extend<NetId> for NetSet {
    fn extend<I: IntoIterator<Item = NetId>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl<'a> IntoIterator for &'a NetSet {
    type Item = &'a NetId;
    type IntoIter = btree_set::Iter<'a, NetId>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Netlist {
    fn check(&self, roots: &NetSet) -> Result<(), NetlistError> {
        match roots.iter().find(|n| n.index() >= self.net_count()) {
            Some(bad) => Err(NetlistError::UnknownNet(format!("#{}", bad.0))),
            None => Ok(()),
        }
    }

    /// Every net with a combinational path to a root, roots included.
    /// Traversal stops at primary inputs and DFF Q nets.
    pub fn fanin_cone(&self, roots: &NetSet) -> Result<NetSet, NetlistError> {
        self.check(roots)?;
        let mut seen = alloc::vec![false; self.net_count()];
        let mut stack: Vec<NetId> = roots.iter().copied().collect();
        for r in &stack {
            seen[r.index()] = true;
        }
        while let Some(net) = stack.pop() {
            if let Driver::Gate(g) = self.driver(net) {
                for &i in &self.gates()[g].inputs {
                    if !seen[i.index()] {
                        seen[i.index()] = true;
                        stack.push(i);
                    }
                }
            }
        }
        Ok(collect(&seen))
    }

    /// Every net reachable forward from a root through combinational gates,
    /// roots included. DFF D pins end the traversal.
    pub fn fanout_cone(&self, roots: &NetSet) -> Result<NetSet, NetlistError> {
        self.check(roots)?;
        let mut seen = alloc::vec![false; self.net_count()];
        let mut stack: Vec<NetId> = roots.iter().copied().collect();
        for r in &stack {
            seen[r.index()] = true;
        }
        while let Some(net) = stack.pop() {
            for &g in self.fanout_gates(net) {
                let out = self.gates()[g].output;
                if !seen[out.index()] {
                    seen[out.index()] = true;
                    stack.push(out);
                }
            }
        }
        Ok(collect(&seen))
    }

    pub fn fanin_cone_of<'a>(&self, roots: impl IntoIterator<Item = &'a str>) -> Result<NetSet, NetlistError> {
        self.fanin_cone(&self.resolve(roots)?)
    }

    pub fn fanout_cone_of<'a>(&self, roots: impl IntoIterator<Item = &'a str>) -> Result<NetSet, NetlistError> {
        self.fanout_cone(&self.resolve(roots)?)
    }
}

fn collect(seen: &[bool]) -> NetSet {
    seen.iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(i, _)| NetId(i as u32))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;
    use alloc::vec::Vec;

    fn names(n: &Netlist, set: &NetSet) -> Vec<String> {
        let mut v: Vec<String> = set.iter().map(|&id| n.net_name(id).into()).collect();
        v.sort();
        v
    }

    const CHAIN: &str = "INPUT(a)\ng1 = NOT(a)\ny = NOT(g1)\nOUTPUT(y)";

    #[test]
    fn chain_cones() {
        let n = Netlist::parse_bench(CHAIN).unwrap();
        assert_eq!(names(&n, &n.fanin_cone_of(["y"]).unwrap()), ["a", "g1", "y"]);
        assert_eq!(names(&n, &n.fanin_cone_of(["a"]).unwrap()), ["a"]);
        assert_eq!(names(&n, &n.fanout_cone_of(["a"]).unwrap()), ["a", "g1", "y"]);
        assert_eq!(names(&n, &n.fanout_cone_of(["y"]).unwrap()), ["y"]);
    }

    #[test]
    fn disjoint_chains() {
        let n = Netlist::parse_bench("INPUT(a)\nINPUT(b)\nx = NOT(a)\nz = NOT(b)\nOUTPUT(x)\nOUTPUT(z)").unwrap();
        assert_eq!(names(&n, &n.fanin_cone_of(["x"]).unwrap()), ["a", "x"]);
    }

    #[test]
    fn tree_single_net_intersection() {
        let n = Netlist::parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\ng = AND(a, b)\ny = OR(g, c)\nOUTPUT(y)").unwrap();
        for net in n.nets() {
            let root: NetSet = [net].into_iter().collect();
            let both = n.fanin_cone(&root).unwrap().intersection(&n.fanout_cone(&root).unwrap());
            assert_eq!(both, root);
        }
    }

    #[test]
    fn cones_stop_at_dff() {
        let n = Netlist::parse_bench("INPUT(a)\nd = AND(a, q)\nq = DFF(d)\ny = NOT(q)\nOUTPUT(y)").unwrap();
        assert_eq!(names(&n, &n.fanin_cone_of(["y"]).unwrap()), ["q", "y"]);
        assert_eq!(names(&n, &n.fanout_cone_of(["a"]).unwrap()), ["a", "d"]);
    }

    #[test]
    fn unknown_root() {
        let n = Netlist::parse_bench(CHAIN).unwrap();
        assert_eq!(n.fanin_cone_of(["nope"]).unwrap_err(), NetlistError::UnknownNet("nope".into()));
        let bogus: NetSet = [NetId(99)].into_iter().collect();
        assert!(n.fanout_cone(&bogus).is_err());
    }
}
