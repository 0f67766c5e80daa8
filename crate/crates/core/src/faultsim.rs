//! Two-valued logic simulation with stuck-at fault and attack-toggle campaigns.
//!
//! Evaluation is bit-parallel: each net holds a `u64` carrying 64 input
//! patterns. Campaigns sweep every pseudo-input assignment when there are at
//! most [`EXHAUSTIVE_LIMIT`] pseudo-inputs, or draw a fixed number of patterns
//! from a seeded ChaCha8 stream.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::netlist::{NetId, NetSet, Netlist};

/// Largest pseudo-input count swept exhaustively (65 536 vectors).
pub const EXHAUSTIVE_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FaultSimError {
    #[error("unknown net {0}")]
    UnknownNet(String),
    #[error("vector has no value for pseudo-input `{0}`")]
    IncompleteVector(String),
    #[error("exhaustive sweep of {inputs} pseudo-inputs exceeds the limit of {EXHAUSTIVE_LIMIT}")]
    ExhaustiveLimitExceeded { inputs: usize },
    #[error("`{0}` is not a primary input or flip-flop output")]
    NotPseudoInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    StuckAt0,
    StuckAt1,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::StuckAt0 => "SA0",
            Polarity::StuckAt1 => "SA1",
        }
    }

    fn word(self) -> u64 {
        match self {
            Polarity::StuckAt0 => 0,
            Polarity::StuckAt1 => !0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaultSite {
    pub net: NetId,
    pub polarity: Polarity,
}

/// Both stuck-at polarities on every net.
pub fn all_stuck_at_sites(netlist: &Netlist) -> Vec<FaultSite> {
    netlist
        .nets()
        .flat_map(|net| [Polarity::StuckAt0, Polarity::StuckAt1].map(|polarity| FaultSite { net, polarity }))
        .collect()
}

/// A value for every pseudo-input.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimVector {
    pub assignment: BTreeMap<NetId, bool>,
}

impl SimVector {
    /// Bit `j` of `index` drives the `j`-th pseudo-input.
    pub fn from_index(netlist: &Netlist, index: u64) -> SimVector {
        let assignment = netlist
            .pseudo_inputs()
            .into_iter()
            .enumerate()
            .map(|(j, net)| (net, j < 64 && (index >> j) & 1 == 1))
            .collect();
        SimVector { assignment }
    }
}

/// Where campaign patterns come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorSource {
    Exhaustive,
    Sampled { seed: u64, count: u64 },
}

impl VectorSource {
    /// Exhaustive at or below the limit, sampled above it.
    pub fn auto(input_count: usize, seed: u64, count: u64) -> VectorSource {
        if input_count <= EXHAUSTIVE_LIMIT {
            VectorSource::Exhaustive
        } else {
            VectorSource::Sampled { seed, count }
        }
    }

    fn seed(self) -> Option<u64> {
        match self {
            VectorSource::Exhaustive => None,
            VectorSource::Sampled { seed, .. } => Some(seed),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CampaignResult {
    pub affecting_sites: BTreeSet<FaultSite>,
    pub toggleable_nets: NetSet,
    pub vectors_evaluated: u64,
    pub seed: Option<u64>,
}

impl CampaignResult {
    /// Union of two campaigns' findings; vector counts add.
    pub fn merge(mut self, other: CampaignResult) -> CampaignResult {
        self.affecting_sites.extend(other.affecting_sites);
        self.toggleable_nets.extend(other.toggleable_nets.iter().copied());
        self.vectors_evaluated += other.vectors_evaluated;
        self.seed = self.seed.or(other.seed);
        self
    }
}

/// Packed evaluator over a fixed pseudo-input order.
struct Engine<'a> {
    netlist: &'a Netlist,
    inputs: Vec<NetId>,
}

impl<'a> Engine<'a> {
    fn new(netlist: &'a Netlist, inputs: Vec<NetId>) -> Self {
        Engine { netlist, inputs }
    }

    fn eval(&self, words: &[u64], faults: &[FaultSite], values: &mut [u64]) {
        let forced = |net: NetId, v: u64| {
            faults.iter().rev().find(|f| f.net == net).map_or(v, |f| f.polarity.word())
        };
        for (&net, &w) in self.inputs.iter().zip(words) {
            values[net.index()] = forced(net, w);
        }
        for &g in self.netlist.topo_order() {
            let gate = &self.netlist.gates()[g];
            let v = gate.kind.eval(gate.inputs.iter().map(|i| values[i.index()]));
            values[gate.output.index()] = forced(gate.output, v);
        }
    }
}

/// Exhaustive pattern words for batch `batch`: lane `l` is vector `64 * batch + l`.
fn exhaustive_words(inputs: usize, batch: u64, words: &mut [u64]) {
    for (j, w) in words.iter_mut().enumerate().take(inputs) {
        let mut word = 0u64;
        for lane in 0..64u64 {
            let index = batch * 64 + lane;
            word |= ((index >> j) & 1) << lane;
        }
        *w = word;
    }
}

fn lane_mask(lanes: u64) -> u64 {
    if lanes >= 64 {
        !0
    } else {
        (1u64 << lanes) - 1
    }
}

/// Calls `f(words, lane_mask)` for every batch of patterns.
fn for_each_batch(
    inputs: usize,
    source: VectorSource,
    mut f: impl FnMut(&[u64], u64),
) -> Result<u64, FaultSimError> {
    let mut words = vec![0u64; inputs];
    match source {
        VectorSource::Exhaustive => {
            if inputs > EXHAUSTIVE_LIMIT {
                return Err(FaultSimError::ExhaustiveLimitExceeded { inputs });
            }
            let total = 1u64 << inputs;
            for batch in 0..total.div_ceil(64) {
                exhaustive_words(inputs, batch, &mut words);
                f(&words, lane_mask(total - batch * 64));
            }
            Ok(total)
        }
        VectorSource::Sampled { seed, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut done = 0;
            while done < count {
                for w in words.iter_mut() {
                    *w = rng.next_u64();
                }
                f(&words, lane_mask(count - done));
                done += 64.min(count - done);
            }
            Ok(count)
        }
    }
}

fn check_nets<'n>(netlist: &Netlist, nets: impl IntoIterator<Item = &'n NetId>) -> Result<(), FaultSimError> {
    for n in nets {
        if n.index() >= netlist.net_count() {
            return Err(FaultSimError::UnknownNet(alloc::format!("#{}", n.0)));
        }
    }
    Ok(())
}

/// Fault-free simulation; returns one value per net, indexed by [`NetId`].
pub fn simulate(netlist: &Netlist, vector: &SimVector) -> Result<Vec<bool>, FaultSimError> {
    simulate_with_faults(netlist, vector, &[])
}

/// Simulation with every site in `faults` active at once; when two sites share
/// a net the later one wins.
pub fn simulate_with_faults(
    netlist: &Netlist,
    vector: &SimVector,
    faults: &[FaultSite],
) -> Result<Vec<bool>, FaultSimError> {
    check_nets(netlist, faults.iter().map(|f| &f.net))?;
    let inputs = netlist.pseudo_inputs();
    let words = inputs
        .iter()
        .map(|n| match vector.assignment.get(n) {
            Some(&b) => Ok(if b { !0 } else { 0 }),
            None => Err(FaultSimError::IncompleteVector(netlist.net_name(*n).into())),
        })
        .collect::<Result<Vec<u64>, _>>()?;
    let mut values = vec![0u64; netlist.net_count()];
    Engine::new(netlist, inputs).eval(&words, faults, &mut values);
    Ok(values.into_iter().map(|w| w & 1 == 1).collect())
}

/// Single-fault campaign: a site is affecting iff some vector makes a
/// monitored net differ from the fault-free run.
pub fn fault_campaign(
    netlist: &Netlist,
    monitored: &NetSet,
    sites: &[FaultSite],
    source: VectorSource,
) -> Result<CampaignResult, FaultSimError> {
    check_nets(netlist, monitored)?;
    check_nets(netlist, sites.iter().map(|f| &f.net))?;
    let inputs = netlist.pseudo_inputs();
    let engine = Engine::new(netlist, inputs.clone());
    let mut good = vec![0u64; netlist.net_count()];
    let mut bad = vec![0u64; netlist.net_count()];
    let mut affecting = BTreeSet::new();
    let evaluated = for_each_batch(inputs.len(), source, |words, mask| {
        engine.eval(words, &[], &mut good);
        for site in sites {
            if affecting.contains(site) {
                continue;
            }
            engine.eval(words, core::slice::from_ref(site), &mut bad);
            if monitored.iter().any(|m| (good[m.index()] ^ bad[m.index()]) & mask != 0) {
                affecting.insert(*site);
            }
        }
    })?;
    Ok(CampaignResult {
        affecting_sites: affecting,
        toggleable_nets: NetSet::new(),
        vectors_evaluated: evaluated,
        seed: source.seed(),
    })
}

/// True when activating all `sites` together changes a monitored net under some vector.
pub fn joint_fault_detected(
    netlist: &Netlist,
    monitored: &NetSet,
    sites: &[FaultSite],
    source: VectorSource,
) -> Result<bool, FaultSimError> {
    check_nets(netlist, monitored)?;
    check_nets(netlist, sites.iter().map(|f| &f.net))?;
    let inputs = netlist.pseudo_inputs();
    let engine = Engine::new(netlist, inputs.clone());
    let mut good = vec![0u64; netlist.net_count()];
    let mut bad = vec![0u64; netlist.net_count()];
    let mut detected = false;
    for_each_batch(inputs.len(), source, |words, mask| {
        if detected {
            return;
        }
        engine.eval(words, &[], &mut good);
        engine.eval(words, sites, &mut bad);
        detected = monitored.iter().any(|m| (good[m.index()] ^ bad[m.index()]) & mask != 0);
    })?;
    Ok(detected)
}

/// A net is toggleable iff two vectors that agree on every non-attack input
/// give it different values.
pub fn attack_toggle_campaign(
    netlist: &Netlist,
    attack_inputs: &NetSet,
    source: VectorSource,
) -> Result<CampaignResult, FaultSimError> {
    check_nets(netlist, attack_inputs)?;
    if let Some(bad) = attack_inputs.iter().find(|n| !netlist.is_pseudo_input(**n)) {
        return Err(FaultSimError::NotPseudoInput(netlist.net_name(*bad).into()));
    }
    // Attack inputs take the low pattern bits so each run of 2^k vectors
    // shares one assignment of the remaining inputs.
    let mut inputs: Vec<NetId> = attack_inputs.iter().copied().collect();
    inputs.extend(netlist.pseudo_inputs().into_iter().filter(|n| !attack_inputs.contains(*n)));
    let k = attack_inputs.len();
    let n_nets = netlist.net_count();
    let engine = Engine::new(netlist, inputs.clone());
    let mut toggle = vec![false; n_nets];
    let mut values = vec![0u64; n_nets];

    let evaluated = match source {
        VectorSource::Exhaustive => {
            if inputs.len() > EXHAUSTIVE_LIMIT {
                return Err(FaultSimError::ExhaustiveLimitExceeded { inputs: inputs.len() });
            }
            let group = 1u64 << k;
            let mut seen0 = vec![false; n_nets];
            let mut seen1 = vec![false; n_nets];
            let mut start = 0u64;
            for_each_batch(inputs.len(), VectorSource::Exhaustive, |words, mask| {
                engine.eval(words, &[], &mut values);
                let lanes = mask.count_ones() as u64;
                if group >= 64 {
                    for (net, &v) in values.iter().enumerate() {
                        seen1[net] |= v & mask != 0;
                        seen0[net] |= v & mask != mask;
                    }
                    if (start + lanes).is_multiple_of(group) {
                        for net in 0..n_nets {
                            toggle[net] |= seen0[net] && seen1[net];
                            seen0[net] = false;
                            seen1[net] = false;
                        }
                    }
                } else {
                    let group_mask = (1u64 << group) - 1;
                    for sub in 0..lanes / group {
                        let m = group_mask << (sub * group);
                        for (net, &v) in values.iter().enumerate() {
                            let part = v & m;
                            toggle[net] |= part != 0 && part != m;
                        }
                    }
                }
                start += lanes;
            })?
        }
        VectorSource::Sampled { seed, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut other = vec![0u64; n_nets];
            let mut a = vec![0u64; inputs.len()];
            let mut done = 0;
            while done < count {
                for w in a.iter_mut() {
                    *w = rng.next_u64();
                }
                let mut b = a.clone();
                for w in b.iter_mut().take(k) {
                    *w = rng.next_u64();
                }
                let mask = lane_mask(count - done);
                engine.eval(&a, &[], &mut values);
                engine.eval(&b, &[], &mut other);
                for net in 0..n_nets {
                    toggle[net] |= (values[net] ^ other[net]) & mask != 0;
                }
                done += 64.min(count - done);
            }
            2 * count
        }
    };

    Ok(CampaignResult {
        affecting_sites: BTreeSet::new(),
        toggleable_nets: toggle
            .iter()
            .enumerate()
            .filter(|(_, &t)| t)
            .map(|(i, _)| NetId(i as u32))
            .collect(),
        vectors_evaluated: evaluated,
        seed: source.seed(),
    })
}
