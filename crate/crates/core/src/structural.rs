//! Structural derivation of CDCFs from a netlist.
//!
//! - common effect: share of the effect cone's nets reachable from attack inputs;
//! - detection: share of the effect cone's nets inside the alarm cone;
//! - prevention: relative change of mean SCOAP controllability over the effect
//!   cone between the design without and with the measure.
//!
//! Overlaps are normalised by the effect cone size and counted over nets.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::correlation::{CdcfBundle, CdcfError, Entry, Table};
use crate::netlist::{NetSet, Netlist, NetlistError};
use crate::risk::{validate_anchors, AnchorError, ItemKind, MeasureKind, NetAnchors, Worksheet};
use crate::scoap::{compute_scoap, ScoapError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StructuralError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Scoap(#[from] ScoapError),
    #[error("empty {0} net set")]
    EmptyNetSet(&'static str),
    #[error(transparent)]
    Cdcf(#[from] CdcfError),
    #[error("deriving {table} ({row}, {col}): {source}")]
    Pair {
        table: &'static str,
        row: String,
        col: String,
        #[source]
        source: Box<StructuralError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CdcfKind {
    CommonEffect,
    PreventionInfluence,
    DetectionInfluence,
}

/// Set sizes and score means behind a derived coefficient.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Evidence {
    pub coi_size: usize,
    pub overlap_size: Option<usize>,
    pub mean_cc_with: Option<f64>,
    pub mean_cc_without: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivedCdcf {
    pub value: f64,
    pub kind: CdcfKind,
    pub evidence: Evidence,
}

fn effect_cone<S: AsRef<str>>(netlist: &Netlist, effect_nets: &[S]) -> Result<NetSet, StructuralError> {
    if effect_nets.is_empty() {
        return Err(StructuralError::EmptyNetSet("effect"));
    }
    Ok(netlist.fanin_cone_of(effect_nets.iter().map(AsRef::as_ref))?)
}

fn overlap(kind: CdcfKind, coi: &NetSet, other: &NetSet) -> DerivedCdcf {
    let shared = coi.intersection_len(other);
    DerivedCdcf {
        value: shared as f64 / coi.len() as f64,
        kind,
        evidence: Evidence { coi_size: coi.len(), overlap_size: Some(shared), ..Evidence::default() },
    }
}

/// `|fanin(effect) ∩ fanout(attack)| / |fanin(effect)|`
pub fn common_effect_cdcf<S: AsRef<str>, T: AsRef<str>>(
    netlist: &Netlist,
    effect_nets: &[S],
    attack_inputs: &[T],
) -> Result<DerivedCdcf, StructuralError> {
    let coi = effect_cone(netlist, effect_nets)?;
    let ctrl = netlist.fanout_cone_of(attack_inputs.iter().map(AsRef::as_ref))?;
    Ok(overlap(CdcfKind::CommonEffect, &coi, &ctrl))
}

/// `|fanin(alarm) ∩ fanin(effect)| / |fanin(effect)|`
pub fn detection_cdcf<S: AsRef<str>, T: AsRef<str>>(
    netlist: &Netlist,
    alarm_nets: &[S],
    effect_nets: &[T],
) -> Result<DerivedCdcf, StructuralError> {
    let coi = effect_cone(netlist, effect_nets)?;
    let obs = netlist.fanin_cone_of(alarm_nets.iter().map(AsRef::as_ref))?;
    Ok(overlap(CdcfKind::DetectionInfluence, &coi, &obs))
}

/// `clamp((M_with - M_without) / max(M_with, M_without), -1, 1)`, where each
/// `M` is the mean `cc0 + cc1` over the effect cone in its own netlist.
/// Positive when the measure makes the effect logic harder to control.
pub fn prevention_cdcf<S: AsRef<str>>(
    baseline: &Netlist,
    with_measure: &Netlist,
    effect_nets: &[S],
) -> Result<DerivedCdcf, StructuralError> {
    let coi_with = effect_cone(with_measure, effect_nets)?;
    let coi_without = effect_cone(baseline, effect_nets)?;
    let m_with = compute_scoap(with_measure)?.mean_controllability(&coi_with)?;
    let m_without = compute_scoap(baseline)?.mean_controllability(&coi_without)?;
    let value = ((m_with - m_without) / m_with.max(m_without)).clamp(-1.0, 1.0);
    Ok(DerivedCdcf {
        value,
        kind: CdcfKind::PreventionInfluence,
        evidence: Evidence {
            coi_size: coi_with.len(),
            overlap_size: None,
            mean_cc_with: Some(m_with),
            mean_cc_without: Some(m_without),
        },
    })
}

/// Inputs for deriving a bundle from structure.
#[derive(Debug, Clone)]
pub struct DerivationRequest<'a> {
    /// The design as built, measures included.
    pub netlist: &'a Netlist,
    /// The same design without the anchored prevention measures.
    pub variant_netlist: Option<&'a Netlist>,
    pub item_anchors: BTreeMap<String, NetAnchors>,
    pub measure_anchors: BTreeMap<String, NetAnchors>,
}

impl<'a> DerivationRequest<'a> {
    /// Request with measure anchors taken from the worksheet.
    pub fn new(netlist: &'a Netlist, worksheet: &Worksheet) -> DerivationRequest<'a> {
        let measure_anchors = worksheet
            .measures()
            .iter()
            .filter_map(|m| m.anchors.clone().map(|a| (m.id.clone(), a)))
            .collect();
        DerivationRequest { netlist, variant_netlist: None, item_anchors: BTreeMap::new(), measure_anchors }
    }

    pub fn with_variant(mut self, variant: &'a Netlist) -> Self {
        self.variant_netlist = Some(variant);
        self
    }

    pub fn with_item_anchors(mut self, anchors: BTreeMap<String, NetAnchors>) -> Self {
        self.item_anchors = anchors;
        self
    }

    /// Anchors that do not resolve in the primary netlist.
    pub fn validate(&self) -> Vec<AnchorError> {
        let anchors = self
            .item_anchors
            .iter()
            .chain(&self.measure_anchors)
            .map(|(id, a)| (id.as_str(), a));
        validate_anchors(anchors, self.netlist)
    }
}

/// Derived bundle plus the evidence for each entry, keyed by `(table, row, col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub bundle: CdcfBundle,
    pub evidence: BTreeMap<(Table, String, String), Evidence>,
}

fn with_context(table: Table, row: &str, col: &str) -> impl FnOnce(StructuralError) -> StructuralError {
    let (row, col) = (String::from(row), String::from(col));
    move |e| StructuralError::Pair { table: table.name(), row, col, source: Box::new(e) }
}

fn rationale(d: &DerivedCdcf) -> String {
    match (d.evidence.overlap_size, d.evidence.mean_cc_with, d.evidence.mean_cc_without) {
        (Some(shared), _, _) => format!("structural overlap {shared}/{} nets", d.evidence.coi_size),
        (None, Some(with), Some(without)) => {
            format!("mean controllability {with:.4} with measure vs {without:.4} without")
        }
        _ => String::from("structural"),
    }
}

/// Derives an entry for every anchored pair; pairs without enough anchors are
/// skipped and stay absent.
pub fn derive_bundle(request: &DerivationRequest<'_>, worksheet: &Worksheet) -> Result<Derivation, StructuralError> {
    let mut out = Derivation { bundle: CdcfBundle::empty(worksheet), evidence: BTreeMap::new() };
    let no_anchors = NetAnchors::default();
    let item_anchors = |id: &str| request.item_anchors.get(id).unwrap_or(&no_anchors);
    let mut record = |table: Table, row: &str, col: &str, d: DerivedCdcf| -> Result<(), StructuralError> {
        out.bundle
            .insert(table, row, col, Entry::derived(d.value, rationale(&d)))
            .map_err(|e| with_context(table, row, col)(e.into()))?;
        out.evidence.insert((table, row.into(), col.into()), d.evidence);
        Ok(())
    };

    let mut pairs: Vec<&(String, String)> = worksheet.applicability().iter().collect();
    pairs.sort();
    for (item_id, measure_id) in pairs {
        let Some(measure) = worksheet.measure(measure_id) else { continue };
        let Some(m_anchors) = request.measure_anchors.get(measure_id).filter(|a| !a.is_empty()) else {
            continue;
        };
        let own = item_anchors(item_id);
        let effect = if own.effect_nets.is_empty() { &m_anchors.effect_nets } else { &own.effect_nets };
        if effect.is_empty() {
            continue;
        }
        match measure.kind {
            MeasureKind::Detection if !m_anchors.alarm_nets.is_empty() => {
                let table = Table::Detection;
                let d = detection_cdcf(request.netlist, &m_anchors.alarm_nets, effect)
                    .map_err(with_context(table, item_id, measure_id))?;
                record(table, item_id, measure_id, d)?;
            }
            MeasureKind::Prevention => {
                if let Some(baseline) = request.variant_netlist {
                    let table = Table::Prevention;
                    let d = prevention_cdcf(baseline, request.netlist, effect)
                        .map_err(with_context(table, item_id, measure_id))?;
                    record(table, item_id, measure_id, d)?;
                }
            }
            MeasureKind::Detection => {}
        }
    }

    let modes = |kind: ItemKind| worksheet.items().iter().filter(move |i| i.kind == kind);
    let mut common = Vec::new();
    for fm in modes(ItemKind::FailureMode) {
        for tm in modes(ItemKind::ThreatMode).filter(|tm| tm.effect_group == fm.effect_group) {
            common.push((fm.id.as_str(), tm.id.as_str()));
        }
    }
    common.sort();
    for (fm, tm) in common {
        let (fa, ta) = (item_anchors(fm), item_anchors(tm));
        let mut effect: Vec<&str> = fa.effect_nets.iter().chain(&ta.effect_nets).map(String::as_str).collect();
        effect.sort();
        effect.dedup();
        if effect.is_empty() || ta.attack_input_nets.is_empty() {
            continue;
        }
        let table = Table::CommonEffect;
        let d = common_effect_cdcf(request.netlist, &effect, &ta.attack_input_nets)
            .map_err(with_context(table, fm, tm))?;
        record(table, fm, tm, d)?;
    }
    Ok(out)
}
