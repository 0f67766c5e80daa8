//! FMEA/TARA worksheet model: risk items, countermeasures and which measures
//! apply to which modes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::netlist::{is_valid_net_name, Netlist};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RiskError {
    #[error("rating {value} for {field} of `{id}` is outside 1..=10")]
    RatingOutOfRange { id: String, field: &'static str, value: i64 },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("applicability pair ({item}, {measure}) references unknown id `{missing}`")]
    DanglingReference { item: String, measure: String, missing: String },
    #[error("duplicate applicability pair ({0}, {1})")]
    DuplicatePair(String, String),
    #[error("empty effect group for `{0}`")]
    EmptyEffectGroup(String),
    #[error("empty id")]
    EmptyId,
    #[error("invalid net name `{0}`")]
    InvalidNetName(String),
}

/// An ordinal 1..=10 rating on the classical FMEA scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rating(u8);

impl Rating {
    pub const MIN: Rating = Rating(1);
    pub const MAX: Rating = Rating(10);

    pub fn new(value: i64) -> Option<Rating> {
        (1..=10).contains(&value).then_some(Rating(value as u8))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl fmt::Display for Rating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ItemKind {
    FailureMode,
    ThreatMode,
}

impl ItemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ItemKind::FailureMode => "FailureMode",
            ItemKind::ThreatMode => "ThreatMode",
        }
    }

    pub fn parse(s: &str) -> Option<ItemKind> {
        match s {
            "FailureMode" => Some(ItemKind::FailureMode),
            "ThreatMode" => Some(ItemKind::ThreatMode),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeasureKind {
    Prevention,
    Detection,
}

impl MeasureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::Prevention => "Prevention",
            MeasureKind::Detection => "Detection",
        }
    }

    pub fn parse(s: &str) -> Option<MeasureKind> {
        match s {
            "Prevention" => Some(MeasureKind::Prevention),
            "Detection" => Some(MeasureKind::Detection),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Domain {
    Safety,
    Security,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Safety => "Safety",
            Domain::Security => "Security",
        }
    }

    pub fn parse(s: &str) -> Option<Domain> {
        match s {
            "Safety" => Some(Domain::Safety),
            "Security" => Some(Domain::Security),
            _ => None,
        }
    }
}

/// A failure mode or threat mode row with its S/O/D ratings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiskItem {
    pub id: String,
    pub kind: ItemKind,
    pub description: String,
    /// Label of the adverse effect shared by the modes grouped under it.
    pub effect_group: String,
    pub severity: Rating,
    pub occurrence: Rating,
    pub detection: Rating,
}

/// Netlist locations a countermeasure or risk item is tied to.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NetAnchors {
    /// Where the failure or threat effect appears.
    pub effect_nets: Vec<String>,
    /// Detection or alarm outputs.
    pub alarm_nets: Vec<String>,
    /// Attacker-controllable entry points.
    pub attack_input_nets: Vec<String>,
}

impl NetAnchors {
    /// Builds anchors, checking every name is a syntactically valid net identifier.
    pub fn new(
        effect_nets: Vec<String>,
        alarm_nets: Vec<String>,
        attack_input_nets: Vec<String>,
    ) -> Result<NetAnchors, RiskError> {
        let anchors = NetAnchors { effect_nets, alarm_nets, attack_input_nets };
        if let Some(bad) = anchors.all_nets().find(|n| !is_valid_net_name(n)) {
            return Err(RiskError::InvalidNetName(bad.into()));
        }
        Ok(anchors)
    }

    pub fn is_empty(&self) -> bool {
        self.effect_nets.is_empty() && self.alarm_nets.is_empty() && self.attack_input_nets.is_empty()
    }

    pub fn all_nets(&self) -> impl Iterator<Item = &str> {
        self.effect_nets
            .iter()
            .chain(&self.alarm_nets)
            .chain(&self.attack_input_nets)
            .map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Countermeasure {
    pub id: String,
    pub kind: MeasureKind,
    pub domain: Domain,
    pub description: String,
    pub anchors: Option<NetAnchors>,
}

/// A net name referenced by an anchor that the netlist does not define.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AnchorError {
    /// Measure (or item) that owns the anchor.
    pub owner_id: String,
    pub missing_net: String,
}

impl fmt::Display for AnchorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}` anchors unknown net `{}`", self.owner_id, self.missing_net)
    }
}

/// Validated container of risk items, measures and applicability pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Worksheet {
    items: Vec<RiskItem>,
    measures: Vec<Countermeasure>,
    applicability: Vec<(String, String)>,
    item_index: BTreeMap<String, usize>,
    measure_index: BTreeMap<String, usize>,
}

impl Worksheet {
    pub fn new(
        items: Vec<RiskItem>,
        measures: Vec<Countermeasure>,
        applicability: Vec<(String, String)>,
    ) -> Result<Worksheet, RiskError> {
        let mut item_index = BTreeMap::new();
        for (i, item) in items.iter().enumerate() {
            if item.id.is_empty() {
                return Err(RiskError::EmptyId);
            }
            if item.effect_group.is_empty() {
                return Err(RiskError::EmptyEffectGroup(item.id.clone()));
            }
            if item_index.insert(item.id.clone(), i).is_some() {
                return Err(RiskError::DuplicateId(item.id.clone()));
            }
        }
        let mut measure_index = BTreeMap::new();
        for (i, m) in measures.iter().enumerate() {
            if m.id.is_empty() {
                return Err(RiskError::EmptyId);
            }
            if measure_index.insert(m.id.clone(), i).is_some() {
                return Err(RiskError::DuplicateId(m.id.clone()));
            }
            if let Some(a) = &m.anchors {
                if let Some(bad) = a.all_nets().find(|n| !is_valid_net_name(n)) {
                    return Err(RiskError::InvalidNetName(bad.into()));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for (item, measure) in &applicability {
            let dangling = |missing: &String| RiskError::DanglingReference {
                item: item.clone(),
                measure: measure.clone(),
                missing: missing.clone(),
            };
            if !item_index.contains_key(item) {
                return Err(dangling(item));
            }
            if !measure_index.contains_key(measure) {
                return Err(dangling(measure));
            }
            if !seen.insert((item, measure)) {
                return Err(RiskError::DuplicatePair(item.clone(), measure.clone()));
            }
        }
        Ok(Worksheet { items, measures, applicability, item_index, measure_index })
    }

    pub fn items(&self) -> &[RiskItem] {
        &self.items
    }

    pub fn measures(&self) -> &[Countermeasure] {
        &self.measures
    }

    pub fn applicability(&self) -> &[(String, String)] {
        &self.applicability
    }

    pub fn item(&self, id: &str) -> Option<&RiskItem> {
        self.item_index.get(id).map(|&i| &self.items[i])
    }

    pub fn measure(&self, id: &str) -> Option<&Countermeasure> {
        self.measure_index.get(id).map(|&i| &self.measures[i])
    }

    pub fn applies(&self, item_id: &str, measure_id: &str) -> bool {
        self.applicability.iter().any(|(i, m)| i == item_id && m == measure_id)
    }

    /// Checks every measure anchor against `netlist`; an empty result means all resolve.
    pub fn validate_anchors(&self, netlist: &Netlist) -> Vec<AnchorError> {
        validate_anchors(
            self.measures.iter().filter_map(|m| m.anchors.as_ref().map(|a| (m.id.as_str(), a))),
            netlist,
        )
    }
}

/// Resolves each `(owner, anchors)` pair against `netlist`, reporting missing names.
pub fn validate_anchors<'a>(
    anchors: impl IntoIterator<Item = (&'a str, &'a NetAnchors)>,
    netlist: &Netlist,
) -> Vec<AnchorError> {
    let mut errors = Vec::new();
    for (owner, a) in anchors {
        for net in a.all_nets() {
            if netlist.net_id(net).is_none() {
                let e = AnchorError { owner_id: owner.into(), missing_net: net.into() };
                if !errors.contains(&e) {
                    errors.push(e);
                }
            }
        }
    }
    errors
}
