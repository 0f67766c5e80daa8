//! Cross-domain correlation factor (CDCF) matrices.
//!
//! Three sparse tables: common-effect correlations between failure modes and
//! threat modes (`[0, 1]`), plus signed prevention and detection influences of
//! measures on modes (`[-1, 1]`). Absent entries mean zero.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;

use crate::risk::{ItemKind, MeasureKind, Worksheet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CdcfError {
    #[error("{matrix} coefficient ({row}, {col}) = {value} is outside [{min}, {max}]")]
    CoefficientOutOfRange { matrix: &'static str, row: String, col: String, value: f64, min: f64, max: f64 },
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("{matrix} entry ({row}, {col}): {reason}")]
    WrongKind { matrix: &'static str, row: String, col: String, reason: String },
    #[error("{matrix} entry ({item}, {measure}) is not in the applicability list")]
    NotApplicable { matrix: &'static str, item: String, measure: String },
    #[error("bundles were built against different worksheets")]
    InconsistentWorksheet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Configured,
    Derived,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Configured => "configured",
            Provenance::Derived => "derived",
        }
    }
}

/// One coefficient with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: f64,
    pub provenance: Provenance,
    pub rationale: Option<String>,
    /// Derived value that a configured entry replaced during a merge.
    pub superseded_derived: Option<f64>,
}

impl Entry {
    pub fn configured(value: f64) -> Entry {
        Entry { value, provenance: Provenance::Configured, rationale: None, superseded_derived: None }
    }

    pub fn derived(value: f64, rationale: impl Into<String>) -> Entry {
        Entry { value, provenance: Provenance::Derived, rationale: Some(rationale.into()), superseded_derived: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InfluenceKind {
    PreventionInfluence,
    DetectionInfluence,
}

impl InfluenceKind {
    pub fn measure_kind(self) -> MeasureKind {
        match self {
            InfluenceKind::PreventionInfluence => MeasureKind::Prevention,
            InfluenceKind::DetectionInfluence => MeasureKind::Detection,
        }
    }
}

type Rows = BTreeMap<String, BTreeMap<String, Entry>>;

/// Failure mode x threat mode correlations in `[0, 1]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommonEffectMatrix {
    entries: Rows,
}

impl CommonEffectMatrix {
    pub fn get(&self, fm_id: &str, tm_id: &str) -> Option<&Entry> {
        self.entries.get(fm_id)?.get(tm_id)
    }

    pub fn rows(&self) -> &BTreeMap<String, BTreeMap<String, Entry>> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &Entry)> {
        iter_rows(&self.entries)
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Mode x measure influence coefficients `C_ij` in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceMatrix {
    kind: InfluenceKind,
    entries: Rows,
}

impl InfluenceMatrix {
    pub fn new(kind: InfluenceKind) -> InfluenceMatrix {
        InfluenceMatrix { kind, entries: Rows::new() }
    }

    pub fn kind(&self) -> InfluenceKind {
        self.kind
    }

    pub fn get(&self, item_id: &str, measure_id: &str) -> Option<&Entry> {
        self.entries.get(item_id)?.get(measure_id)
    }

    pub fn row(&self, item_id: &str) -> Option<&BTreeMap<String, Entry>> {
        self.entries.get(item_id)
    }

    pub fn rows(&self) -> &BTreeMap<String, BTreeMap<String, Entry>> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &Entry)> {
        iter_rows(&self.entries)
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `sum_j C_ij` over the measures with an entry in row `item_id`; 0 for an empty row.
    pub fn row_sum(&self, item_id: &str) -> f64 {
        self.entries.get(item_id).map_or(0.0, |row| row.values().map(|e| e.value).sum())
    }
}

fn iter_rows(rows: &Rows) -> impl Iterator<Item = (&str, &str, &Entry)> {
    rows.iter()
        .flat_map(|(r, cols)| cols.iter().map(move |(c, e)| (r.as_str(), c.as_str(), e)))
}

/// Plain nested `row -> column -> coefficient` tables as read from a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawCdcf {
    pub common_effect: BTreeMap<String, BTreeMap<String, f64>>,
    pub prevention: BTreeMap<String, BTreeMap<String, f64>>,
    pub detection: BTreeMap<String, BTreeMap<String, f64>>,
}

/// Which of the three bundle tables an entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Table {
    CommonEffect,
    Prevention,
    Detection,
}

impl Table {
    pub fn name(self) -> &'static str {
        match self {
            Table::CommonEffect => "common_effect",
            Table::Prevention => "prevention",
            Table::Detection => "detection",
        }
    }
}

/// Id universe a bundle was validated against.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Scope {
    items: BTreeMap<String, ItemKind>,
    measures: BTreeMap<String, MeasureKind>,
    applicability: BTreeSet<(String, String)>,
}

impl Scope {
    fn of(ws: &Worksheet) -> Scope {
        Scope {
            items: ws.items().iter().map(|i| (i.id.clone(), i.kind)).collect(),
            measures: ws.measures().iter().map(|m| (m.id.clone(), m.kind)).collect(),
            applicability: ws.applicability().iter().cloned().collect(),
        }
    }
}

/// The full set of factors for one worksheet.
#[derive(Debug, Clone, PartialEq)]
pub struct CdcfBundle {
    common_effect: CommonEffectMatrix,
    prevention: InfluenceMatrix,
    detection: InfluenceMatrix,
    scope: Scope,
}

impl CdcfBundle {
    /// A bundle with no entries; every row sum is zero.
    pub fn empty(worksheet: &Worksheet) -> CdcfBundle {
        CdcfBundle {
            common_effect: CommonEffectMatrix::default(),
            prevention: InfluenceMatrix::new(InfluenceKind::PreventionInfluence),
            detection: InfluenceMatrix::new(InfluenceKind::DetectionInfluence),
            scope: Scope::of(worksheet),
        }
    }

    /// Validates `raw` against `worksheet`; every entry is marked configured.
    pub fn from_config(raw: &RawCdcf, worksheet: &Worksheet) -> Result<CdcfBundle, CdcfError> {
        let mut bundle = CdcfBundle::empty(worksheet);
        let tables = [
            (Table::CommonEffect, &raw.common_effect),
            (Table::Prevention, &raw.prevention),
            (Table::Detection, &raw.detection),
        ];
        for (table, rows) in tables {
            for (row, cols) in rows {
                for (col, &value) in cols {
                    bundle.insert(table, row, col, Entry::configured(value))?;
                }
            }
        }
        Ok(bundle)
    }

    /// Validates and stores one entry, replacing any previous value at that key.
    pub fn insert(&mut self, table: Table, row: &str, col: &str, entry: Entry) -> Result<(), CdcfError> {
        self.check(table, row, col, entry.value)?;
        let rows = match table {
            Table::CommonEffect => &mut self.common_effect.entries,
            Table::Prevention => &mut self.prevention.entries,
            Table::Detection => &mut self.detection.entries,
        };
        rows.entry(row.into()).or_default().insert(col.into(), entry);
        Ok(())
    }

    fn check(&self, table: Table, row: &str, col: &str, value: f64) -> Result<(), CdcfError> {
        let name = table.name();
        let (min, max) = if table == Table::CommonEffect { (0.0, 1.0) } else { (-1.0, 1.0) };
        // NaN fails the range test.
        if !(min..=max).contains(&value) {
            return Err(CdcfError::CoefficientOutOfRange {
                matrix: name,
                row: row.into(),
                col: col.into(),
                value,
                min,
                max,
            });
        }
        let wrong = |reason: String| CdcfError::WrongKind { matrix: name, row: row.into(), col: col.into(), reason };
        let row_kind = *self.scope.items.get(row).ok_or_else(|| CdcfError::UnknownId(row.into()))?;
        match table {
            Table::CommonEffect => {
                let col_kind = *self.scope.items.get(col).ok_or_else(|| CdcfError::UnknownId(col.into()))?;
                if row_kind != ItemKind::FailureMode {
                    return Err(wrong(format!("`{row}` is not a failure mode")));
                }
                if col_kind != ItemKind::ThreatMode {
                    return Err(wrong(format!("`{col}` is not a threat mode")));
                }
            }
            Table::Prevention | Table::Detection => {
                let measure_kind = *self.scope.measures.get(col).ok_or_else(|| CdcfError::UnknownId(col.into()))?;
                let expected = if table == Table::Prevention { MeasureKind::Prevention } else { MeasureKind::Detection };
                if measure_kind != expected {
                    return Err(wrong(format!(
                        "`{col}` is a {} measure, not {}",
                        measure_kind.as_str(),
                        expected.as_str()
                    )));
                }
                if !self.scope.applicability.contains(&(String::from(row), String::from(col))) {
                    return Err(CdcfError::NotApplicable { matrix: name, item: row.into(), measure: col.into() });
                }
            }
        }
        Ok(())
    }

    pub fn common_effect(&self) -> &CommonEffectMatrix {
        &self.common_effect
    }

    pub fn prevention(&self) -> &InfluenceMatrix {
        &self.prevention
    }

    pub fn detection(&self) -> &InfluenceMatrix {
        &self.detection
    }

    pub fn influence(&self, kind: InfluenceKind) -> &InfluenceMatrix {
        match kind {
            InfluenceKind::PreventionInfluence => &self.prevention,
            InfluenceKind::DetectionInfluence => &self.detection,
        }
    }

    /// Row sum of the matching-kind matrix; unknown items are an error.
    pub fn row_sum(&self, kind: InfluenceKind, item_id: &str) -> Result<f64, CdcfError> {
        if !self.scope.items.contains_key(item_id) {
            return Err(CdcfError::UnknownId(item_id.into()));
        }
        Ok(self.influence(kind).row_sum(item_id))
    }

    pub fn is_empty(&self) -> bool {
        self.common_effect.is_empty() && self.prevention.is_empty() && self.detection.is_empty()
    }

    /// True when the bundle was validated against an equivalent worksheet.
    pub fn matches(&self, worksheet: &Worksheet) -> bool {
        self.scope == Scope::of(worksheet)
    }

    /// Union of `configured` and `derived`. On a key collision the configured
    /// entry is kept and the derived value is recorded on it.
    pub fn merge(configured: &CdcfBundle, derived: &CdcfBundle) -> Result<CdcfBundle, CdcfError> {
        if configured.scope != derived.scope {
            return Err(CdcfError::InconsistentWorksheet);
        }
        let mut out = configured.clone();
        merge_rows(&mut out.common_effect.entries, &derived.common_effect.entries);
        merge_rows(&mut out.prevention.entries, &derived.prevention.entries);
        merge_rows(&mut out.detection.entries, &derived.detection.entries);
        Ok(out)
    }
}

fn merge_rows(into: &mut Rows, from: &Rows) {
    for (row, cols) in from {
        let target = into.entry(row.clone()).or_default();
        for (col, entry) in cols {
            match target.get_mut(col) {
                None => {
                    target.insert(col.clone(), entry.clone());
                }
                Some(kept) => {
                    kept.superseded_derived = Some(entry.value);
                    let note = format!("derived value {:.4} superseded", entry.value);
                    kept.rationale = Some(match kept.rationale.take() {
                        Some(r) => format!("{r}; {note}"),
                        None => note,
                    });
                }
            }
        }
    }
}
