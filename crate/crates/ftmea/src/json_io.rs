//! JSON forms of CDCF bundles, derivation evidence and the risk matrix.
//!
//! Numbers are read from their literal text so scientific notation can be
//! rejected, and written with a fixed number of decimals.

use std::collections::BTreeMap;

use ftmea_core::correlation::{Entry, Table};
use ftmea_core::structural::Evidence;
use ftmea_core::{CdcfBundle, RawCdcf, RiskMatrixConfig, Worksheet};
use serde_json::{Map, Number, Value};

use crate::error::FormatError;

const TABLES: [Table; 3] = [Table::CommonEffect, Table::Prevention, Table::Detection];

/// `v` with exactly `places` decimals; negative zero prints as zero.
pub fn decimal_text(v: f64, places: usize) -> String {
    let mut s = format!("{v:.places$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s.remove(0);
    }
    s
}

/// `v` as a JSON number with exactly `places` decimals.
pub fn fixed(v: f64, places: usize) -> Value {
    Value::Number(decimal_text(v, places).parse::<Number>().expect("formatted float is a JSON number"))
}

/// Pretty JSON with a trailing newline; object keys come out sorted.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("Value serialization cannot fail");
    s.push('\n');
    s
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, FormatError> {
    v.as_object().ok_or_else(|| FormatError::MalformedJson(format!("{path}: expected an object")))
}

fn decimal(v: &Value, path: &str) -> Result<f64, FormatError> {
    let n = v.as_number().ok_or_else(|| FormatError::MalformedJson(format!("{path}: expected a number")))?;
    let literal = n.to_string();
    if literal.contains(['e', 'E']) {
        return Err(FormatError::ScientificNotation { path: path.into(), literal });
    }
    n.as_f64().ok_or_else(|| FormatError::MalformedJson(format!("{path}: `{literal}` is not representable")))
}

fn parse_json(text: &str) -> Result<Value, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::MalformedJson(e.to_string()))
}

/// Reads the three coefficient tables without checking them against a worksheet.
pub fn parse_raw_cdcf(text: &str) -> Result<RawCdcf, FormatError> {
    let root = parse_json(text)?;
    let mut raw = RawCdcf::default();
    for (key, rows) in object(&root, "$")? {
        let target = match key.as_str() {
            "common_effect" => &mut raw.common_effect,
            "prevention" => &mut raw.prevention,
            "detection" => &mut raw.detection,
            other => return Err(FormatError::MalformedJson(format!("unknown key `{other}`"))),
        };
        for (row, cols) in object(rows, key)? {
            let path = format!("{key}.{row}");
            let out = target.entry(row.clone()).or_default();
            for (col, v) in object(cols, &path)? {
                out.insert(col.clone(), decimal(v, &format!("{path}.{col}"))?);
            }
        }
    }
    Ok(raw)
}

/// Parses a CDCF file and validates every entry against `worksheet`.
pub fn load_cdcf(text: &str, worksheet: &Worksheet) -> Result<CdcfBundle, FormatError> {
    Ok(CdcfBundle::from_config(&parse_raw_cdcf(text)?, worksheet)?)
}

fn tables<T>(bundle: &CdcfBundle, leaf: impl Fn(&Entry) -> T) -> Value
where
    Value: From<T>,
{
    let mut root = Map::new();
    for table in TABLES {
        let entries: Vec<(&str, &str, &Entry)> = match table {
            Table::CommonEffect => bundle.common_effect().iter().collect(),
            Table::Prevention => bundle.prevention().iter().collect(),
            Table::Detection => bundle.detection().iter().collect(),
        };
        let mut rows: BTreeMap<&str, Map<String, Value>> = BTreeMap::new();
        for (row, col, e) in entries {
            rows.entry(row).or_default().insert(col.into(), Value::from(leaf(e)));
        }
        root.insert(table.name().into(), Value::Object(rows.into_iter().map(|(k, v)| (k.into(), v.into())).collect()));
    }
    Value::Object(root)
}

/// Bare coefficients in the same layout [`load_cdcf`] reads.
pub fn render_cdcf(bundle: &CdcfBundle) -> String {
    to_text(&tables(bundle, |e| fixed(e.value, 4)))
}

/// Coefficients with provenance, rationale and any superseded derived value.
pub fn render_effective(bundle: &CdcfBundle) -> String {
    to_text(&tables(bundle, |e| {
        let mut m = Map::new();
        m.insert("value".into(), fixed(e.value, 4));
        m.insert("provenance".into(), e.provenance.as_str().into());
        m.insert("rationale".into(), e.rationale.clone().map_or(Value::Null, Value::from));
        m.insert("superseded_derived".into(), e.superseded_derived.map_or(Value::Null, |v| fixed(v, 4)));
        Value::Object(m)
    }))
}

/// Evidence per derived entry; keys that do not apply to the entry's kind are left out.
pub fn render_evidence(evidence: &BTreeMap<(Table, String, String), Evidence>) -> String {
    let mut root: BTreeMap<&str, BTreeMap<&str, Map<String, Value>>> =
        TABLES.iter().map(|t| (t.name(), BTreeMap::new())).collect();
    for ((table, row, col), ev) in evidence {
        let mut m = Map::new();
        m.insert("coi_size".into(), ev.coi_size.into());
        if let Some(o) = ev.overlap_size {
            m.insert("overlap_size".into(), o.into());
        }
        if let Some(w) = ev.mean_cc_with {
            m.insert("mean_cc_with".into(), fixed(w, 4));
        }
        if let Some(w) = ev.mean_cc_without {
            m.insert("mean_cc_without".into(), fixed(w, 4));
        }
        root.entry(table.name()).or_default().entry(row).or_default().insert(col.clone(), m.into());
    }
    let v: Map<String, Value> = root
        .into_iter()
        .map(|(t, rows)| (t.into(), Value::Object(rows.into_iter().map(|(r, c)| (r.into(), c.into())).collect())))
        .collect();
    to_text(&v.into())
}

fn labels(v: &Value, key: &str) -> Result<Vec<String>, FormatError> {
    v.as_array()
        .ok_or_else(|| FormatError::MalformedJson(format!("{key}: expected an array")))?
        .iter()
        .map(|l| l.as_str().map(String::from).ok_or_else(|| FormatError::MalformedJson(format!("{key}: expected strings"))))
        .collect()
}

/// `{"occurrence_classes": [..], "feasibility_classes": [..], "cells": [[..], ..]}`
pub fn load_risk_matrix(text: &str) -> Result<RiskMatrixConfig, FormatError> {
    let root = parse_json(text)?;
    let obj = object(&root, "$")?;
    if let Some(k) = obj.keys().find(|k| !["occurrence_classes", "feasibility_classes", "cells"].contains(&k.as_str())) {
        return Err(FormatError::MalformedJson(format!("unknown key `{k}`")));
    }
    let get = |k: &str| obj.get(k).ok_or_else(|| FormatError::MalformedJson(format!("missing key `{k}`")));
    let occ = labels(get("occurrence_classes")?, "occurrence_classes")?;
    let feas = labels(get("feasibility_classes")?, "feasibility_classes")?;
    let bad_cells = || FormatError::MalformedJson("cells: expected an array of integer arrays".into());
    let cells = get("cells")?
        .as_array()
        .ok_or_else(bad_cells)?
        .iter()
        .map(|row| row.as_array().ok_or_else(bad_cells)?.iter().map(|c| c.as_i64().ok_or_else(bad_cells)).collect())
        .collect::<Result<Vec<Vec<i64>>, _>>()?;
    Ok(RiskMatrixConfig::new(occ, feas, cells)?)
}

pub fn risk_matrix_value(cfg: &RiskMatrixConfig) -> Value {
    let mut m = Map::new();
    m.insert("occurrence_classes".into(), cfg.occurrence_classes().into());
    m.insert("feasibility_classes".into(), cfg.feasibility_classes().into());
    m.insert(
        "cells".into(),
        cfg.cells().iter().map(|r| r.iter().map(|c| Value::from(c.get())).collect::<Vec<_>>()).collect::<Vec<_>>().into(),
    );
    Value::Object(m)
}
