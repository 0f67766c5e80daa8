//! CSV forms of the worksheet: items, measures, applicability and item anchors.

use std::collections::BTreeMap;

use ftmea_core::{Countermeasure, Domain, ItemKind, MeasureKind, NetAnchors, Rating, RiskError, RiskItem, Worksheet};

use crate::error::FormatError;

pub const ITEMS_HEADER: [&str; 7] = ["id", "kind", "description", "effect_group", "S", "O", "D"];
pub const MEASURES_HEADER: [&str; 7] =
    ["id", "kind", "domain", "description", "effect_nets", "alarm_nets", "attack_input_nets"];
pub const APPLICABILITY_HEADER: [&str; 2] = ["item_id", "measure_id"];
pub const ITEM_ANCHORS_HEADER: [&str; 4] = ["item_id", "effect_nets", "alarm_nets", "attack_input_nets"];

fn malformed(line: u64, message: impl Into<String>) -> FormatError {
    FormatError::MalformedCsv { line, message: message.into() }
}

/// Data rows with their 1-based line numbers, after checking the header.
fn records(text: &str, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>, FormatError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let found = reader.headers().map_err(|e| malformed(1, e.to_string()))?.clone();
    let found: Vec<&str> = found.iter().map(str::trim).collect();
    if found != header {
        return Err(malformed(1, format!("expected header `{}`, found `{}`", header.join(","), found.join(","))));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            match e.kind() {
                csv::ErrorKind::UnequalLengths { len, expected_len, .. } => {
                    malformed(line, format!("expected {expected_len} columns, found {len}"))
                }
                _ => malformed(line, e.to_string()),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        out.push((line, record));
    }
    Ok(out)
}

fn rating(line: u64, id: &str, field: &'static str, text: &str) -> Result<Rating, FormatError> {
    let value: i64 = text
        .trim()
        .parse()
        .map_err(|_| malformed(line, format!("{field} of `{id}` must be an integer, found `{text}`")))?;
    Rating::new(value).ok_or(FormatError::Risk {
        line: Some(line),
        source: RiskError::RatingOutOfRange { id: id.into(), field, value },
    })
}

fn with_line(line: u64) -> impl Fn(RiskError) -> FormatError {
    move |source| FormatError::Risk { line: Some(line), source }
}

pub fn parse_items(text: &str) -> Result<Vec<RiskItem>, FormatError> {
    records(text, &ITEMS_HEADER)?
        .into_iter()
        .map(|(line, r)| {
            let id = r[0].trim().to_string();
            let kind = ItemKind::parse(r[1].trim())
                .ok_or_else(|| malformed(line, format!("unknown item kind `{}`", &r[1])))?;
            Ok(RiskItem {
                kind,
                description: r[2].to_string(),
                effect_group: r[3].trim().to_string(),
                severity: rating(line, &id, "S", &r[4])?,
                occurrence: rating(line, &id, "O", &r[5])?,
                detection: rating(line, &id, "D", &r[6])?,
                id,
            })
        })
        .collect()
}

fn net_list(line: u64, text: &str) -> Result<Vec<String>, FormatError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|n| {
            let n = n.trim();
            if n.is_empty() {
                Err(malformed(line, format!("empty entry in net list `{text}`")))
            } else {
                Ok(n.to_string())
            }
        })
        .collect()
}

fn anchors(line: u64, effect: &str, alarm: &str, attack: &str) -> Result<NetAnchors, FormatError> {
    NetAnchors::new(net_list(line, effect)?, net_list(line, alarm)?, net_list(line, attack)?).map_err(with_line(line))
}

/// Measures whose three net columns are all empty get no anchors.
pub fn parse_measures(text: &str) -> Result<Vec<Countermeasure>, FormatError> {
    records(text, &MEASURES_HEADER)?
        .into_iter()
        .map(|(line, r)| {
            let kind = MeasureKind::parse(r[1].trim())
                .ok_or_else(|| malformed(line, format!("unknown measure kind `{}`", &r[1])))?;
            let domain =
                Domain::parse(r[2].trim()).ok_or_else(|| malformed(line, format!("unknown domain `{}`", &r[2])))?;
            let anchors = anchors(line, &r[4], &r[5], &r[6])?;
            Ok(Countermeasure {
                id: r[0].trim().to_string(),
                kind,
                domain,
                description: r[3].to_string(),
                anchors: (!anchors.is_empty()).then_some(anchors),
            })
        })
        .collect()
}

pub fn parse_applicability(text: &str) -> Result<Vec<(String, String)>, FormatError> {
    Ok(records(text, &APPLICABILITY_HEADER)?
        .into_iter()
        .map(|(_, r)| (r[0].trim().to_string(), r[1].trim().to_string()))
        .collect())
}

pub fn parse_item_anchors(text: &str) -> Result<BTreeMap<String, NetAnchors>, FormatError> {
    let mut out = BTreeMap::new();
    for (line, r) in records(text, &ITEM_ANCHORS_HEADER)? {
        let id = r[0].trim().to_string();
        let a = anchors(line, &r[1], &r[2], &r[3])?;
        if out.insert(id.clone(), a).is_some() {
            return Err(with_line(line)(RiskError::DuplicateId(id)));
        }
    }
    Ok(out)
}

/// Parses and validates the three worksheet files together.
pub fn parse_worksheet(items: &str, measures: &str, applicability: &str) -> Result<Worksheet, FormatError> {
    Ok(Worksheet::new(parse_items(items)?, parse_measures(measures)?, parse_applicability(applicability)?)?)
}

fn write_csv<'a>(header: &[&str], rows: impl IntoIterator<Item = Vec<&'a str>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv of utf-8 fields is utf-8")
}

/// `(items, measures, applicability)` CSV texts that parse back to `ws`.
pub fn render_worksheet(ws: &Worksheet) -> (String, String, String) {
    let ratings: Vec<[String; 3]> = ws
        .items()
        .iter()
        .map(|i| [i.severity, i.occurrence, i.detection].map(|r| r.get().to_string()))
        .collect();
    let items = write_csv(
        &ITEMS_HEADER,
        ws.items().iter().zip(&ratings).map(|(i, [s, o, d])| {
            vec![i.id.as_str(), i.kind.as_str(), &i.description, &i.effect_group, s, o, d]
        }),
    );
    let nets: Vec<[String; 3]> = ws
        .measures()
        .iter()
        .map(|m| {
            let a = m.anchors.clone().unwrap_or_default();
            [a.effect_nets, a.alarm_nets, a.attack_input_nets].map(|v| v.join(";"))
        })
        .collect();
    let measures = write_csv(
        &MEASURES_HEADER,
        ws.measures().iter().zip(&nets).map(|(m, [e, a, t])| {
            vec![m.id.as_str(), m.kind.as_str(), m.domain.as_str(), &m.description, e, a, t]
        }),
    );
    let applicability =
        write_csv(&APPLICABILITY_HEADER, ws.applicability().iter().map(|(i, m)| vec![i.as_str(), m.as_str()]));
    (items, measures, applicability)
}
