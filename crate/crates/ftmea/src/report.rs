//! Report emitters. Every function is a pure rendering of its inputs.

use std::fmt::Write as _;

use ftmea_core::faultsim::CampaignResult;
use ftmea_core::rpn::{RankChange, RpnResult};
use ftmea_core::{CdcfBundle, NetSet, Netlist, RiskMatrixConfig, ScoapReport};
use serde_json::{Map, Value};

use crate::error::FormatError;
use crate::json_io::{decimal_text, fixed, risk_matrix_value, to_text};

pub const RPN_HEADER: [&str; 10] =
    ["item_id", "kind", "S", "O", "D", "O_corr", "D_corr", "RPN_base", "RPN_corr", "improvement_pct"];
pub const RANK_CHANGES_HEADER: [&str; 5] = ["item_id", "baseline_rank", "corrected_rank", "rank_delta", "changed"];
pub const COMPARISON_HEADER: [&str; 7] =
    ["item_id", "rank_before", "rank_after", "rank_delta", "rpn_before", "rpn_after", "rpn_delta"];

fn csv_text<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn rpn_fields(r: &RpnResult) -> [String; 10] {
    [
        r.item_id.clone(),
        r.kind.as_str().into(),
        r.severity.to_string(),
        r.o_base.to_string(),
        r.d_base.to_string(),
        r.o_corr.to_string(),
        r.d_corr.to_string(),
        r.rpn_base.to_string(),
        r.rpn_corr.to_string(),
        decimal_text(r.improvement_pct, 2),
    ]
}

/// One row per item in the order given (callers pass ranked results).
pub fn rpn_csv(ranked: &[RpnResult]) -> String {
    csv_text(&RPN_HEADER, ranked.iter().map(rpn_fields))
}

pub fn rank_changes_csv(changes: &[RankChange]) -> String {
    csv_text(
        &RANK_CHANGES_HEADER,
        changes.iter().map(|c| {
            [
                c.item_id.clone(),
                c.baseline_rank.to_string(),
                c.corrected_rank.to_string(),
                c.delta().to_string(),
                c.changed().to_string(),
            ]
        }),
    )
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

pub fn rpn_markdown(
    ranked: &[RpnResult],
    changes: &[RankChange],
    bundle: &CdcfBundle,
    risk_matrix: Option<&RiskMatrixConfig>,
) -> String {
    let mut md = String::from("# Risk priority report\n\n");
    md += "| Rank | Item | Kind | S | O | D | O_corr | D_corr | RPN_base | RPN_corr | Improvement (%) |\n";
    md += "|---:|---|---|---:|---:|---:|---:|---:|---:|---:|---:|\n";
    for (i, r) in ranked.iter().enumerate() {
        let f = rpn_fields(r);
        writeln!(md, "| {} | {} | {} |", i + 1, md_escape(&f[0]), f[1..].join(" | ")).unwrap();
    }

    md += "\n## Rank changes\n\n";
    let moved: Vec<&RankChange> = changes.iter().filter(|c| c.changed()).collect();
    if moved.is_empty() {
        md += "No item changed rank against the classical ordering.\n";
    } else {
        md += "| Item | Baseline rank | Corrected rank | Delta |\n|---|---:|---:|---:|\n";
        for c in moved {
            writeln!(md, "| {} | {} | {} | {:+} |", md_escape(&c.item_id), c.baseline_rank, c.corrected_rank, c.delta())
                .unwrap();
        }
    }

    md += "\n## Common effects\n\n";
    if bundle.common_effect().is_empty() {
        md += "No common-effect correlations.\n";
    } else {
        md += "| Failure mode | Threat mode | Coefficient | Provenance |\n|---|---|---:|---|\n";
        for (fm, tm, e) in bundle.common_effect().iter() {
            writeln!(
                md,
                "| {} | {} | {} | {} |",
                md_escape(fm),
                md_escape(tm),
                decimal_text(e.value, 4),
                e.provenance.as_str()
            )
            .unwrap();
        }
    }

    if let Some(cfg) = risk_matrix {
        md += "\n## Unified risk matrix\n\n";
        writeln!(md, "| Occurrence \\ Feasibility | {} |", cfg.feasibility_classes().join(" | ")).unwrap();
        writeln!(md, "|---|{}", "---:|".repeat(cfg.feasibility_classes().len())).unwrap();
        for (label, row) in cfg.occurrence_classes().iter().zip(cfg.cells()) {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(md, "| {} | {} |", md_escape(label), cells.join(" | ")).unwrap();
        }
    }
    md
}

pub fn rpn_json(
    ranked: &[RpnResult],
    changes: &[RankChange],
    bundle: &CdcfBundle,
    risk_matrix: Option<&RiskMatrixConfig>,
) -> String {
    let items: Vec<Value> = ranked
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut m = Map::new();
            m.insert("rank".into(), (i + 1).into());
            m.insert("item_id".into(), r.item_id.clone().into());
            m.insert("kind".into(), r.kind.as_str().into());
            m.insert("S".into(), r.severity.get().into());
            m.insert("O".into(), r.o_base.get().into());
            m.insert("D".into(), r.d_base.get().into());
            m.insert("O_corr".into(), r.o_corr.get().into());
            m.insert("D_corr".into(), r.d_corr.get().into());
            m.insert("RPN_base".into(), r.rpn_base.into());
            m.insert("RPN_corr".into(), r.rpn_corr.into());
            m.insert("improvement_pct".into(), fixed(r.improvement_pct, 2));
            m.into()
        })
        .collect();
    let changes: Vec<Value> = changes
        .iter()
        .map(|c| {
            let mut m = Map::new();
            m.insert("item_id".into(), c.item_id.clone().into());
            m.insert("baseline_rank".into(), c.baseline_rank.into());
            m.insert("corrected_rank".into(), c.corrected_rank.into());
            m.insert("rank_delta".into(), c.delta().into());
            m.insert("changed".into(), c.changed().into());
            m.into()
        })
        .collect();
    let common: Vec<Value> = bundle
        .common_effect()
        .iter()
        .map(|(fm, tm, e)| {
            let mut m = Map::new();
            m.insert("failure_mode".into(), fm.into());
            m.insert("threat_mode".into(), tm.into());
            m.insert("value".into(), fixed(e.value, 4));
            m.insert("provenance".into(), e.provenance.as_str().into());
            m.into()
        })
        .collect();
    let mut root = Map::new();
    root.insert("items".into(), items.into());
    root.insert("rank_changes".into(), changes.into());
    root.insert("common_effect".into(), common.into());
    root.insert("risk_matrix".into(), risk_matrix.map_or(Value::Null, risk_matrix_value));
    to_text(&root.into())
}

/// One row of a previously written `rpn_report.csv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub item_id: String,
    pub rank: usize,
    pub rpn_corr: u16,
}

pub fn parse_rpn_csv(text: &str) -> Result<Vec<ReportRow>, FormatError> {
    let malformed = |line: u64, message: String| FormatError::MalformedCsv { line, message };
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| malformed(1, e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != RPN_HEADER {
        return Err(malformed(1, format!("expected header `{}`", RPN_HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| malformed(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let rpn_corr =
            record[8].parse().map_err(|_| malformed(line, format!("RPN_corr `{}` is not an integer", &record[8])))?;
        if rows.iter().any(|r: &ReportRow| r.item_id == record[0]) {
            return Err(FormatError::Risk { line: Some(line), source: ftmea_core::RiskError::DuplicateId(record[0].into()) });
        }
        rows.push(ReportRow { item_id: record[0].into(), rank: rows.len() + 1, rpn_corr });
    }
    Ok(rows)
}

/// Per-item rank and corrected-RPN deltas; items missing on one side get empty cells.
pub fn comparison_csv(before: &[ReportRow], after: &[ReportRow]) -> String {
    let find = |rows: &[ReportRow], id: &str| rows.iter().find(|r| r.item_id == id).cloned();
    let mut ids: Vec<&str> = after.iter().map(|r| r.item_id.as_str()).collect();
    ids.extend(before.iter().map(|r| r.item_id.as_str()).filter(|id| find(after, id).is_none()));
    let opt = |v: Option<i64>| v.map(|x| x.to_string()).unwrap_or_default();
    csv_text(
        &COMPARISON_HEADER,
        ids.into_iter().map(|id| {
            let (b, a) = (find(before, id), find(after, id));
            let (rb, ra) = (b.as_ref().map(|r| r.rank as i64), a.as_ref().map(|r| r.rank as i64));
            let (pb, pa) = (b.as_ref().map(|r| r.rpn_corr as i64), a.as_ref().map(|r| r.rpn_corr as i64));
            [
                id.to_string(),
                opt(rb),
                opt(ra),
                opt(rb.zip(ra).map(|(b, a)| b - a)),
                opt(pb),
                opt(pa),
                opt(pb.zip(pa).map(|(b, a)| a - b)),
            ]
        }),
    )
}

/// `net,cc0,cc1,co` sorted by net name; unobservable nets show `inf`.
pub fn scoap_csv(netlist: &Netlist, report: &ScoapReport) -> String {
    let mut nets: Vec<_> = netlist.nets().collect();
    nets.sort_by_key(|&n| netlist.net_name(n));
    csv_text(
        &["net", "cc0", "cc1", "co"],
        nets.into_iter().map(|n| {
            [
                netlist.net_name(n).to_string(),
                report.cc0(n).to_string(),
                report.cc1(n).to_string(),
                report.co(n).map_or_else(|| "inf".to_string(), |c| c.to_string()),
            ]
        }),
    )
}

fn sorted_names(netlist: &Netlist, nets: &NetSet) -> Vec<Value> {
    let mut names: Vec<&str> = nets.iter().map(|&n| netlist.net_name(n)).collect();
    names.sort_unstable();
    names.into_iter().map(Value::from).collect()
}

pub fn coi_json(netlist: &Netlist, roots: &NetSet, forward: bool, cone: &NetSet) -> String {
    let mut m = Map::new();
    m.insert("direction".into(), if forward { "fanout" } else { "fanin" }.into());
    m.insert("roots".into(), sorted_names(netlist, roots).into());
    m.insert("nets".into(), sorted_names(netlist, cone).into());
    m.insert("size".into(), cone.len().into());
    to_text(&m.into())
}

/// `{affecting, toggleable, vectors_evaluated, seed}`; sites sorted by net name then polarity.
pub fn faultsim_json(netlist: &Netlist, result: &CampaignResult) -> String {
    let mut sites: Vec<(&str, &str)> = result
        .affecting_sites
        .iter()
        .map(|s| (netlist.net_name(s.net), s.polarity.as_str()))
        .collect();
    sites.sort_unstable();
    let affecting: Vec<Value> = sites
        .into_iter()
        .map(|(net, p)| {
            let mut m = Map::new();
            m.insert("net".into(), net.into());
            m.insert("fault".into(), p.into());
            m.into()
        })
        .collect();
    let mut m = Map::new();
    m.insert("affecting".into(), affecting.into());
    m.insert("toggleable".into(), sorted_names(netlist, &result.toggleable_nets).into());
    m.insert("vectors_evaluated".into(), result.vectors_evaluated.into());
    m.insert("seed".into(), result.seed.map_or(Value::Null, Value::from));
    to_text(&m.into())
}
