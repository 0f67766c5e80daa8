use ftmea::worksheet_csv::{parse_worksheet, render_worksheet};
use ftmea_core::{Countermeasure, Domain, ItemKind, MeasureKind, NetAnchors, Rating, RiskItem, Worksheet};
use proptest::prelude::*;

fn rating() -> impl Strategy<Value = Rating> {
    (1i64..=10).prop_map(|v| Rating::new(v).unwrap())
}

fn nets() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec("[a-z][a-z0-9_]{0,5}", 0..3)
}

fn anchors() -> impl Strategy<Value = Option<NetAnchors>> {
    (nets(), nets(), nets()).prop_map(|(e, a, t)| {
        let anchors = NetAnchors::new(e, a, t).unwrap();
        (!anchors.is_empty()).then_some(anchors)
    })
}

fn worksheet() -> impl Strategy<Value = Worksheet> {
    let item = (any::<bool>(), "[ -~\n]{0,12}", "[A-Z][a-z]{0,6}", rating(), rating(), rating());
    let measure = (any::<bool>(), any::<bool>(), "[ -~\n]{0,12}", anchors());
    (prop::collection::vec(item, 1..6), prop::collection::vec(measure, 0..5), any::<u64>()).prop_map(
        |(items, measures, mask)| {
            let items: Vec<RiskItem> = items
                .into_iter()
                .enumerate()
                .map(|(i, (fm, description, effect_group, s, o, d))| RiskItem {
                    id: format!("I{i}"),
                    kind: if fm { ItemKind::FailureMode } else { ItemKind::ThreatMode },
                    description,
                    effect_group,
                    severity: s,
                    occurrence: o,
                    detection: d,
                })
                .collect();
            let measures: Vec<Countermeasure> = measures
                .into_iter()
                .enumerate()
                .map(|(j, (prev, safety, description, anchors))| Countermeasure {
                    id: format!("M{j}"),
                    kind: if prev { MeasureKind::Prevention } else { MeasureKind::Detection },
                    domain: if safety { Domain::Safety } else { Domain::Security },
                    description,
                    anchors,
                })
                .collect();
            let mut pairs = Vec::new();
            for (i, item) in items.iter().enumerate() {
                for (j, m) in measures.iter().enumerate() {
                    if mask >> ((i * 5 + j) % 64) & 1 == 1 {
                        pairs.push((item.id.clone(), m.id.clone()));
                    }
                }
            }
            Worksheet::new(items, measures, pairs).unwrap()
        },
    )
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(ws in worksheet()) {
        let (items, measures, applicability) = render_worksheet(&ws);
        prop_assert_eq!(parse_worksheet(&items, &measures, &applicability).unwrap(), ws);
    }
}
