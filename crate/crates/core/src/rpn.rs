//! Corrected risk priority numbers.
//!
//! Occurrence and Detection are rescaled by the row sums of the prevention and
//! detection influence matrices:
//!
//! ```text
//! v      = base - base * sum_j C_ij
//! corr   = 10 if v >= 10, 1 if v < 1, floor(v) otherwise
//! RPN    = S * O_corr * D_corr
//! ```
//!
//! Severity is never touched.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::correlation::{CdcfBundle, CdcfError, InfluenceKind};
use crate::risk::{ItemKind, Rating, Worksheet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RpnError {
    #[error("rating {0} is outside 1..=10")]
    RatingOutOfRange(i64),
    #[error("row sum is not a number")]
    NonFiniteSum,
    #[error(transparent)]
    Cdcf(#[from] CdcfError),
}

fn rescale(base: u8, row_sum: f64) -> Result<Rating, RpnError> {
    Rating::new(base as i64).ok_or(RpnError::RatingOutOfRange(base as i64))?;
    if row_sum.is_nan() {
        return Err(RpnError::NonFiniteSum);
    }
    let b = base as f64;
    let v = b - b * row_sum;
    let corrected = if v >= 10.0 {
        Rating::MAX
    } else if v < 1.0 {
        Rating::MIN
    } else {
        // 1 <= v < 10, so truncation is floor.
        Rating::new(v as i64).expect("floor of [1, 10) is a rating")
    };
    Ok(corrected)
}

/// Occurrence corrected by the prevention row sum.
pub fn corrected_occurrence(o_base: u8, row_sum: f64) -> Result<Rating, RpnError> {
    rescale(o_base, row_sum)
}

/// Detection corrected by the detection row sum.
pub fn corrected_detection(d_base: u8, row_sum: f64) -> Result<Rating, RpnError> {
    rescale(d_base, row_sum)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RpnResult {
    pub item_id: String,
    pub kind: ItemKind,
    pub severity: Rating,
    pub o_base: Rating,
    pub d_base: Rating,
    pub o_corr: Rating,
    pub d_corr: Rating,
    pub rpn_base: u16,
    pub rpn_corr: u16,
    /// `100 * (rpn_base - rpn_corr) / rpn_base`; negative when the RPN grew.
    pub improvement_pct: f64,
}

impl RpnResult {
    pub fn new(
        item_id: impl Into<String>,
        kind: ItemKind,
        severity: Rating,
        o_base: Rating,
        d_base: Rating,
        o_corr: Rating,
        d_corr: Rating,
    ) -> RpnResult {
        let product = |s: Rating, o: Rating, d: Rating| s.get() as u16 * o.get() as u16 * d.get() as u16;
        let rpn_base = product(severity, o_base, d_base);
        let rpn_corr = product(severity, o_corr, d_corr);
        let improvement_pct = 100.0 * (rpn_base as f64 - rpn_corr as f64) / rpn_base as f64;
        RpnResult {
            item_id: item_id.into(),
            kind,
            severity,
            o_base,
            d_base,
            o_corr,
            d_corr,
            rpn_base,
            rpn_corr,
            improvement_pct,
        }
    }
}

/// One result per worksheet item, in worksheet order.
pub fn compute_rpn(worksheet: &Worksheet, bundle: &CdcfBundle) -> Result<Vec<RpnResult>, RpnError> {
    if !bundle.matches(worksheet) {
        return Err(CdcfError::InconsistentWorksheet.into());
    }
    worksheet
        .items()
        .iter()
        .map(|item| {
            let prevention = bundle.row_sum(InfluenceKind::PreventionInfluence, &item.id)?;
            let detection = bundle.row_sum(InfluenceKind::DetectionInfluence, &item.id)?;
            let o_corr = corrected_occurrence(item.occurrence.get(), prevention)?;
            let d_corr = corrected_detection(item.detection.get(), detection)?;
            Ok(RpnResult::new(
                item.id.clone(),
                item.kind,
                item.severity,
                item.occurrence,
                item.detection,
                o_corr,
                d_corr,
            ))
        })
        .collect()
}

fn corrected_order(a: &RpnResult, b: &RpnResult) -> Ordering {
    b.rpn_corr
        .cmp(&a.rpn_corr)
        .then(b.severity.cmp(&a.severity))
        .then(b.o_corr.cmp(&a.o_corr))
        .then_with(|| a.item_id.cmp(&b.item_id))
}

fn baseline_order(a: &RpnResult, b: &RpnResult) -> Ordering {
    b.rpn_base
        .cmp(&a.rpn_base)
        .then(b.severity.cmp(&a.severity))
        .then(b.o_base.cmp(&a.o_base))
        .then_with(|| a.item_id.cmp(&b.item_id))
}

/// Descending corrected RPN; ties by severity, then corrected occurrence, then id.
pub fn rank(mut results: Vec<RpnResult>) -> Vec<RpnResult> {
    results.sort_by(corrected_order);
    results
}

/// The classical ordering: same tie-breaks applied to the uncorrected ratings.
pub fn rank_baseline(mut results: Vec<RpnResult>) -> Vec<RpnResult> {
    results.sort_by(baseline_order);
    results
}

/// Position of one item under classical and corrected ranking (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankChange {
    pub item_id: String,
    pub baseline_rank: usize,
    pub corrected_rank: usize,
}

impl RankChange {
    pub fn changed(&self) -> bool {
        self.baseline_rank != self.corrected_rank
    }

    /// Positive when the item moved up the priority list.
    pub fn delta(&self) -> i64 {
        self.baseline_rank as i64 - self.corrected_rank as i64
    }
}

/// Rank positions for every result, ordered by corrected rank.
pub fn rank_changes(results: &[RpnResult]) -> Vec<RankChange> {
    let baseline = rank_baseline(results.to_vec());
    rank(results.to_vec())
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let baseline_rank = baseline.iter().position(|b| b.item_id == r.item_id).expect("same items") + 1;
            RankChange { item_id: r.item_id, baseline_rank, corrected_rank: i + 1 }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn r(v: u8) -> Rating {
        Rating::new(v as i64).unwrap()
    }

    #[test]
    fn occurrence_examples() {
        assert_eq!(corrected_occurrence(5, 0.0).unwrap(), r(5));
        assert_eq!(corrected_occurrence(8, 1.0).unwrap(), r(1));
        assert_eq!(corrected_occurrence(6, 0.5).unwrap(), r(3));
        assert_eq!(corrected_occurrence(6, -0.8).unwrap(), r(10));
    }

    #[test]
    fn detection_examples() {
        assert_eq!(corrected_detection(7, 0.0).unwrap(), r(7));
        assert_eq!(corrected_detection(6, 0.25).unwrap(), r(4));
        assert_eq!(corrected_detection(3, 2.0).unwrap(), r(1));
    }

    #[test]
    fn exactly_ten_takes_upper_branch() {
        // 5 - 5 * (-1) = 10
        assert_eq!(corrected_occurrence(5, -1.0).unwrap(), r(10));
        assert_eq!(corrected_occurrence(10, 0.0).unwrap(), r(10));
    }

    #[test]
    fn bad_inputs() {
        assert_eq!(corrected_occurrence(0, 0.0), Err(RpnError::RatingOutOfRange(0)));
        assert_eq!(corrected_detection(11, 0.0), Err(RpnError::RatingOutOfRange(11)));
        assert_eq!(corrected_detection(5, f64::NAN), Err(RpnError::NonFiniteSum));
    }

    fn result(id: &str, s: u8, o: u8, d: u8, o_corr: u8, d_corr: u8) -> RpnResult {
        RpnResult::new(id, ItemKind::FailureMode, r(s), r(o), r(d), r(o_corr), r(d_corr))
    }

    #[test]
    fn result_arithmetic() {
        let x = result("FM1", 9, 4, 6, 4, 1);
        assert_eq!(x.rpn_base, 216);
        assert_eq!(x.rpn_corr, 36);
        assert!((x.improvement_pct - 250.0 / 3.0).abs() < 1e-9);
        let y = result("FM2", 10, 1, 2, 2, 2);
        assert_eq!(y.rpn_corr, 40);
        assert_eq!(y.improvement_pct, -100.0);
    }

    #[test]
    fn ranking_tie_breaks() {
        let ids = |v: Vec<RpnResult>| v.into_iter().map(|r| r.item_id).collect::<Vec<_>>();
        assert_eq!(ids(rank(vec![result("B", 9, 4, 1, 4, 1), result("A", 9, 4, 6, 4, 6)])), ["A", "B"]);
        // 9*4*5 = 180 = 10*3*6
        assert_eq!(ids(rank(vec![result("A", 9, 4, 5, 4, 5), result("B", 10, 3, 6, 3, 6)])), ["B", "A"]);
        assert_eq!(ids(rank(vec![result("Z", 9, 4, 6, 4, 6), result("A", 9, 4, 6, 4, 6)])), ["A", "Z"]);
    }

    #[test]
    fn rank_change_positions() {
        let results = vec![result("A", 9, 4, 6, 4, 1), result("B", 9, 3, 6, 3, 6)];
        let changes = rank_changes(&results);
        assert_eq!(changes[0], RankChange { item_id: "B".into(), baseline_rank: 2, corrected_rank: 1 });
        assert_eq!(changes[1].delta(), -1);
        assert!(changes.iter().all(RankChange::changed));
    }
}
