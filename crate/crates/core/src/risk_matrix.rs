//! Unified risk matrix: failure-probability class x attack-feasibility class
//! to a single 1..=10 occurrence rating.

use alloc::string::String;
use alloc::vec::Vec;

use crate::risk::Rating;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RiskMatrixError {
    #[error("unknown class label `{0}`")]
    UnknownClassLabel(String),
    #[error("cell map must be {rows} x {cols}")]
    NotTotal { rows: usize, cols: usize },
    #[error("cell ({row}, {col}) = {value} is outside 1..=10")]
    CellOutOfRange { row: usize, col: usize, value: i64 },
    #[error("cell map decreases at ({row}, {col})")]
    NotMonotone { row: usize, col: usize },
    #[error("duplicate or empty class label `{0}`")]
    BadLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiskMatrixConfig {
    occurrence_classes: Vec<String>,
    feasibility_classes: Vec<String>,
    // Row per occurrence class, column per feasibility class.
    cells: Vec<Vec<Rating>>,
}

impl RiskMatrixConfig {
    /// Validates totality, range and monotonicity along both axes.
    pub fn new(
        occurrence_classes: Vec<String>,
        feasibility_classes: Vec<String>,
        cells: Vec<Vec<i64>>,
    ) -> Result<RiskMatrixConfig, RiskMatrixError> {
        for labels in [&occurrence_classes, &feasibility_classes] {
            for (i, l) in labels.iter().enumerate() {
                if l.is_empty() || labels[..i].contains(l) {
                    return Err(RiskMatrixError::BadLabel(l.clone()));
                }
            }
        }
        let (rows, cols) = (occurrence_classes.len(), feasibility_classes.len());
        if rows == 0 || cols == 0 || cells.len() != rows || cells.iter().any(|r| r.len() != cols) {
            return Err(RiskMatrixError::NotTotal { rows, cols });
        }
        let mut rated = Vec::with_capacity(rows);
        for (row, values) in cells.iter().enumerate() {
            let mut out = Vec::with_capacity(cols);
            for (col, &value) in values.iter().enumerate() {
                out.push(Rating::new(value).ok_or(RiskMatrixError::CellOutOfRange { row, col, value })?);
            }
            rated.push(out);
        }
        for row in 0..rows {
            for col in 0..cols {
                let here = rated[row][col];
                let up = row > 0 && rated[row - 1][col] > here;
                let left = col > 0 && rated[row][col - 1] > here;
                if up || left {
                    return Err(RiskMatrixError::NotMonotone { row, col });
                }
            }
        }
        Ok(RiskMatrixConfig { occurrence_classes, feasibility_classes, cells: rated })
    }

    pub fn occurrence_classes(&self) -> &[String] {
        &self.occurrence_classes
    }

    pub fn feasibility_classes(&self) -> &[String] {
        &self.feasibility_classes
    }

    pub fn cells(&self) -> &[Vec<Rating>] {
        &self.cells
    }

    pub fn unified_occurrence(&self, failure_class: &str, feasibility_class: &str) -> Result<Rating, RiskMatrixError> {
        let find = |labels: &[String], l: &str| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| RiskMatrixError::UnknownClassLabel(l.into()))
        };
        let row = find(&self.occurrence_classes, failure_class)?;
        let col = find(&self.feasibility_classes, feasibility_class)?;
        Ok(self.cells[row][col])
    }
}

impl Default for RiskMatrixConfig {
    /// Five failure-probability classes by four feasibility classes, filled with
    /// `1 + floor(9 * (i + j) / 7)` so the corners are 1 and 10.
    fn default() -> Self {
        let occ = ["Remote", "Low", "Moderate", "High", "VeryHigh"];
        let feas = ["VeryLow", "Low", "Medium", "High"];
        let span = (occ.len() - 1 + feas.len() - 1) as i64;
        let cells = (0..occ.len())
            .map(|i| (0..feas.len()).map(|j| 1 + 9 * (i + j) as i64 / span).collect())
            .collect();
        RiskMatrixConfig::new(
            occ.iter().map(|s| String::from(*s)).collect(),
            feas.iter().map(|s| String::from(*s)).collect(),
            cells,
        )
        .expect("default matrix is valid")
    }
}
