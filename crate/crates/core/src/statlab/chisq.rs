use libm::erfc;
use serde::{Deserialize, Serialize};

use super::TestResult;
use crate::error::{Error, Result};

/// Turing-test outcome table. Rows: real images, synthetic images.
/// Columns: correctly identified, incorrectly identified.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable2x2 {
    pub counts: [[u64; 2]; 2],
}

impl ContingencyTable2x2 {
    pub const ROW_LABELS: [&'static str; 2] = ["real_images", "synthetic_images"];
    pub const COL_LABELS: [&'static str; 2] = ["correct", "incorrect"];

    pub fn new(counts: [[u64; 2]; 2]) -> Self {
        Self { counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_totals(&self) -> [u64; 2] {
        [self.counts[0][0] + self.counts[0][1], self.counts[1][0] + self.counts[1][1]]
    }

    pub fn col_totals(&self) -> [u64; 2] {
        [self.counts[0][0] + self.counts[1][0], self.counts[0][1] + self.counts[1][1]]
    }

    pub fn transpose(&self) -> Self {
        let c = self.counts;
        Self { counts: [[c[0][0], c[1][0]], [c[0][1], c[1][1]]] }
    }

    pub fn swap_rows(&self) -> Self {
        Self { counts: [self.counts[1], self.counts[0]] }
    }

    /// Cell-wise sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut counts = self.counts;
        for (r, row) in counts.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell += other.counts[r][c];
            }
        }
        Self { counts }
    }
}

/// Survival function of the chi-square distribution with one degree of freedom.
pub fn chi_square_sf_df1(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        erfc((x / 2.0).sqrt())
    }
}

/// Pearson chi-square test of independence on a 2x2 table (df = 1).
///
/// With `yates`, each `|O - E|` is reduced by 0.5, floored at zero.
pub fn chi_square_2x2(table: &ContingencyTable2x2, yates: bool) -> Result<TestResult> {
    let total = table.total();
    if total == 0 {
        return Err(Error::DegenerateTable("table is empty".into()));
    }
    let (rows, cols) = (table.row_totals(), table.col_totals());
    if rows.contains(&0) || cols.contains(&0) {
        return Err(Error::DegenerateTable(format!("zero marginal: rows {rows:?}, columns {cols:?}")));
    }
    let correction = if yates { 0.5 } else { 0.0 };
    let mut result = TestResult::new("chi-square-2x2", 0.0, 1.0);
    let mut statistic = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let expected = rows[r] as f64 * cols[c] as f64 / total as f64;
            let dev = ((table.counts[r][c] as f64 - expected).abs() - correction).max(0.0);
            statistic += dev * dev / expected;
            result = result.detail(&format!("expected_{}_{}", ContingencyTable2x2::ROW_LABELS[r], ContingencyTable2x2::COL_LABELS[c]), expected);
        }
    }
    result.statistic = statistic;
    result.p_value = chi_square_sf_df1(statistic);
    result.df = Some(1);
    if yates {
        result.method = "chi-square-2x2 yates".into();
    }
    Ok(result)
}
