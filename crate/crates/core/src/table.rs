//! Row-oriented numeric tables produced by sweeps.

use serde::{Deserialize, Serialize};

/// Frequency- or parameter-indexed rows of numbers.
///
/// A row that could not be computed keeps its place in the table, carries
/// `NaN` values and a flag describing the failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub flags: Vec<Option<String>>,
}

impl SweepTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            flags: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
        self.flags.push(None);
    }

    /// Appends a failed row; all values after the leading `keep` are `NaN`.
    pub fn push_flagged(&mut self, leading: &[f64], flag: impl Into<String>) {
        let mut row = leading.to_vec();
        row.resize(self.columns.len(), f64::NAN);
        self.rows.push(row);
        self.flags.push(Some(flag.into()));
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of the named column, or `None` if no such column exists.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn flagged_count(&self) -> usize {
        self.flags.iter().filter(|f| f.is_some()).count()
    }

    /// Unwraps a phase column in place. Runs are broken at non-finite values.
    pub fn unwrap_column(&mut self, name: &str) {
        let Some(idx) = self.column_index(name) else {
            return;
        };
        let mut start = 0;
        while start < self.rows.len() {
            while start < self.rows.len() && !self.rows[start][idx].is_finite() {
                start += 1;
            }
            let mut end = start;
            while end < self.rows.len() && self.rows[end][idx].is_finite() {
                end += 1;
            }
            let mut run: Vec<f64> = self.rows[start..end].iter().map(|r| r[idx]).collect();
            crate::toy::unwrap_phases(&mut run);
            for (row, v) in self.rows[start..end].iter_mut().zip(run) {
                row[idx] = v;
            }
            start = end;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flagged_rows_keep_position() {
        let mut t = SweepTable::new(["x", "y"]);
        t.push(vec![0.0, 1.0]);
        t.push_flagged(&[1.0], "boom");
        t.push(vec![2.0, 3.0]);
        assert_eq!(t.len(), 3);
        assert_eq!(t.flagged_count(), 1);
        let y = t.column("y").unwrap();
        assert!(y[1].is_nan());
        assert_eq!(t.column("x").unwrap(), vec![0.0, 1.0, 2.0]);
        assert!(t.column("z").is_none());
    }

    #[test]
    fn unwrap_skips_gaps() {
        let mut t = SweepTable::new(["p"]);
        for v in [3.0, -3.1, f64::NAN, 3.0, -3.0] {
            t.push(vec![v]);
        }
        t.unwrap_column("p");
        let p = t.column("p").unwrap();
        assert!((p[1] - (-3.1 + std::f64::consts::TAU)).abs() < 1e-12);
        assert!(p[2].is_nan());
        assert!((p[4] - (-3.0 + std::f64::consts::TAU)).abs() < 1e-12);
    }
}
