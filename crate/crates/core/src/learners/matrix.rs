//! Dense row-major feature matrix. Invalid entries are NaN.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(n_cols: usize) -> Self {
        FeatureMatrix {
            n_rows: 0,
            n_cols,
            values: Vec::new(),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut m = FeatureMatrix::new(n_cols);
        for r in rows {
            m.push_row(r)?;
        }
        Ok(m)
    }

    /// Single-column matrix.
    pub fn from_column(column: &[f64]) -> Self {
        FeatureMatrix {
            n_rows: column.len(),
            n_cols: 1,
            values: column.to_vec(),
        }
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.n_cols {
            return Err(Error::Schema(format!("row has {} columns, expected {}", row.len(), self.n_cols)));
        }
        self.values.extend_from_slice(row);
        self.n_rows += 1;
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n_cols).map(|j| self.column(j)).collect()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut values = Vec::with_capacity(rows.len() * self.n_cols);
        for &i in rows {
            values.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            n_rows: rows.len(),
            n_cols: self.n_cols,
            values,
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut values = Vec::with_capacity(self.n_rows * cols.len());
        for i in 0..self.n_rows {
            let r = self.row(i);
            values.extend(cols.iter().map(|&j| r[j]));
        }
        FeatureMatrix {
            n_rows: self.n_rows,
            n_cols: cols.len(),
            values,
        }
    }
}

pub(crate) fn check_labels(labels: &[i8], n: usize) -> Result<()> {
    if labels.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: labels.len(),
        });
    }
    if labels.iter().any(|&l| l != 1 && l != -1) {
        return Err(Error::InvalidSpec("labels must be +1 or -1".into()));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::DegenerateLabels("both classes must be present".into()));
    }
    Ok(())
}
