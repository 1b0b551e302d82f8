use nalgebra::{DMatrix, DMatrixView};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary class label.
pub type Label = u8;

/// An `n x p` feature matrix (row-major) with binary labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    n: usize,
    p: usize,
    features: Vec<f64>,
    labels: Vec<Label>,
}

impl LabeledDataset {
    /// Build a dataset from row-major features of width `p`.
    pub fn new(features: Vec<f64>, p: usize, labels: Vec<Label>) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidData("feature dimension must be positive".into()));
        }
        if labels.is_empty() {
            return Err(Error::InvalidData("dataset must contain at least one observation".into()));
        }
        if features.len() != labels.len() * p {
            return Err(Error::InvalidData(format!(
                "{} feature values do not form {} rows of width {p}",
                features.len(),
                labels.len()
            )));
        }
        if let Some(pos) = labels.iter().position(|&y| y > 1) {
            return Err(Error::InvalidData(format!(
                "label {} at row {pos} is not in {{0, 1}}",
                labels[pos]
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite feature at row {}, column {}",
                pos / p,
                pos % p
            )));
        }
        Ok(Self { n: labels.len(), p, features, labels })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<Label>) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if rows.len() != labels.len() {
            return Err(Error::InvalidData(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::InvalidData(format!("row {i} has width {}, expected {p}", rows[i].len())));
        }
        Self::new(rows.concat(), p, labels)
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Feature dimension.
    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.p)
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    /// Observation counts `[n_0, n_1]`.
    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&y| y == 1).count();
        [self.n - ones, ones]
    }

    /// Transposed view: a `p x n` column-major matrix whose columns are observations.
    pub fn features_t(&self) -> DMatrixView<'_, f64> {
        DMatrixView::from_slice(&self.features, self.p, self.n)
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.p, &self.features)
    }

    /// Dataset restricted to the given observation indices, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.p);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self { n: labels.len(), p: self.p, features, labels }
    }

    /// Dataset with observation `i` removed.
    pub fn without(&self, i: usize) -> Self {
        let keep: Vec<usize> = (0..self.n).filter(|&j| j != i).collect();
        self.subset(&keep)
    }

    /// Replace the features, keeping labels and ordering. Used for projected copies.
    pub(crate) fn with_features(&self, features: Vec<f64>, p: usize) -> Self {
        debug_assert_eq!(features.len(), self.n * p);
        Self { n: self.n, p, features, labels: self.labels.clone() }
    }
}
