//! Labelled datasets and the operations every experiment shares.

mod blobs;
mod csv_io;
mod metrics;
mod pca;
mod split;

pub use blobs::{generate_blobs, GaussianBlobSpec};
pub use csv_io::{load_csv, read_csv, write_csv, CsvOptions, LabelEncoding};
pub use metrics::{classification_accuracy, clustering_accuracy, EXHAUSTIVE_CLUSTER_LIMIT};
pub use pca::{pca_project, PcaProjection};
pub use split::{split, split_indices, SplitSpec};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feature matrix (one row per instance) with integer class labels in `0..class_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: DMatrix<f64>,
    labels: Vec<usize>,
    class_count: usize,
    name: String,
}

/// Shape metadata echoed into reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    pub samples: usize,
    pub features: usize,
    pub classes: usize,
}

impl LabeledDataset {
    pub fn new(
        name: impl Into<String>,
        features: DMatrix<f64>,
        labels: Vec<usize>,
        class_count: usize,
    ) -> Result<Self> {
        let (n, d) = features.shape();
        if n == 0 || d == 0 {
            return Err(Error::InvalidDataset(format!("empty feature matrix {n}x{d}")));
        }
        if class_count == 0 {
            return Err(Error::InvalidDataset("class_count must be at least 1".into()));
        }
        if labels.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: labels.len(),
            });
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= class_count) {
            return Err(Error::InvalidDataset(format!(
                "label {l} at row {i} is not below class_count {class_count}"
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            // column-major storage
            return Err(Error::InvalidDataset(format!(
                "non-finite feature at row {}, column {}",
                pos % n,
                pos / n
            )));
        }
        Ok(Self {
            features,
            labels,
            class_count,
            name: name.into(),
        })
    }

    /// Builds a dataset from row vectors.
    pub fn from_rows(
        name: impl Into<String>,
        rows: &[Vec<f64>],
        labels: Vec<usize>,
        class_count: usize,
    ) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.len(),
            });
        }
        let features = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
        Self::new(name, features, labels, class_count)
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.features.row(i).iter().copied().collect()
    }

    pub fn summary(&self) -> DatasetSummary {
        DatasetSummary {
            name: self.name.clone(),
            samples: self.len(),
            features: self.dim(),
            classes: self.class_count,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Rows selected by index, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let features = self.features.select_rows(indices);
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Self::new(self.name.clone(), features, labels, self.class_count)
    }

    /// Per-class instance counts.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Appends rows of `other` below `self`. Class count becomes the larger of the two.
    pub fn concat(&self, other: &LabeledDataset) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let n = self.len();
        let features = DMatrix::from_fn(n + other.len(), self.dim(), |i, j| {
            if i < n {
                self.features[(i, j)]
            } else {
                other.features[(i - n, j)]
            }
        });
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Self::new(
            self.name.clone(),
            features,
            labels,
            self.class_count.max(other.class_count),
        )
    }

    /// Same labels, new feature matrix (row count must match).
    pub fn with_features(&self, features: DMatrix<f64>) -> Result<Self> {
        Self::new(self.name.clone(), features, self.labels.clone(), self.class_count)
    }
}
