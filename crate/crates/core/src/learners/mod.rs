//! Classical learners used to measure the effect of noise.

mod kmeans;
mod lasso;
mod lda;
mod ridge;
mod svm;

pub use kmeans::{kmeans, KMeansModel, KMeansParams};
pub use lasso::{train_lasso, LassoParams};
pub use lda::{angle_between_degrees, train_lda, LdaProjection};
pub use ridge::train_ridge;
pub use svm::{train_svm, SvmParams};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::RngSeed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearKind {
    Svm,
    Lasso,
    Ridge,
}

/// One hyperplane per class; column `d` of `weights` holds the bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: DMatrix<f64>,
    pub kind: LinearKind,
    pub regularization: f64,
}

impl LinearModel {
    pub fn new(weights: DMatrix<f64>, kind: LinearKind, regularization: f64) -> Result<Self> {
        if weights.nrows() < 2 || weights.ncols() < 2 {
            return Err(Error::Learner(format!(
                "linear model needs at least 2 classes and 1 feature, got {}x{}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Learner("non-finite weights".into()));
        }
        Ok(Self {
            weights,
            kind,
            regularization,
        })
    }

    pub fn class_count(&self) -> usize {
        self.weights.nrows()
    }

    pub fn dim(&self) -> usize {
        self.weights.ncols() - 1
    }

    /// Class scores `W x + b` for every row, as an `n × c` matrix.
    pub fn scores(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let d = self.dim();
        if x.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.ncols(),
            });
        }
        let w = self.weights.columns(0, d);
        let b = self.weights.column(d);
        let mut s = x * w.transpose();
        for mut row in s.row_iter_mut() {
            row += b.transpose();
        }
        Ok(s)
    }
}

/// Index of the largest score; ties go to the lowest index.
pub(crate) fn argmax(scores: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in scores.into_iter().enumerate() {
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    best
}

/// Argmax class per row.
pub fn predict(model: &LinearModel, data: &LabeledDataset) -> Result<Vec<usize>> {
    predict_features(model, data.features())
}

pub fn predict_features(model: &LinearModel, x: &DMatrix<f64>) -> Result<Vec<usize>> {
    let s = model.scores(x)?;
    Ok(s.row_iter().map(|r| argmax(r.iter().copied())).collect())
}

/// Hyperparameters of a linear classifier, as named in experiment configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LearnerSpec {
    Svm {
        #[serde(default = "default_c")]
        c: f64,
    },
    Lasso {
        #[serde(default = "default_lasso_lambda")]
        lambda: f64,
    },
    /// Ridge least squares on one-hot targets (stands in for DLSR).
    Ridge {
        #[serde(default = "default_ridge_lambda")]
        lambda: f64,
    },
}

fn default_c() -> f64 {
    1.0
}

fn default_lasso_lambda() -> f64 {
    0.01
}

fn default_ridge_lambda() -> f64 {
    1.0
}

impl LearnerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::Svm { .. } => "svm",
            LearnerSpec::Lasso { .. } => "lasso",
            LearnerSpec::Ridge { .. } => "ridge",
        }
    }

    pub fn fit(&self, train: &LabeledDataset, seed: &RngSeed) -> Result<LinearModel> {
        match *self {
            LearnerSpec::Svm { c } => train_svm(train, &SvmParams::with_c(c), seed),
            LearnerSpec::Lasso { lambda } => train_lasso(train, &LassoParams::with_lambda(lambda), seed),
            LearnerSpec::Ridge { lambda } => train_ridge(train, lambda),
        }
    }
}

/// Column means and the centred copy of `x`.
pub(crate) fn centered(x: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let mean = x.row_mean().transpose();
    let mut c = x.clone();
    for mut row in c.row_iter_mut() {
        row -= mean.transpose();
    }
    (mean, c)
}

/// `n × c` indicator matrix of the labels.
pub(crate) fn one_hot(labels: &[usize], classes: usize) -> DMatrix<f64> {
    DMatrix::from_fn(labels.len(), classes, |i, k| if labels[i] == k { 1.0 } else { 0.0 })
}

/// Least-squares style weights (`d × c` plus intercepts) packed as `c × (d+1)`.
pub(crate) fn pack(w: &DMatrix<f64>, intercepts: &DVector<f64>) -> DMatrix<f64> {
    let (d, c) = w.shape();
    DMatrix::from_fn(c, d + 1, |k, j| if j < d { w[(j, k)] } else { intercepts[k] })
}

pub(crate) fn require_classes(train: &LabeledDataset) -> Result<()> {
    if train.class_count() < 2 {
        return Err(Error::Learner("need at least 2 classes".into()));
    }
    if train.class_counts().iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::Learner("training data contains a single class".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_predicts_class_zero() {
        let m = LinearModel::new(DMatrix::zeros(3, 3), LinearKind::Ridge, 0.0).unwrap();
        let ds = LabeledDataset::from_rows("z", &[vec![1.0, 2.0], vec![-3.0, 0.5]], vec![0, 1], 3).unwrap();
        assert_eq!(predict(&m, &ds).unwrap(), vec![0, 0]);
    }

    #[test]
    fn single_feature_sign() {
        // class 1 scores +x, class 0 scores −x
        let w = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 1.0, 0.0]);
        let m = LinearModel::new(w, LinearKind::Svm, 1.0).unwrap();
        let ds = LabeledDataset::from_rows("s", &[vec![-1.0], vec![1.0]], vec![0, 1], 2).unwrap();
        assert_eq!(predict(&m, &ds).unwrap(), vec![0, 1]);
    }

    #[test]
    fn dimension_checked() {
        let m = LinearModel::new(DMatrix::zeros(2, 3), LinearKind::Svm, 1.0).unwrap();
        let ds = LabeledDataset::from_rows("s", &[vec![1.0]], vec![0], 2).unwrap();
        assert!(matches!(predict(&m, &ds), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn learner_spec_json() {
        let s: LearnerSpec = serde_json::from_str(r#"{"kind":"lasso"}"#).unwrap();
        assert_eq!(s, LearnerSpec::Lasso { lambda: 0.01 });
        let s: LearnerSpec = serde_json::from_str(r#"{"kind":"ridge"}"#).unwrap();
        assert_eq!(s, LearnerSpec::Ridge { lambda: 1.0 });
    }
}
