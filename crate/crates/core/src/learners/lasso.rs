use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{centered, one_hot, pack, require_classes, LinearKind, LinearModel};
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::RngSeed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LassoParams {
    pub lambda: f64,
    /// Stop when no coordinate moves by more than this in a sweep.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl LassoParams {
    pub fn with_lambda(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::default()
        }
    }
}

impl Default for LassoParams {
    fn default() -> Self {
        Self {
            lambda: 0.01,
            tolerance: 1e-6,
            max_sweeps: 100_000,
        }
    }
}

pub(crate) fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// One-hot regression per class, `min (1/2n)‖y − Xw − b‖² + λ‖w‖₁`, with an
/// unpenalised intercept. Solved by coordinate descent in a seeded random order.
pub fn train_lasso(train: &LabeledDataset, params: &LassoParams, seed: &RngSeed) -> Result<LinearModel> {
    if !(params.lambda >= 0.0) || !params.lambda.is_finite() {
        return Err(Error::Learner(format!("lasso needs lambda >= 0, got {}", params.lambda)));
    }
    require_classes(train)?;
    let classes = train.class_count();
    let (x_mean, xc) = centered(train.features());
    let y = one_hot(train.labels(), classes);
    let (y_mean, yc) = centered(&y);

    let n = xc.nrows() as f64;
    let col_sq: Vec<f64> = xc.column_iter().map(|c| c.norm_squared() / n).collect();
    let mut w = DMatrix::zeros(xc.ncols(), classes);
    let mut rng = seed.rng();
    let mut order: Vec<usize> = (0..xc.ncols()).collect();
    for k in 0..classes {
        let mut coef = DVector::zeros(xc.ncols());
        let mut residual = yc.column(k).into_owned();
        for _ in 0..params.max_sweeps {
            order.shuffle(&mut rng);
            let mut max_delta: f64 = 0.0;
            for &j in &order {
                if col_sq[j] == 0.0 {
                    continue;
                }
                let xj = xc.column(j);
                let old = coef[j];
                let rho = xj.dot(&residual) / n + col_sq[j] * old;
                let new = soft_threshold(rho, params.lambda) / col_sq[j];
                if new != old {
                    residual.axpy(old - new, &xj, 1.0);
                    coef[j] = new;
                    max_delta = max_delta.max((new - old).abs());
                }
            }
            if max_delta < params.tolerance {
                break;
            }
        }
        w.set_column(k, &coef);
    }
    let intercepts = y_mean - w.transpose() * x_mean;
    LinearModel::new(pack(&w, &intercepts), LinearKind::Lasso, params.lambda)
}
