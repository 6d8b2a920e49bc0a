use nalgebra::DMatrix;

use super::{centered, one_hot, pack, require_classes, LinearKind, LinearModel};
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};

/// Closed-form regularised least squares on one-hot targets with an
/// unpenalised intercept: `W = (XcᵀXc + λI)⁻¹ XcᵀY`. At `λ = 0` the
/// pseudo-inverse gives the minimum-norm solution.
pub fn train_ridge(train: &LabeledDataset, lambda: f64) -> Result<LinearModel> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Learner(format!("ridge needs lambda >= 0, got {lambda}")));
    }
    require_classes(train)?;
    let classes = train.class_count();
    let (x_mean, xc) = centered(train.features());
    let y = one_hot(train.labels(), classes);
    let y_mean = y.row_mean().transpose();
    let d = xc.ncols();

    let gram = xc.transpose() * &xc + DMatrix::identity(d, d) * lambda;
    let rhs = xc.transpose() * &y;
    let w = if lambda > 0.0 {
        gram.cholesky()
            .ok_or_else(|| Error::Learner("ridge normal equations not positive definite".into()))?
            .solve(&rhs)
    } else {
        gram.svd(true, true)
            .solve(&rhs, 1e-12)
            .map_err(|e| Error::Learner(format!("least-squares solve failed: {e}")))?
    };
    let intercepts = y_mean - w.transpose() * x_mean;
    LinearModel::new(pack(&w, &intercepts), LinearKind::Ridge, lambda)
}
