use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::LabeledDataset;
use crate::error::{Error, Result};

/// Fitted principal axes.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaProjection {
    /// `d × k`, orthonormal columns ordered by decreasing variance.
    pub components: DMatrix<f64>,
    pub mean: DVector<f64>,
    /// Variance of the data along each component.
    pub explained_variance: Vec<f64>,
}

impl PcaProjection {
    pub fn fit(x: &DMatrix<f64>, k: usize) -> Result<Self> {
        let (n, d) = x.shape();
        if k == 0 || k > d {
            return Err(Error::DimensionMismatch { expected: d, found: k });
        }
        let mean = x.row_mean().transpose();
        let centered = center(x, &mean);
        let denom = (n.max(2) - 1) as f64;
        let cov = (centered.transpose() * &centered) / denom;
        let eig = SymmetricEigen::new(cov);

        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

        let mut components = DMatrix::zeros(d, k);
        let mut explained_variance = Vec::with_capacity(k);
        for (c, &idx) in order.iter().take(k).enumerate() {
            let mut v = eig.eigenvectors.column(idx).into_owned();
            // largest-magnitude entry non-negative
            let pivot = v.iter().copied().fold(0.0f64, |acc, e| if e.abs() > acc.abs() { e } else { acc });
            if pivot < 0.0 {
                v.neg_mut();
            }
            components.set_column(c, &v);
            explained_variance.push(eig.eigenvalues[idx].max(0.0));
        }
        Ok(Self {
            components,
            mean,
            explained_variance,
        })
    }

    pub fn transform(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.ncols() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                found: x.ncols(),
            });
        }
        Ok(center(x, &self.mean) * &self.components)
    }

    /// Maps projected coordinates back to the input space.
    pub fn inverse_transform(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        let mut x = z * self.components.transpose();
        for mut row in x.row_iter_mut() {
            row += self.mean.transpose();
        }
        x
    }
}

fn center(x: &DMatrix<f64>, mean: &DVector<f64>) -> DMatrix<f64> {
    let mut c = x.clone();
    for mut row in c.row_iter_mut() {
        row -= mean.transpose();
    }
    c
}

/// Centres the data and projects it onto its top `k` principal axes.
pub fn pca_project(ds: &LabeledDataset, k: usize) -> Result<(LabeledDataset, DMatrix<f64>)> {
    let pca = PcaProjection::fit(ds.features(), k)?;
    let projected = pca.transform(ds.features())?;
    Ok((ds.with_features(projected)?, pca.components))
}
