use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::RngSeed;

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-12;

/// `count` points from `N(mean, covariance)`, all labelled `label`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianBlobSpec {
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub count: usize,
    pub label: usize,
}

impl GaussianBlobSpec {
    /// Diagonal covariance `variance · I`.
    pub fn isotropic(mean: Vec<f64>, variance: f64, count: usize, label: usize) -> Self {
        let d = mean.len();
        let covariance = (0..d)
            .map(|i| (0..d).map(|j| if i == j { variance } else { 0.0 }).collect())
            .collect();
        Self {
            mean,
            covariance,
            count,
            label,
        }
    }

    /// Axis-aligned covariance `diag(variances)`.
    pub fn diagonal(mean: Vec<f64>, variances: &[f64], count: usize, label: usize) -> Self {
        let d = mean.len();
        let covariance = (0..d)
            .map(|i| (0..d).map(|j| if i == j { variances[i] } else { 0.0 }).collect())
            .collect();
        Self {
            mean,
            covariance,
            count,
            label,
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn with_count(&self, count: usize) -> Self {
        Self {
            count,
            ..self.clone()
        }
    }

    /// Checks shape, symmetry and positive semi-definiteness; returns a
    /// factor `L` with `L Lᵀ = covariance`.
    pub fn factor(&self) -> Result<DMatrix<f64>> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::InvalidSpec("blob mean is empty".into()));
        }
        if self.mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("blob mean is not finite".into()));
        }
        if self.covariance.len() != d || self.covariance.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidSpec(format!("covariance must be {d}x{d}")));
        }
        let cov = DMatrix::from_fn(d, d, |i, j| self.covariance[i][j]);
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("covariance is not finite".into()));
        }
        for i in 0..d {
            for j in 0..i {
                if (cov[(i, j)] - cov[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidSpec(format!(
                        "covariance not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let eig = SymmetricEigen::new(cov);
        if let Some(min) = eig.eigenvalues.iter().copied().reduce(f64::min) {
            if min < -PSD_TOL {
                return Err(Error::InvalidSpec(format!(
                    "covariance not positive semi-definite (eigenvalue {min:e})"
                )));
            }
        }
        let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
        Ok(&eig.eigenvectors * DMatrix::from_diagonal(&roots))
    }

    /// Draws the blob's points as rows of a `count × d` matrix.
    pub fn sample(&self, seed: &RngSeed) -> Result<DMatrix<f64>> {
        let factor = self.factor()?;
        let d = self.dim();
        let mean = DVector::from_column_slice(&self.mean);
        let mut rng = seed.rng();
        let mut out = DMatrix::zeros(self.count, d);
        let mut z = DVector::zeros(d);
        for i in 0..self.count {
            for v in z.iter_mut() {
                *v = StandardNormal.sample(&mut rng);
            }
            let x = &mean + &factor * &z;
            out.set_row(i, &x.transpose());
        }
        Ok(out)
    }
}

/// Concatenates independent draws from each blob, in order. Class count is
/// one more than the largest label.
pub fn generate_blobs(specs: &[GaussianBlobSpec], seed: &RngSeed) -> Result<LabeledDataset> {
    let first = specs
        .first()
        .ok_or_else(|| Error::InvalidSpec("no blobs given".into()))?;
    let d = first.dim();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (j, spec) in specs.iter().enumerate() {
        if spec.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: spec.dim(),
            });
        }
        if spec.count == 0 {
            return Err(Error::InvalidSpec(format!("blob {j} has zero count")));
        }
        let block = spec.sample(&seed.derive(format!("blob{j}")))?;
        for r in 0..block.nrows() {
            rows.push(block.row(r).iter().copied().collect::<Vec<_>>());
            labels.push(spec.label);
        }
    }
    let class_count = labels.iter().max().map_or(1, |m| m + 1);
    LabeledDataset::from_rows("blobs", &rows, labels, class_count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_shape() {
        let ds = generate_blobs(
            &[
                GaussianBlobSpec::isotropic(vec![0.3, 0.3], 0.01, 100, 0),
                GaussianBlobSpec::isotropic(vec![0.7, 0.7], 0.01, 100, 1),
            ],
            &RngSeed::root(1),
        )
        .unwrap();
        assert_eq!((ds.len(), ds.dim(), ds.class_count()), (200, 2, 2));
        assert_eq!(ds.class_counts(), vec![100, 100]);
    }

    #[test]
    fn zero_covariance_repeats_mean() {
        let spec = GaussianBlobSpec::isotropic(vec![1.5, -2.0], 0.0, 5, 0);
        let ds = generate_blobs(&[spec], &RngSeed::root(3)).unwrap();
        for i in 0..5 {
            assert_eq!(ds.row(i), vec![1.5, -2.0]);
        }
    }

    #[test]
    fn sample_mean_converges() {
        let spec = GaussianBlobSpec::isotropic(vec![0.0, 0.0], 1.0, 10_000, 0);
        let ds = generate_blobs(&[spec], &RngSeed::new(11, "lln")).unwrap();
        for j in 0..2 {
            let mean = ds.features().column(j).mean();
            assert!(mean.abs() < 0.05, "coordinate {j} mean {mean}");
        }
    }

    #[test]
    fn rejects_non_psd_and_asymmetric() {
        let mut spec = GaussianBlobSpec::isotropic(vec![0.0, 0.0], 1.0, 3, 0);
        spec.covariance = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(matches!(
            generate_blobs(&[spec.clone()], &RngSeed::root(0)),
            Err(Error::InvalidSpec(_))
        ));
        spec.covariance = vec![vec![1.0, 0.1], vec![0.0, 1.0]];
        assert!(matches!(
            generate_blobs(&[spec], &RngSeed::root(0)),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn deterministic_per_seed() {
        let specs = [GaussianBlobSpec::isotropic(vec![0.0; 3], 1.0, 20, 0)];
        let a = generate_blobs(&specs, &RngSeed::new(5, "a")).unwrap();
        let b = generate_blobs(&specs, &RngSeed::new(5, "a")).unwrap();
        let c = generate_blobs(&specs, &RngSeed::new(5, "b")).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn correlated_covariance_is_reproduced() {
        let mut spec = GaussianBlobSpec::isotropic(vec![0.0, 0.0], 1.0, 20_000, 0);
        spec.covariance = vec![vec![1.0, 0.8], vec![0.8, 1.0]];
        let ds = generate_blobs(&[spec], &RngSeed::root(9)).unwrap();
        let x = ds.features();
        let n = x.nrows() as f64;
        let cov01 = x.column(0).dot(&x.column(1)) / n;
        assert!((cov01 - 0.8).abs() < 0.05, "{cov01}");
    }
}
