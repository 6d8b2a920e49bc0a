use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};

/// Relative eigenvalue floor below which the within-class scatter is treated as singular.
const SINGULAR_RATIO: f64 = 1e-10;
/// Ridge added to a singular scatter, relative to its mean eigenvalue.
const RIDGE_SCALE: f64 = 1e-6;

/// Fisher direction for a two-class problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaProjection {
    /// Unit vector `∝ S_w⁻¹ (μ₁ − μ₀)`.
    pub direction: DVector<f64>,
    /// Row `c` is the mean of class `c`.
    pub class_means: DMatrix<f64>,
    /// Projected midpoint of the class means.
    pub threshold: f64,
    /// The scatter was singular and a ridge was added before solving.
    pub regularized: bool,
}

impl LdaProjection {
    pub fn project(&self, x: &DMatrix<f64>) -> DVector<f64> {
        x * &self.direction
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<usize> {
        self.project(x).iter().map(|&p| usize::from(p > self.threshold)).collect()
    }
}

pub fn train_lda(train: &LabeledDataset) -> Result<LdaProjection> {
    if train.class_count() != 2 {
        return Err(Error::Learner(format!("LDA needs exactly 2 classes, got {}", train.class_count())));
    }
    let counts = train.class_counts();
    if counts.iter().any(|&c| c < 2) {
        return Err(Error::Learner(format!("LDA needs at least 2 samples per class, got {counts:?}")));
    }
    let x = train.features();
    let d = x.ncols();
    let mut means = DMatrix::zeros(2, d);
    for (r, &l) in x.row_iter().zip(train.labels()) {
        let mut row = means.row_mut(l);
        row += r;
    }
    for c in 0..2 {
        let mut row = means.row_mut(c);
        row /= counts[c] as f64;
    }
    let mut scatter = DMatrix::zeros(d, d);
    for (r, &l) in x.row_iter().zip(train.labels()) {
        let dev = (r - means.row(l)).transpose();
        scatter += &dev * dev.transpose();
    }

    let eig = SymmetricEigen::new(scatter.clone());
    let max_eig = eig.eigenvalues.amax();
    let min_eig = eig.eigenvalues.min();
    let regularized = !(min_eig > SINGULAR_RATIO * max_eig);
    if regularized {
        let ridge = if max_eig > 0.0 {
            RIDGE_SCALE * scatter.trace() / d as f64
        } else {
            RIDGE_SCALE
        };
        scatter += DMatrix::identity(d, d) * ridge;
    }
    let diff = (means.row(1) - means.row(0)).transpose();
    let raw = scatter
        .cholesky()
        .ok_or_else(|| Error::Learner("within-class scatter not positive definite".into()))?
        .solve(&diff);
    let norm = raw.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Learner("class means coincide; no discriminant direction".into()));
    }
    let direction = raw / norm;
    let midpoint = (means.row(0) + means.row(1)).transpose() * 0.5;
    let threshold = direction.dot(&midpoint);
    Ok(LdaProjection {
        direction,
        class_means: means,
        threshold,
        regularized,
    })
}

/// Angle in degrees between the lines spanned by `a` and `b`, in `[0, 90]`.
pub fn angle_between_degrees(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let cos = (a.dot(b) / (a.norm() * b.norm())).abs().min(1.0);
    cos.acos().to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_blobs, GaussianBlobSpec};
    use crate::rng::RngSeed;

    fn lda_toy(seed: u64) -> LabeledDataset {
        generate_blobs(
            &[
                GaussianBlobSpec::isotropic(vec![0.3, 0.3], 0.01, 100, 0),
                GaussianBlobSpec::isotropic(vec![1.3, 0.3], 0.01, 100, 1),
            ],
            &RngSeed::root(seed),
        )
        .unwrap()
    }

    #[test]
    fn toy_direction_near_x_axis() {
        // population S_w ∝ I and μ₁ − μ₀ = (1, 0), so the exact direction is the
        // x-axis; a large sample keeps the estimation error well under 2°
        let ds = generate_blobs(
            &[
                GaussianBlobSpec::isotropic(vec![0.3, 0.3], 0.01, 5000, 0),
                GaussianBlobSpec::isotropic(vec![1.3, 0.3], 0.01, 5000, 1),
            ],
            &RngSeed::root(1),
        )
        .unwrap();
        let p = train_lda(&ds).unwrap();
        let x_axis = DVector::from_vec(vec![1.0, 0.0]);
        assert!(angle_between_degrees(&p.direction, &x_axis) < 2.0);
        assert!((p.direction.norm() - 1.0).abs() < 1e-10);
        assert!(!p.regularized);
    }

    #[test]
    fn isotropic_scatter_follows_mean_difference() {
        // each class is a symmetric cross, so S_w = 4·I exactly
        let cross = |cx: f64, cy: f64| vec![vec![cx + 1.0, cy], vec![cx - 1.0, cy], vec![cx, cy + 1.0], vec![cx, cy - 1.0]];
        let mut rows = cross(0.0, 0.0);
        rows.extend(cross(3.0, 4.0));
        let ds = LabeledDataset::from_rows("c", &rows, vec![0, 0, 0, 0, 1, 1, 1, 1], 2).unwrap();
        let p = train_lda(&ds).unwrap();
        assert!((p.direction[0] - 0.6).abs() < 1e-12);
        assert!((p.direction[1] - 0.8).abs() < 1e-12);
        assert!((p.threshold - 2.5).abs() < 1e-12);
        assert_eq!(p.predict(&DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 3.0, 4.0])), vec![0, 1]);
    }

    #[test]
    fn duplicated_column_is_regularized() {
        let base = lda_toy(2);
        let x = base.features();
        let dup = DMatrix::from_fn(x.nrows(), 3, |i, j| x[(i, j.min(1))]);
        let ds = base.with_features(dup).unwrap();
        let p = train_lda(&ds).unwrap();
        assert!(p.regularized);
        assert!(p.direction.iter().all(|v| v.is_finite()));
        let preds = p.predict(ds.features());
        let acc = preds.iter().zip(ds.labels()).filter(|(a, b)| a == b).count();
        assert!(acc >= 195);
    }

    #[test]
    fn scale_invariant_predictions() {
        let ds = lda_toy(3);
        let p = train_lda(&ds).unwrap();
        let scaled = ds.with_features(ds.features() * 37.5).unwrap();
        let q = train_lda(&scaled).unwrap();
        let probe = DMatrix::from_row_slice(3, 2, &[0.8, 0.1, 0.79, 0.9, 0.81, -0.4]);
        assert_eq!(p.predict(&probe), q.predict(&(probe.clone() * 37.5)));
    }

    #[test]
    fn needs_two_classes() {
        let ds = LabeledDataset::from_rows("o", &[vec![0.0], vec![1.0], vec![2.0]], vec![0, 0, 0], 2).unwrap();
        assert!(train_lda(&ds).is_err());
        let ds = LabeledDataset::from_rows("o", &[vec![0.0], vec![1.0]], vec![0, 1], 3).unwrap();
        assert!(train_lda(&ds).is_err());
    }

    #[test]
    fn angles() {
        let a = DVector::from_vec(vec![1.0, 0.0]);
        assert!((angle_between_degrees(&a, &DVector::from_vec(vec![-1.0, 0.0]))).abs() < 1e-12);
        assert!((angle_between_degrees(&a, &DVector::from_vec(vec![0.0, 2.0])) - 90.0).abs() < 1e-12);
        assert!((angle_between_degrees(&a, &DVector::from_vec(vec![1.0, 1.0])) - 45.0).abs() < 1e-9);
    }
}
