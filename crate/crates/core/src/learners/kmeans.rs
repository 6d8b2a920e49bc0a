use nalgebra::{DMatrix, RowDVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::RngSeed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KMeansParams {
    pub k: usize,
    pub max_iter: usize,
}

impl KMeansParams {
    pub fn new(k: usize) -> Self {
        Self { k, max_iter: 300 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansModel {
    /// `k × d`.
    pub centroids: DMatrix<f64>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
    pub iterations: usize,
    /// Inertia after each assignment step.
    pub inertia_history: Vec<f64>,
}

impl KMeansModel {
    /// Nearest centroid per row; ties go to the lowest index.
    pub fn assign(&self, x: &DMatrix<f64>) -> Vec<usize> {
        assign(x, &self.centroids).0
    }
}

fn sq_dist(a: &RowDVector<f64>, b: &RowDVector<f64>) -> f64 {
    (a - b).norm_squared()
}

fn assign(x: &DMatrix<f64>, centroids: &DMatrix<f64>) -> (Vec<usize>, f64) {
    let mut labels = Vec::with_capacity(x.nrows());
    let mut inertia = 0.0;
    for r in x.row_iter() {
        let r = r.into_owned();
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (c, cent) in centroids.row_iter().enumerate() {
            let d = sq_dist(&r, &cent.into_owned());
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        labels.push(best);
        inertia += best_d;
    }
    (labels, inertia)
}

/// Cluster means; an empty cluster keeps its previous centroid.
fn update(x: &DMatrix<f64>, labels: &[usize], previous: &DMatrix<f64>) -> DMatrix<f64> {
    let k = previous.nrows();
    let mut sums = DMatrix::zeros(k, x.ncols());
    let mut counts = vec![0usize; k];
    for (r, &l) in x.row_iter().zip(labels) {
        let mut row = sums.row_mut(l);
        row += r;
        counts[l] += 1;
    }
    for c in 0..k {
        if counts[c] == 0 {
            sums.set_row(c, &previous.row(c));
        } else {
            let mut row = sums.row_mut(c);
            row /= counts[c] as f64;
        }
    }
    sums
}

/// k-means++ seeding: first centre uniform, the rest with probability ∝ D².
fn plus_plus(x: &DMatrix<f64>, k: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let n = x.nrows();
    let rows: Vec<RowDVector<f64>> = x.row_iter().map(|r| r.into_owned()).collect();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = rows.iter().map(|r| sq_dist(r, &rows[chosen[0]])).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total has a positive entry")
        } else {
            // every remaining point coincides with a centre
            (0..n).find(|i| !chosen.contains(i)).expect("k <= n")
        };
        chosen.push(next);
        for (i, r) in rows.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(r, &rows[next]));
        }
    }
    DMatrix::from_fn(k, x.ncols(), |c, j| x[(chosen[c], j)])
}

/// Lloyd iterations from a k-means++ start until the assignment stops
/// changing or `max_iter` is reached.
pub fn kmeans(ds: &LabeledDataset, params: &KMeansParams, seed: &RngSeed) -> Result<(KMeansModel, Vec<usize>)> {
    let k = params.k;
    let x = ds.features();
    if k == 0 || k > x.nrows() {
        return Err(Error::Learner(format!("k = {k} must be in 1..={}", x.nrows())));
    }
    let mut rng = seed.rng();
    let mut centroids = plus_plus(x, k, &mut rng);
    let (mut labels, inertia) = assign(x, &centroids);
    let mut history = vec![inertia];
    let mut iterations = 0;
    while iterations < params.max_iter {
        iterations += 1;
        centroids = update(x, &labels, &centroids);
        let (next, inertia) = assign(x, &centroids);
        debug_assert!(
            inertia <= history.last().unwrap() * (1.0 + 1e-12) + 1e-12,
            "inertia increased: {inertia} after {:?}",
            history.last()
        );
        history.push(inertia);
        if next == labels {
            break;
        }
        labels = next;
    }
    let inertia = *history.last().unwrap();
    Ok((
        KMeansModel {
            centroids,
            inertia,
            iterations,
            inertia_history: history,
        },
        labels,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{clustering_accuracy, generate_blobs, GaussianBlobSpec};

    fn toy(seed: u64) -> LabeledDataset {
        generate_blobs(
            &[
                GaussianBlobSpec::isotropic(vec![0.3, 0.3], 0.01, 100, 0),
                GaussianBlobSpec::isotropic(vec![0.7, 0.7], 0.01, 100, 1),
            ],
            &RngSeed::root(seed),
        )
        .unwrap()
    }

    #[test]
    fn clusters_toy() {
        let ds = toy(4);
        let (_, a) = kmeans(&ds, &KMeansParams::new(2), &RngSeed::root(0)).unwrap();
        assert_eq!(clustering_accuracy(&a, ds.labels(), 2).unwrap(), 1.0);
    }

    #[test]
    fn k_equals_n() {
        let ds = toy(5).select(&(0..12).collect::<Vec<_>>()).unwrap();
        let (m, _) = kmeans(&ds, &KMeansParams::new(12), &RngSeed::root(0)).unwrap();
        assert_eq!(m.inertia, 0.0);
    }

    #[test]
    fn k_one_is_global_mean() {
        let ds = toy(6);
        let (m, a) = kmeans(&ds, &KMeansParams::new(1), &RngSeed::root(0)).unwrap();
        assert!(a.iter().all(|&c| c == 0));
        let mean = ds.features().row_mean();
        assert!((m.centroids.row(0) - &mean).amax() < 1e-12);
        // Σ‖x − x̄‖² = n · (sum of per-coordinate population variances)
        let n = ds.len() as f64;
        let total: f64 = ds.features().column_iter().map(|c| c.variance() * n).sum();
        assert!((m.inertia - total).abs() < 1e-9 * total);
    }

    #[test]
    fn inertia_non_increasing_and_deterministic() {
        let ds = generate_blobs(
            &[
                GaussianBlobSpec::isotropic(vec![0.0, 0.0], 1.0, 80, 0),
                GaussianBlobSpec::isotropic(vec![2.0, 0.5], 1.0, 80, 1),
                GaussianBlobSpec::isotropic(vec![0.5, 2.5], 1.0, 80, 2),
            ],
            &RngSeed::root(7),
        )
        .unwrap();
        let (m, a) = kmeans(&ds, &KMeansParams::new(5), &RngSeed::root(1)).unwrap();
        assert!(m.inertia_history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let (m2, a2) = kmeans(&ds, &KMeansParams::new(5), &RngSeed::root(1)).unwrap();
        assert_eq!((m, a), (m2, a2));
    }

    #[test]
    fn duplicate_points() {
        let ds = LabeledDataset::from_rows("d", &[vec![1.0], vec![1.0], vec![1.0]], vec![0; 3], 1).unwrap();
        let (m, _) = kmeans(&ds, &KMeansParams::new(3), &RngSeed::root(0)).unwrap();
        assert_eq!(m.inertia, 0.0);
    }

    #[test]
    fn k_above_n_rejected() {
        let ds = LabeledDataset::from_rows("d", &[vec![1.0]], vec![0], 1).unwrap();
        assert!(kmeans(&ds, &KMeansParams::new(2), &RngSeed::root(0)).is_err());
    }
}
