use crate::error::{Error, Result};

/// Largest cluster count scored by enumerating every bijection.
pub const EXHAUSTIVE_CLUSTER_LIMIT: usize = 8;

/// Fraction of positions where `predicted` equals `truth`.
pub fn classification_accuracy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::InvalidDataset("accuracy of an empty label vector".into()));
    }
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Best accuracy over all one-to-one maps from cluster ids to labels.
pub fn clustering_accuracy(assignments: &[usize], truth: &[usize], k: usize) -> Result<f64> {
    if assignments.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: assignments.len(),
            right: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::InvalidDataset("accuracy of an empty label vector".into()));
    }
    if let Some(&a) = assignments.iter().find(|&&a| a >= k) {
        return Err(Error::InvalidSpec(format!("cluster id {a} not below k = {k}")));
    }
    let c = truth.iter().max().map_or(0, |m| m + 1);
    let size = k.max(c);
    let mut counts = vec![vec![0i64; size]; size];
    for (&a, &t) in assignments.iter().zip(truth) {
        counts[a][t] += 1;
    }
    let matched = if size <= EXHAUSTIVE_CLUSTER_LIMIT {
        best_matching_exhaustive(&counts)
    } else {
        best_matching_hungarian(&counts)
    };
    Ok(matched as f64 / truth.len() as f64)
}

/// Maximum of `Σ counts[i][π(i)]` over permutations, by enumeration (Heap's algorithm).
pub(crate) fn best_matching_exhaustive(counts: &[Vec<i64>]) -> i64 {
    let n = counts.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let score = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| counts[i][j]).sum::<i64>();
    let mut best = score(&perm);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.max(score(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// Maximum-weight perfect matching via the O(n³) Hungarian method.
pub(crate) fn best_matching_hungarian(counts: &[Vec<i64>]) -> i64 {
    let n = counts.len();
    if n == 0 {
        return 0;
    }
    let max = counts.iter().flatten().copied().max().unwrap_or(0);
    // minimise cost = max - weight; 1-based potentials
    let cost = |i: usize, j: usize| max - counts[i - 1][j - 1];
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| counts[p[j] - 1][j - 1]).sum()
}
