//! Discrete entropy, mutual information and task entropy.
//!
//! Exact table computations double as oracles for the histogram plug-in
//! estimator. Everything is computed in nats and converted on output.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// Logarithm base of a reported quantity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Nats,
    Bits,
}

impl LogBase {
    /// Converts a value in nats to this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Nats => nats,
            LogBase::Bits => nats / std::f64::consts::LN_2,
        }
    }
}

/// `−p ln p` with the `0 · ln 0 = 0` convention.
fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

fn check_probabilities(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what} is empty")));
    }
    if let Some(bad) = p.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidDistribution(format!("{what} has entry {bad}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidDistribution(format!("{what} sums to {total}")));
    }
    Ok(())
}

/// Probability vector over a finite outcome set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    probabilities: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outcome_labels: Option<Vec<String>>,
}

impl DiscreteDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        check_probabilities(&probabilities, "distribution")?;
        Ok(Self {
            probabilities,
            outcome_labels: None,
        })
    }

    /// Normalises non-negative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution("weights must be non-negative with positive sum".into()));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDistribution("uniform over zero outcomes".into()));
        }
        Ok(Self {
            probabilities: vec![1.0 / k as f64; k],
            outcome_labels: None,
        })
    }

    pub fn point_mass(k: usize, at: usize) -> Result<Self> {
        if at >= k {
            return Err(Error::InvalidDistribution(format!("point mass at {at} outside {k} outcomes")));
        }
        let mut probabilities = vec![0.0; k];
        probabilities[at] = 1.0;
        Ok(Self {
            probabilities,
            outcome_labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.probabilities.len() {
            return Err(Error::LengthMismatch {
                left: self.probabilities.len(),
                right: labels.len(),
            });
        }
        self.outcome_labels = Some(labels);
        Ok(self)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn outcome_labels(&self) -> Option<&[String]> {
        self.outcome_labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

/// Joint probability table `p(x, y)`; rows index `x`, columns index `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteJoint {
    table: Vec<Vec<f64>>,
}

impl DiscreteJoint {
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self> {
        let cols = table.first().map_or(0, Vec::len);
        if cols == 0 || table.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidDistribution("joint table must be a non-empty rectangle".into()));
        }
        let flat: Vec<f64> = table.iter().flatten().copied().collect();
        check_probabilities(&flat, "joint table")?;
        Ok(Self { table })
    }

    /// Normalises a table of non-negative counts.
    pub fn from_counts(counts: &[Vec<f64>]) -> Result<Self> {
        let total: f64 = counts.iter().flatten().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidDistribution("count table has zero mass".into()));
        }
        Self::new(counts.iter().map(|r| r.iter().map(|c| c / total).collect()).collect())
    }

    /// `p(x) p(y)`.
    pub fn product(px: &DiscreteDistribution, py: &DiscreteDistribution) -> Self {
        Self {
            table: px
                .probabilities
                .iter()
                .map(|a| py.probabilities.iter().map(|b| a * b).collect())
                .collect(),
        }
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.table
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.table.len(), self.table[0].len())
    }

    pub fn transpose(&self) -> Self {
        let (r, c) = self.shape();
        Self {
            table: (0..c).map(|j| (0..r).map(|i| self.table[i][j]).collect()).collect(),
        }
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        self.table.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        let (_, c) = self.shape();
        (0..c).map(|j| self.table.iter().map(|r| r[j]).sum()).collect()
    }
}

/// Per-instance label posteriors `p(Y | X = x_i)` with instance weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskPosterior {
    rows: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl TaskPosterior {
    /// Uniform instance weights.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let weights = vec![1.0 / n.max(1) as f64; n];
        Self::weighted(rows, weights)
    }

    pub fn weighted(rows: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidDistribution("posterior has no instances".into()));
        }
        if rows.len() != weights.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: weights.len(),
            });
        }
        let c = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != c {
                return Err(Error::InvalidDistribution(format!("posterior row {i} has {} classes, expected {c}", r.len())));
            }
            check_probabilities(r, &format!("posterior row {i}"))?;
        }
        // n·ε rounding in the uniform weights is tolerated
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || (total - 1.0).abs() > SUM_TOL * rows.len() as f64 {
            return Err(Error::InvalidDistribution(format!("instance weights sum to {total}")));
        }
        Ok(Self { rows, weights })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MiMethod {
    Exact,
    HistogramPlugin,
    MonteCarlo,
}

/// Binning used by a histogram estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub bins_per_axis: Vec<usize>,
    /// Observed `(min, max)` per noise axis.
    pub axis_ranges: Vec<(f64, f64)>,
    /// Axes with `max == min`, collapsed to a single bin.
    pub collapsed_axes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiEstimate {
    /// Clamped at zero.
    pub value: f64,
    /// Value before clamping.
    pub raw_value: f64,
    pub unit: LogBase,
    pub method: MiMethod,
    /// Zero for exact computations.
    pub sample_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_spec: Option<BinSpec>,
}

/// `H(p) = −Σ p log p`.
pub fn entropy(p: &DiscreteDistribution, base: LogBase) -> f64 {
    base.from_nats(p.probabilities.iter().copied().map(plogp).sum())
}

/// `H(x | y) = −Σ p(x, y) log p(x | y)`.
pub fn conditional_entropy(j: &DiscreteJoint, base: LogBase) -> f64 {
    let py = j.marginal_y();
    let mut h = 0.0;
    for row in &j.table {
        for (&pxy, &pyj) in row.iter().zip(&py) {
            if pxy > 0.0 {
                h -= pxy * (pxy / pyj).ln();
            }
        }
    }
    base.from_nats(h.max(0.0))
}

/// `MI(x, y) = H(x) − H(x | y)`, clamped at zero.
pub fn mutual_information(j: &DiscreteJoint, base: LogBase) -> MiEstimate {
    let hx: f64 = j.marginal_x().into_iter().map(plogp).sum();
    let raw = hx - conditional_entropy(j, LogBase::Nats);
    MiEstimate {
        value: base.from_nats(raw.max(0.0)),
        raw_value: base.from_nats(raw),
        unit: base,
        method: MiMethod::Exact,
        sample_count: 0,
        bin_spec: None,
    }
}

/// Weighted mean over instances of the label-posterior entropy.
pub fn task_entropy(post: &TaskPosterior, base: LogBase) -> f64 {
    let h: f64 = post
        .rows
        .iter()
        .zip(&post.weights)
        .map(|(row, w)| w * row.iter().copied().map(plogp).sum::<f64>())
        .sum();
    base.from_nats(h)
}

/// Monte Carlo estimate of the expected task entropy over sampled datasets.
///
/// The expectation over `X` of the task entropy is the conditional entropy
/// `H(Y | X)`; this is the quantity returned.
pub fn expected_task_entropy(posts: &[TaskPosterior], base: LogBase) -> Result<f64> {
    if posts.is_empty() {
        return Err(Error::InvalidDistribution("no sampled posteriors".into()));
    }
    let total: f64 = posts.iter().map(|p| task_entropy(p, LogBase::Nats)).sum();
    Ok(base.from_nats(total / posts.len() as f64))
}

/// `⌈n^{1/3}⌉`, capped at 64.
pub fn default_bins(n: usize) -> usize {
    let mut b = 1usize;
    while b * b * b < n && b < 64 {
        b += 1;
    }
    b
}

/// Plug-in MI between integer labels and `k ≤ 3` real noise coordinates,
/// each binned into equal-width bins over its observed range.
pub fn estimate_mi_histogram(
    task_outcomes: &[usize],
    noise_samples: &DMatrix<f64>,
    bins: Option<usize>,
    base: LogBase,
) -> Result<MiEstimate> {
    let (n, k) = noise_samples.shape();
    if task_outcomes.len() != n {
        return Err(Error::LengthMismatch {
            left: task_outcomes.len(),
            right: n,
        });
    }
    if n == 0 {
        return Err(Error::InvalidDistribution("no samples".into()));
    }
    if k == 0 || k > 3 {
        return Err(Error::InvalidSpec(format!("histogram estimator supports 1 to 3 noise axes, got {k}")));
    }
    if noise_samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidDistribution("noise samples must be finite".into()));
    }
    let bins = bins.unwrap_or_else(|| default_bins(n));
    if bins == 0 || n < bins {
        return Err(Error::InvalidSpec(format!("need 1 <= bins <= n, got bins = {bins}, n = {n}")));
    }

    let mut bins_per_axis = Vec::with_capacity(k);
    let mut axis_ranges = Vec::with_capacity(k);
    let mut collapsed_axes = Vec::new();
    for a in 0..k {
        let col = noise_samples.column(a);
        let (lo, hi) = (col.min(), col.max());
        axis_ranges.push((lo, hi));
        if hi > lo {
            bins_per_axis.push(bins);
        } else {
            bins_per_axis.push(1);
            collapsed_axes.push(a);
        }
    }

    let cells: usize = bins_per_axis.iter().product();
    let classes = task_outcomes.iter().max().map_or(1, |m| m + 1);
    let mut counts = vec![vec![0.0; cells]; classes];
    for (i, &label) in task_outcomes.iter().enumerate() {
        let mut cell = 0;
        for a in 0..k {
            let b = bins_per_axis[a];
            let (lo, hi) = axis_ranges[a];
            let idx = if b == 1 {
                0
            } else {
                (((noise_samples[(i, a)] - lo) / (hi - lo) * b as f64) as usize).min(b - 1)
            };
            cell = cell * b + idx;
        }
        counts[label][cell] += 1.0;
    }
    let joint = DiscreteJoint::from_counts(&counts)?;
    let mut est = mutual_information(&joint, base);
    est.method = MiMethod::HistogramPlugin;
    est.sample_count = n;
    est.bin_spec = Some(BinSpec {
        bins_per_axis,
        axis_ranges,
        collapsed_axes,
    });
    Ok(est)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseVerdict {
    PiNoise,
    PureNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseClassification {
    pub verdict: NoiseVerdict,
    pub alpha: f64,
    /// True when judged against a positive threshold (α-strong).
    pub strong: bool,
    pub value: f64,
}

/// π-noise iff `MI > alpha`; pure noise at level `alpha` otherwise.
pub fn classify_noise(mi: &MiEstimate, alpha: f64) -> Result<NoiseClassification> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidSpec(format!("alpha must be finite and >= 0, got {alpha}")));
    }
    let verdict = if mi.value > alpha {
        NoiseVerdict::PiNoise
    } else {
        NoiseVerdict::PureNoise
    };
    Ok(NoiseClassification {
        verdict,
        alpha,
        strong: alpha > 0.0,
        value: mi.value,
    })
}
