//! Feature-level and instance-level noise injectors.
//!
//! Salt-and-pepper, Gaussian and uniform noise corrupt a `ratio` fraction of
//! rows in place. Dimension noise appends `sgn(P u)` to every row. Instance
//! noise appends labelled points drawn from a Gaussian blob.

use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::dataset::{generate_blobs, GaussianBlobSpec, LabeledDataset};
use crate::error::{Error, Result};
use crate::rng::RngSeed;

/// Closed interval of legal feature values, e.g. `[0, 255]` for 8-bit pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueRange {
    pub min_value: f64,
    pub max_value: f64,
}

impl ValueRange {
    pub fn new(min_value: f64, max_value: f64) -> Result<Self> {
        let r = Self { min_value, max_value };
        r.validate()?;
        Ok(r)
    }

    pub fn unit() -> Self {
        Self {
            min_value: 0.0,
            max_value: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_value.is_finite() && self.max_value.is_finite() && self.max_value > self.min_value) {
            return Err(Error::InvalidSpec(format!(
                "value range [{}, {}] must satisfy max > min",
                self.min_value, self.max_value
            )));
        }
        Ok(())
    }

    fn width(&self) -> f64 {
        self.max_value - self.min_value
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min_value && v <= self.max_value
    }
}

impl Default for ValueRange {
    fn default() -> Self {
        Self {
            min_value: 0.0,
            max_value: 255.0,
        }
    }
}

/// One noise model with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseKind {
    /// Salt-and-pepper: each coordinate of a corrupted row is set to the
    /// range minimum or maximum with probability `degree`.
    Multiplicative {
        degree: f64,
        #[serde(default)]
        range: ValueRange,
    },
    Gaussian {
        mu: f64,
        sigma: f64,
        #[serde(default)]
        range: ValueRange,
    },
    Uniform {
        low: f64,
        high: f64,
        #[serde(default)]
        range: ValueRange,
    },
    Dimension { m: usize },
    Instance { blob: GaussianBlobSpec },
}

impl NoiseKind {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::Multiplicative { .. } => "multiplicative",
            NoiseKind::Gaussian { .. } => "gaussian",
            NoiseKind::Uniform { .. } => "uniform",
            NoiseKind::Dimension { .. } => "dimension",
            NoiseKind::Instance { .. } => "instance",
        }
    }
}

fn default_ratio() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(flatten)]
    pub kind: NoiseKind,
    /// Fraction of rows corrupted, `p = N_ε / N`. Ignored by dimension and instance noise.
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    #[serde(default)]
    pub seed: RngSeed,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, ratio: f64, seed: RngSeed) -> Self {
        Self { kind, ratio, seed }
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("ratio", self.ratio)?;
        match &self.kind {
            NoiseKind::Multiplicative { degree, range } => {
                check_unit("degree", *degree)?;
                range.validate()
            }
            NoiseKind::Gaussian { mu, sigma, range } => {
                if !mu.is_finite() || !sigma.is_finite() || *sigma < 0.0 {
                    return Err(Error::InvalidSpec(format!("gaussian noise needs finite mu and sigma >= 0, got ({mu}, {sigma})")));
                }
                range.validate()
            }
            NoiseKind::Uniform { low, high, range } => {
                if !(low.is_finite() && high.is_finite() && high > low) {
                    return Err(Error::InvalidSpec(format!("uniform noise needs high > low, got [{low}, {high}]")));
                }
                range.validate()
            }
            NoiseKind::Dimension { m } => {
                if *m == 0 {
                    return Err(Error::InvalidSpec("dimension noise needs m >= 1".into()));
                }
                Ok(())
            }
            NoiseKind::Instance { blob } => blob.factor().map(|_| ()),
        }
    }

    pub fn apply(&self, ds: &LabeledDataset) -> Result<LabeledDataset> {
        self.validate()?;
        let seed = &self.seed;
        match &self.kind {
            NoiseKind::Multiplicative { degree, range } => apply_salt_pepper(ds, *degree, *range, self.ratio, seed),
            NoiseKind::Gaussian { mu, sigma, range } => apply_gaussian(ds, *mu, *sigma, *range, self.ratio, seed),
            NoiseKind::Uniform { low, high, range } => apply_uniform(ds, *low, *high, *range, self.ratio, seed),
            NoiseKind::Dimension { m } => apply_dimension_noise(ds, *m, seed),
            NoiseKind::Instance { blob } => inject_instances(ds, blob, seed),
        }
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidSpec(format!("{name} {v} outside [0, 1]")));
    }
    Ok(())
}

/// `round(ratio · n)` distinct row indices, ascending.
pub fn select_rows(n: usize, ratio: f64, seed: &RngSeed) -> Result<Vec<usize>> {
    check_unit("ratio", ratio)?;
    let k = ((ratio * n as f64) + 0.5).floor() as usize;
    let mut rng = seed.derive("rows").rng();
    let mut rows = index::sample(&mut rng, n, k.min(n)).into_vec();
    rows.sort_unstable();
    Ok(rows)
}

fn corrupt_rows<F>(ds: &LabeledDataset, ratio: f64, seed: &RngSeed, mut corrupt: F) -> Result<LabeledDataset>
where
    F: FnMut(f64, &mut rand_chacha::ChaCha8Rng) -> f64,
{
    let rows = select_rows(ds.len(), ratio, seed)?;
    let mut x = ds.features().clone();
    let mut rng = seed.derive("values").rng();
    for &i in &rows {
        for j in 0..x.ncols() {
            x[(i, j)] = corrupt(x[(i, j)], &mut rng);
        }
    }
    ds.with_features(x)
}

/// Salt-and-pepper corruption of `round(ratio · n)` rows.
pub fn apply_salt_pepper(
    ds: &LabeledDataset,
    degree: f64,
    range: ValueRange,
    ratio: f64,
    seed: &RngSeed,
) -> Result<LabeledDataset> {
    check_unit("degree", degree)?;
    range.validate()?;
    corrupt_rows(ds, ratio, seed, |u, rng| {
        if degree > 0.0 && rng.random_bool(degree) {
            if rng.random_bool(0.5) {
                range.max_value
            } else {
                range.min_value
            }
        } else {
            u
        }
    })
}

/// Normalise to `[0, 1]`, add `eps`, clip, map back. A zero draw leaves the value untouched.
fn additive(u: f64, eps: f64, range: ValueRange) -> f64 {
    if eps == 0.0 && range.contains(u) {
        return u;
    }
    let v = ((u - range.min_value) / range.width() + eps).clamp(0.0, 1.0);
    range.min_value + v * range.width()
}

/// Additive `N(mu, sigma²)` noise in normalised units on `round(ratio · n)` rows.
pub fn apply_gaussian(
    ds: &LabeledDataset,
    mu: f64,
    sigma: f64,
    range: ValueRange,
    ratio: f64,
    seed: &RngSeed,
) -> Result<LabeledDataset> {
    range.validate()?;
    let normal = Normal::new(mu, sigma)
        .map_err(|e| Error::InvalidSpec(format!("gaussian noise ({mu}, {sigma}): {e}")))?;
    corrupt_rows(ds, ratio, seed, |u, rng| additive(u, normal.sample(rng), range))
}

/// Additive `U(low, high)` noise in normalised units on `round(ratio · n)` rows.
pub fn apply_uniform(
    ds: &LabeledDataset,
    low: f64,
    high: f64,
    range: ValueRange,
    ratio: f64,
    seed: &RngSeed,
) -> Result<LabeledDataset> {
    range.validate()?;
    let uniform = Uniform::new(low, high)
        .map_err(|e| Error::InvalidSpec(format!("uniform noise [{low}, {high}): {e}")))?;
    corrupt_rows(ds, ratio, seed, |u, rng| additive(u, uniform.sample(rng), range))
}

/// `x / |x|` for nonzero `x`, else 0.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Random map `P` (`m × d`, entries i.i.d. `U[0, 1)`) shared by every row.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionNoise {
    pub projection: DMatrix<f64>,
}

impl DimensionNoise {
    pub fn sample(d: usize, m: usize, seed: &RngSeed) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidSpec("dimension noise needs m >= 1".into()));
        }
        let mut rng = seed.derive("projection").rng();
        let projection = DMatrix::from_fn(m, d, |_, _| rng.random::<f64>());
        Ok(Self { projection })
    }

    pub fn width(&self) -> usize {
        self.projection.nrows()
    }

    /// Every row `u` becomes `[u, sgn(P u)]`.
    pub fn apply(&self, ds: &LabeledDataset) -> Result<LabeledDataset> {
        let d = ds.dim();
        if self.projection.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: self.projection.ncols(),
                found: d,
            });
        }
        let appended = (ds.features() * self.projection.transpose()).map(sgn);
        let m = self.width();
        let x = DMatrix::from_fn(ds.len(), d + m, |i, j| {
            if j < d {
                ds.features()[(i, j)]
            } else {
                appended[(i, j - d)]
            }
        });
        ds.with_features(x)
    }
}

pub fn apply_dimension_noise(ds: &LabeledDataset, m: usize, seed: &RngSeed) -> Result<LabeledDataset> {
    DimensionNoise::sample(ds.dim(), m, seed)?.apply(ds)
}

/// Appends `blob.count` points drawn from the blob with label `blob.label`.
pub fn inject_instances(ds: &LabeledDataset, blob: &GaussianBlobSpec, seed: &RngSeed) -> Result<LabeledDataset> {
    if blob.dim() != ds.dim() {
        return Err(Error::DimensionMismatch {
            expected: ds.dim(),
            found: blob.dim(),
        });
    }
    if blob.label >= ds.class_count() {
        return Err(Error::InvalidSpec(format!(
            "instance label {} not below class count {}",
            blob.label,
            ds.class_count()
        )));
    }
    if blob.count == 0 {
        blob.factor()?;
        return Ok(ds.clone());
    }
    let extra = generate_blobs(std::slice::from_ref(blob), &seed.derive("instances"))?;
    ds.concat(&extra)
}
