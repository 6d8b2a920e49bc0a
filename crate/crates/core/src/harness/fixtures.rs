use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{generate_blobs, GaussianBlobSpec, LabeledDataset};
use crate::error::Result;
use crate::rng::RngSeed;

/// Built-in synthetic datasets.
///
/// The `*-shape` presets are offline stand-ins for UCI files: they match the
/// sample, feature and class counts of the real data but not its values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticPreset {
    /// Two isotropic blobs at (0.3, 0.3) and (0.7, 0.7), variance 0.01, 100 points each.
    Toy,
    /// Two blobs at (0.3, 0.3) and (1.3, 0.3), variance 0.01, 100 points each.
    LdaToy,
    /// Two informative coordinates plus 40 low-variance distractors, values in [0, 1].
    NuisanceBackground,
    /// A disc inside a ring, centred at (1, −1). Not linearly separable.
    ConcentricRings,
    IrisShape,
    WineShape,
    CarsShape,
    BalanceShape,
    AustralianShape,
    BreastShape,
    DiabetesShape,
}

/// Distractor count of [`SyntheticPreset::NuisanceBackground`].
pub const NUISANCE_DISTRACTORS: usize = 40;
/// Points per class of [`SyntheticPreset::NuisanceBackground`].
pub const NUISANCE_PER_CLASS: usize = 300;

impl SyntheticPreset {
    pub fn name(&self) -> &'static str {
        match self {
            SyntheticPreset::Toy => "toy",
            SyntheticPreset::LdaToy => "lda-toy",
            SyntheticPreset::NuisanceBackground => "nuisance-background",
            SyntheticPreset::ConcentricRings => "concentric-rings",
            SyntheticPreset::IrisShape => "iris-shape",
            SyntheticPreset::WineShape => "wine-shape",
            SyntheticPreset::CarsShape => "cars-shape",
            SyntheticPreset::BalanceShape => "balance-shape",
            SyntheticPreset::AustralianShape => "australian-shape",
            SyntheticPreset::BreastShape => "breast-shape",
            SyntheticPreset::DiabetesShape => "diabetes-shape",
        }
    }

    /// `(samples, features, classes)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        match self {
            SyntheticPreset::Toy | SyntheticPreset::LdaToy | SyntheticPreset::ConcentricRings => (200, 2, 2),
            SyntheticPreset::NuisanceBackground => (2 * NUISANCE_PER_CLASS, 2 + NUISANCE_DISTRACTORS, 2),
            SyntheticPreset::IrisShape => (150, 4, 3),
            SyntheticPreset::WineShape => (178, 13, 3),
            SyntheticPreset::CarsShape => (392, 8, 3),
            SyntheticPreset::BalanceShape => (624, 4, 3),
            SyntheticPreset::AustralianShape => (690, 14, 2),
            SyntheticPreset::BreastShape => (699, 10, 2),
            SyntheticPreset::DiabetesShape => (768, 8, 2),
        }
    }

    pub fn generate(&self, seed: &RngSeed) -> Result<LabeledDataset> {
        let ds = match self {
            SyntheticPreset::Toy => generate_blobs(
                &[
                    GaussianBlobSpec::isotropic(vec![0.3, 0.3], 0.01, 100, 0),
                    GaussianBlobSpec::isotropic(vec![0.7, 0.7], 0.01, 100, 1),
                ],
                seed,
            )?,
            SyntheticPreset::LdaToy => generate_blobs(
                &[
                    GaussianBlobSpec::isotropic(vec![0.3, 0.3], 0.01, 100, 0),
                    GaussianBlobSpec::isotropic(vec![1.3, 0.3], 0.01, 100, 1),
                ],
                seed,
            )?,
            SyntheticPreset::NuisanceBackground => nuisance_background(seed)?,
            SyntheticPreset::ConcentricRings => concentric_rings(seed)?,
            SyntheticPreset::IrisShape => from_class_stats(IRIS, seed)?,
            SyntheticPreset::WineShape => from_class_stats(WINE, seed)?,
            _ => generic_shape(self.shape(), seed)?,
        };
        Ok(ds.with_name(self.name()))
    }
}

fn nuisance_background(seed: &RngSeed) -> Result<LabeledDataset> {
    let d = 2 + NUISANCE_DISTRACTORS;
    let specs: Vec<_> = (0..2)
        .map(|label| {
            let shift = if label == 0 { -0.15 } else { 0.15 };
            let mut mean = vec![0.5; d];
            let mut var = vec![0.03 * 0.03; d];
            for j in 0..2 {
                mean[j] += shift;
                var[j] = 0.12 * 0.12;
            }
            GaussianBlobSpec::diagonal(mean, &var, NUISANCE_PER_CLASS, label)
        })
        .collect();
    let ds = generate_blobs(&specs, seed)?;
    let clipped = ds.features().map(|v| v.clamp(0.0, 1.0));
    ds.with_features(clipped)
}

fn concentric_rings(seed: &RngSeed) -> Result<LabeledDataset> {
    let mut rng = seed.rng();
    let mut rows = Vec::with_capacity(200);
    let mut labels = Vec::with_capacity(200);
    for (label, (lo, hi)) in [(0.0, 0.5), (0.8, 1.0)].into_iter().enumerate() {
        for _ in 0..100 {
            let angle = rng.random::<f64>() * TAU;
            let radius = lo + (hi - lo) * rng.random::<f64>();
            rows.push(vec![1.0 + radius * angle.cos(), -1.0 + radius * angle.sin()]);
            labels.push(label);
        }
    }
    LabeledDataset::from_rows("concentric-rings", &rows, labels, 2)
}

/// Per-class `(count, means, standard deviations)`.
type ClassStats<'a> = &'a [(usize, &'a [f64], &'a [f64])];

const IRIS: ClassStats<'static> = &[
    (50, &[5.006, 3.428, 1.462, 0.246], &[0.352, 0.379, 0.174, 0.105]),
    (50, &[5.936, 2.770, 4.260, 1.326], &[0.516, 0.314, 0.470, 0.198]),
    (50, &[6.588, 2.974, 5.552, 2.026], &[0.636, 0.322, 0.552, 0.275]),
];

const WINE: ClassStats<'static> = &[
    (
        59,
        &[13.74, 2.01, 2.46, 17.04, 106.3, 2.84, 2.98, 0.29, 1.90, 5.53, 1.06, 3.16, 1116.0],
        &[0.46, 0.69, 0.23, 2.55, 10.5, 0.34, 0.40, 0.07, 0.41, 1.24, 0.12, 0.36, 221.0],
    ),
    (
        71,
        &[12.28, 1.93, 2.24, 20.24, 94.5, 2.26, 2.08, 0.36, 1.63, 3.09, 1.06, 2.79, 520.0],
        &[0.54, 1.02, 0.32, 3.35, 16.8, 0.55, 0.71, 0.12, 0.60, 0.92, 0.20, 0.50, 158.0],
    ),
    (
        48,
        &[13.15, 3.33, 2.44, 21.42, 99.3, 1.68, 0.78, 0.45, 1.15, 7.40, 0.68, 1.68, 630.0],
        &[0.53, 1.09, 0.18, 2.26, 10.9, 0.36, 0.29, 0.12, 0.41, 2.31, 0.11, 0.27, 115.0],
    ),
];

fn from_class_stats(stats: ClassStats<'_>, seed: &RngSeed) -> Result<LabeledDataset> {
    let specs: Vec<_> = stats
        .iter()
        .enumerate()
        .map(|(label, (count, mean, sd))| {
            let var: Vec<f64> = sd.iter().map(|s| s * s).collect();
            GaussianBlobSpec::diagonal(mean.to_vec(), &var, *count, label)
        })
        .collect();
    generate_blobs(&specs, seed)
}

/// Unit-variance class blobs whose means are drawn once per shape.
fn generic_shape((n, d, c): (usize, usize, usize), seed: &RngSeed) -> Result<LabeledDataset> {
    // means depend on the shape only, so every seed samples the same task
    let mut rng = RngSeed::new(0, format!("shape/{n}x{d}x{c}")).rng();
    let normal = Normal::new(0.0, 0.5).expect("valid normal");
    let specs: Vec<_> = (0..c)
        .map(|label| {
            let mean: Vec<f64> = (0..d).map(|_| normal.sample(&mut rng)).collect();
            let count = n / c + usize::from(label < n % c);
            GaussianBlobSpec::isotropic(mean, 1.0, count, label)
        })
        .collect();
    generate_blobs(&specs, seed)
}
