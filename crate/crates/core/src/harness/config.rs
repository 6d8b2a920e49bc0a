use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::fixtures::SyntheticPreset;
use crate::dataset::{load_csv, pca_project, GaussianBlobSpec, LabeledDataset, SplitSpec};
use crate::error::{Error, Result};
use crate::learners::LearnerSpec;
use crate::noise::{NoiseKind, NoiseSpec};
use crate::rng::RngSeed;
use crate::sr::SrModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    EnhancedSweep,
    DimensionTable,
    Rectified,
    SrSweep,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::EnhancedSweep => "enhanced-sweep",
            ExperimentKind::DimensionTable => "dimension-table",
            ExperimentKind::Rectified => "rectified",
            ExperimentKind::SrSweep => "sr-sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum DatasetSource {
    Synthetic {
        preset: SyntheticPreset,
    },
    Csv {
        path: PathBuf,
        label_column: usize,
        #[serde(default)]
        has_header: bool,
        /// Used, and flagged in the report, when `path` does not exist.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fallback: Option<SyntheticPreset>,
    },
}

/// A dataset plus the preprocessing applied before any noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    #[serde(flatten)]
    pub source: DatasetSource,
    /// Min-max scale every feature to [0, 1].
    #[serde(default)]
    pub normalize: bool,
    /// Project onto this many principal components (after scaling).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pca_dims: Option<usize>,
    /// Principal components to negate after projection, for matching an
    /// external coordinate frame. Eigenvector signs are otherwise arbitrary.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pca_flip: Vec<usize>,
}

impl DatasetSpec {
    pub fn synthetic(preset: SyntheticPreset) -> Self {
        Self {
            source: DatasetSource::Synthetic { preset },
            normalize: false,
            pca_dims: None,
            pca_flip: Vec::new(),
        }
    }

    pub fn csv(path: impl Into<PathBuf>, label_column: usize, has_header: bool) -> Self {
        Self {
            source: DatasetSource::Csv {
                path: path.into(),
                label_column,
                has_header,
                fallback: None,
            },
            normalize: false,
            pca_dims: None,
            pca_flip: Vec::new(),
        }
    }

    pub fn with_fallback(mut self, preset: SyntheticPreset) -> Self {
        if let DatasetSource::Csv { fallback, .. } = &mut self.source {
            *fallback = Some(preset);
        }
        self
    }

    pub fn normalized(mut self) -> Self {
        self.normalize = true;
        self
    }

    pub fn with_pca(mut self, k: usize) -> Self {
        self.pca_dims = Some(k);
        self
    }

    pub fn with_pca_flip(mut self, components: &[usize]) -> Self {
        self.pca_flip = components.to_vec();
        self
    }

    /// Whether the data is resampled for every seed (synthetic sources).
    pub fn is_synthetic(&self) -> bool {
        match &self.source {
            DatasetSource::Synthetic { .. } => true,
            DatasetSource::Csv { path, fallback, .. } => fallback.is_some() && !path.exists(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pca_dims == Some(0) {
            return Err(Error::Config("pca_dims must be >= 1".into()));
        }
        if let Some(&c) = self.pca_flip.iter().find(|&&c| self.pca_dims.is_none_or(|k| c >= k)) {
            return Err(Error::Config(format!("pca_flip component {c} outside the projection")));
        }
        Ok(())
    }

    /// Loads (or generates, for synthetic sources) the dataset for one seed.
    pub fn materialize(&self, seed: &RngSeed) -> Result<(LabeledDataset, DatasetInfo)> {
        let (raw, source, fallback) = match &self.source {
            DatasetSource::Synthetic { preset } => (preset.generate(seed)?, format!("synthetic:{}", preset.name()), false),
            DatasetSource::Csv {
                path,
                label_column,
                has_header,
                fallback,
            } => match fallback {
                Some(preset) if !path.exists() => (preset.generate(seed)?, format!("synthetic:{}", preset.name()), true),
                _ => (load_csv(path, *label_column, *has_header)?, format!("csv:{}", path.display()), false),
            },
        };
        let mut preprocessing = Vec::new();
        let mut ds = raw;
        if self.normalize {
            ds = min_max(&ds)?;
            preprocessing.push("min-max to [0, 1]".to_string());
        }
        if let Some(k) = self.pca_dims {
            let name = ds.name().to_string();
            ds = pca_project(&ds, k)?.0.with_name(name);
            preprocessing.push(format!("pca to {k} dims"));
            if !self.pca_flip.is_empty() {
                let mut x = ds.features().clone();
                for &c in &self.pca_flip {
                    x.column_mut(c).neg_mut();
                }
                ds = ds.with_features(x)?;
                preprocessing.push(format!("negate components {:?}", self.pca_flip));
            }
        }
        let info = DatasetInfo {
            name: ds.name().to_string(),
            samples: ds.len(),
            features: ds.dim(),
            classes: ds.class_count(),
            source,
            synthetic_fallback: fallback,
            preprocessing,
        };
        Ok((ds, info))
    }
}

fn min_max(ds: &LabeledDataset) -> Result<LabeledDataset> {
    let x = ds.features();
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    for (j, col) in x.column_iter().enumerate() {
        let lo = col.min();
        let span = col.max() - lo;
        for i in 0..x.nrows() {
            // constant columns map to 0
            out[(i, j)] = if span > 0.0 { (col[i] - lo) / span } else { 0.0 };
        }
    }
    ds.with_features(out)
}

/// Dataset metadata echoed in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub name: String,
    pub samples: usize,
    pub features: usize,
    pub classes: usize,
    pub source: String,
    /// True when a missing CSV was replaced by a synthetic stand-in.
    pub synthetic_fallback: bool,
    pub preprocessing: Vec<String>,
}

/// Learner used by the rectified experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RectifiedLearner {
    Svm {
        #[serde(default = "default_c")]
        c: f64,
    },
    Kmeans,
    Lda,
}

fn default_c() -> f64 {
    1.0
}

impl RectifiedLearner {
    pub fn name(&self) -> &'static str {
        match self {
            RectifiedLearner::Svm { .. } => "svm",
            RectifiedLearner::Kmeans => "kmeans",
            RectifiedLearner::Lda => "lda",
        }
    }
}

/// original → + noisy instances → + rectifying instances → + excessive rectifying instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectifiedSpec {
    pub learner: RectifiedLearner,
    pub noise_blob: GaussianBlobSpec,
    pub rectify_blob: GaussianBlobSpec,
    /// The excessive stage holds this many times the rectifying count.
    #[serde(default = "default_multiplier")]
    pub excessive_multiplier: usize,
}

fn default_multiplier() -> usize {
    5
}

impl RectifiedSpec {
    pub fn validate(&self) -> Result<()> {
        if self.excessive_multiplier == 0 {
            return Err(Error::Config("excessive_multiplier must be >= 1".into()));
        }
        if let RectifiedLearner::Svm { c } = self.learner {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Config(format!("svm C must be > 0, got {c}")));
            }
        }
        for blob in [&self.noise_blob, &self.rectify_blob] {
            blob.factor().map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.noise_blob.dim() != self.rectify_blob.dim() {
            return Err(Error::Config("noise and rectifying blobs differ in dimension".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum SignalSpec {
    Constant { level: f64 },
    Sine { offset: f64, amplitude: f64, cycles: f64 },
    /// One value per line (last column), optional header.
    Csv {
        path: PathBuf,
        #[serde(default)]
        has_header: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrSweepSpec {
    pub signal: SignalSpec,
    #[serde(default = "default_points")]
    pub points: usize,
    pub threshold: f64,
    pub floor: f64,
    pub ceiling: f64,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_draws")]
    pub draws: usize,
    pub sigmas: Vec<f64>,
}

fn default_points() -> usize {
    100
}

fn default_bins() -> usize {
    64
}

fn default_draws() -> usize {
    1000
}

impl SrSweepSpec {
    pub fn model(&self) -> Result<SrModel> {
        let model = match &self.signal {
            SignalSpec::Constant { level } => SrModel::constant(*level, self.points, self.threshold, self.floor, self.ceiling)?,
            SignalSpec::Sine {
                offset,
                amplitude,
                cycles,
            } => SrModel::sine(*offset, *amplitude, *cycles, self.points, self.threshold, self.floor, self.ceiling)?,
            SignalSpec::Csv { path, has_header } => {
                let signal = read_signal(path, *has_header)?;
                let grid = (0..signal.len()).map(|t| t as f64).collect();
                SrModel::new(grid, signal, self.threshold, self.floor, self.ceiling)?
            }
        };
        let model = model.with_bins(self.bins).with_draws(self.draws);
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigmas.is_empty() {
            return Err(Error::Config("sr sigma list is empty".into()));
        }
        if self.sigmas.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::Config("sr sigmas must be finite and >= 0".into()));
        }
        if !matches!(self.signal, SignalSpec::Csv { .. }) {
            self.model().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }
}

fn read_signal(path: &Path, has_header: bool) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::EmptyInput(format!("{other:?}")),
        })?;
    let mut values = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1 + usize::from(has_header);
        let rec = rec.map_err(|e| Error::Ingestion {
            row,
            column: 1,
            message: e.to_string(),
        })?;
        let column = rec.len();
        let cell = rec.get(column.saturating_sub(1)).unwrap_or("").trim();
        let v: f64 = cell.parse().map_err(|_| Error::Ingestion {
            row,
            column,
            message: format!("cannot parse {cell:?} as a number"),
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput(format!("{} holds no signal values", path.display())));
    }
    Ok(values)
}

/// One experiment, as read from a JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub datasets: Vec<DatasetSpec>,
    #[serde(default)]
    pub noise: Vec<NoiseSpec>,
    #[serde(default)]
    pub learners: Vec<LearnerSpec>,
    #[serde(default = "default_ratios")]
    pub ratios: Vec<f64>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub split: SplitSpec,
    /// Dimension-noise widths; `0` is the no-noise control.
    #[serde(default)]
    pub dimension_widths: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rectified: Option<RectifiedSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sr: Option<SrSweepSpec>,
    /// Threshold for π-noise verdicts.
    #[serde(default)]
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// `{0.0, 0.05, …, 0.95}`.
pub fn default_ratios() -> Vec<f64> {
    (0..20).map(|i| i as f64 / 20.0).collect()
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, seeds: Vec<u64>) -> Self {
        Self {
            experiment,
            datasets: Vec::new(),
            noise: Vec::new(),
            learners: Vec::new(),
            ratios: default_ratios(),
            seeds,
            split: SplitSpec::default(),
            dimension_widths: Vec::new(),
            rectified: None,
            sr: None,
            alpha: 0.0,
            output_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks everything that can be checked without touching data files.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.seeds.is_empty() {
            return fail("at least one seed is required".into());
        }
        if let Some(r) = self.ratios.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return fail(format!("ratio {r} outside [0, 1]"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return fail(format!("alpha must be finite and >= 0, got {}", self.alpha));
        }
        if !(self.split.train_fraction > 0.0 && self.split.train_fraction < 1.0) {
            return fail(format!("train_fraction {} outside (0, 1)", self.split.train_fraction));
        }
        for d in &self.datasets {
            d.validate()?;
        }
        for n in &self.noise {
            n.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        for l in &self.learners {
            let ok = match *l {
                LearnerSpec::Svm { c } => c > 0.0 && c.is_finite(),
                LearnerSpec::Lasso { lambda } | LearnerSpec::Ridge { lambda } => lambda >= 0.0 && lambda.is_finite(),
            };
            if !ok {
                return fail(format!("invalid hyperparameter for {}", l.name()));
            }
        }
        let needs_data = |what: &str| -> Result<()> {
            if self.datasets.is_empty() {
                return Err(Error::Config(format!("{what} needs at least one dataset")));
            }
            Ok(())
        };
        match self.experiment {
            ExperimentKind::EnhancedSweep => {
                needs_data("enhanced-sweep")?;
                if self.noise.is_empty() || self.learners.is_empty() {
                    return fail("enhanced-sweep needs noise models and learners".into());
                }
                for n in &self.noise {
                    if !matches!(
                        n.kind,
                        NoiseKind::Multiplicative { .. } | NoiseKind::Gaussian { .. } | NoiseKind::Uniform { .. }
                    ) {
                        return fail(format!("enhanced-sweep does not accept {} noise", n.kind.name()));
                    }
                }
            }
            ExperimentKind::DimensionTable => {
                needs_data("dimension-table")?;
                if self.learners.is_empty() {
                    return fail("dimension-table needs learners".into());
                }
                if self.dimension_widths.is_empty() {
                    return fail("dimension-table needs dimension_widths".into());
                }
            }
            ExperimentKind::Rectified => {
                needs_data("rectified")?;
                match &self.rectified {
                    Some(r) => r.validate()?,
                    None => return fail("rectified experiment needs a `rectified` section".into()),
                }
            }
            ExperimentKind::SrSweep => match &self.sr {
                Some(s) => s.validate()?,
                None => return fail("sr-sweep needs an `sr` section".into()),
            },
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rectified_json() -> &'static str {
        r#"{
            "experiment": "rectified",
            "datasets": [{"source": "synthetic", "preset": "toy"}],
            "seeds": [0, 1],
            "rectified": {
                "learner": {"kind": "svm"},
                "noise_blob": {"mean": [0.5, 0.8], "covariance": [[0.001, 0], [0, 0.001]], "count": 20, "label": 0},
                "rectify_blob": {"mean": [0.8, 0.2], "covariance": [[0.001, 0], [0, 0.001]], "count": 20, "label": 1}
            }
        }"#
    }

    #[test]
    fn parses_with_defaults() {
        let cfg = ExperimentConfig::from_json(rectified_json()).unwrap();
        assert_eq!(cfg.ratios.len(), 20);
        assert_eq!(cfg.rectified.as_ref().unwrap().excessive_multiplier, 5);
        assert_eq!(cfg.rectified.as_ref().unwrap().learner, RectifiedLearner::Svm { c: 1.0 });
        let again = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn rejects_bad_grids() {
        let mut cfg = ExperimentConfig::from_json(rectified_json()).unwrap();
        cfg.seeds.clear();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let mut cfg = ExperimentConfig::from_json(rectified_json()).unwrap();
        cfg.ratios.push(1.5);
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let mut cfg = ExperimentConfig::from_json(rectified_json()).unwrap();
        cfg.rectified = None;
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::from_json("{\"experiment\": \"nope\", \"seeds\": [1]}").is_err());
    }

    #[test]
    fn enhanced_sweep_rejects_instance_noise() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::EnhancedSweep, vec![1]);
        cfg.datasets.push(DatasetSpec::synthetic(SyntheticPreset::Toy));
        cfg.learners.push(LearnerSpec::Svm { c: 1.0 });
        cfg.noise.push(NoiseSpec::new(NoiseKind::Dimension { m: 2 }, 1.0, RngSeed::default()));
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn missing_csv_uses_fallback() {
        let spec = DatasetSpec::csv("/nonexistent/cars.csv", 8, true).with_fallback(SyntheticPreset::CarsShape);
        let (ds, info) = spec.materialize(&RngSeed::root(1)).unwrap();
        assert!(info.synthetic_fallback);
        assert_eq!((ds.len(), ds.dim(), ds.class_count()), (392, 8, 3));
        let strict = DatasetSpec::csv("/nonexistent/cars.csv", 8, true);
        assert!(strict.materialize(&RngSeed::root(1)).unwrap_err().is_ingestion());
    }

    #[test]
    fn preprocessing_is_recorded() {
        let spec = DatasetSpec::synthetic(SyntheticPreset::IrisShape).normalized().with_pca(2);
        let (ds, info) = spec.materialize(&RngSeed::root(1)).unwrap();
        assert_eq!(ds.dim(), 2);
        assert_eq!(info.preprocessing.len(), 2);
        assert_eq!(ds.name(), "iris-shape");
    }
}
