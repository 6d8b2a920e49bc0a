use std::time::Instant;

use nalgebra::DMatrix;

use super::config::{DatasetInfo, ExperimentConfig, ExperimentKind, RectifiedLearner};
use super::report::{Cell, ExperimentReport, MiRecord, SrRecord, StageDataset};
use crate::dataset::{classification_accuracy, clustering_accuracy, split, LabeledDataset};
use crate::entropy::{classify_noise, estimate_mi_histogram, LogBase, MiEstimate, MiMethod};
use crate::error::{Error, Result};
use crate::learners::{angle_between_degrees, kmeans, predict, train_lda, train_svm, KMeansParams, SvmParams};
use crate::noise::{inject_instances, DimensionNoise, NoiseSpec};
use crate::rng::RngSeed;
use crate::sr::sr_sigma_sweep;

pub const STAGE_NAMES: [&str; 4] = ["original", "noisy", "rectified", "excessive"];

/// Validates the config and runs the experiment it names.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    match cfg.experiment {
        ExperimentKind::EnhancedSweep => run_enhanced_sweep(cfg),
        ExperimentKind::DimensionTable => run_dimension_table(cfg),
        ExperimentKind::Rectified => run_rectified(cfg),
        ExperimentKind::SrSweep => run_sr_sweep(cfg),
    }
}

fn start(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<ExperimentReport> {
    if cfg.experiment != kind {
        return Err(Error::Config(format!(
            "config describes a {} experiment, not {}",
            cfg.experiment.name(),
            kind.name()
        )));
    }
    cfg.validate()?;
    Ok(ExperimentReport::new(cfg.clone()))
}

fn finish(mut report: ExperimentReport, clock: Instant) -> ExperimentReport {
    report.aggregate();
    report.wall_clock_seconds = clock.elapsed().as_secs_f64();
    report
}

/// Materialises dataset `index` for one seed; synthetic data is redrawn per seed.
fn dataset_for(
    cfg: &ExperimentConfig,
    index: usize,
    root: &RngSeed,
    report: &mut ExperimentReport,
) -> Result<LabeledDataset> {
    let (ds, info) = cfg.datasets[index].materialize(&root.derive(format!("data{index}")))?;
    record_dataset(report, info);
    Ok(ds)
}

fn record_dataset(report: &mut ExperimentReport, info: DatasetInfo) {
    if !report.datasets.iter().any(|d| d.name == info.name && d.source == info.source) {
        if info.synthetic_fallback {
            report
                .notes
                .push(format!("{}: data file missing, ran the synthetic fallback {}", info.name, info.source));
        }
        report.datasets.push(info);
    }
}

fn accuracy_of(labels: &[usize], predicted: &[usize]) -> Result<f64> {
    classification_accuracy(predicted, labels)
}

/// Corrupts a fraction `p` of training rows and scores each learner on the
/// untouched test split.
///
/// The noise stream depends on the noise model but not on `p`, so the rows
/// corrupted at a lower ratio are a subset of those at a higher one.
pub fn run_enhanced_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let clock = Instant::now();
    let mut report = start(cfg, ExperimentKind::EnhancedSweep)?;
    report
        .notes
        .push("test splits are never corrupted; accuracy is measured on the clean test split".into());
    for di in 0..cfg.datasets.len() {
        for &seed in &cfg.seeds {
            let root = RngSeed::root(seed);
            let ds = dataset_for(cfg, di, &root, &mut report)?;
            let (train, test) = split(&ds, &cfg.split, &root.derive(format!("split{di}")))?;
            for (ni, noise) in cfg.noise.iter().enumerate() {
                for &ratio in &cfg.ratios {
                    let spec = NoiseSpec::new(noise.kind.clone(), ratio, root.derive(format!("noise{di}/{ni}")));
                    let noisy = spec.apply(&train)?;
                    for learner in &cfg.learners {
                        let model = learner.fit(&noisy, &root.derive(format!("learner/{}", learner.name())))?;
                        let value = accuracy_of(test.labels(), &predict(&model, &test)?)?;
                        report.cells.push(Cell {
                            dataset: ds.name().to_string(),
                            learner: learner.name().into(),
                            noise: noise.kind.name().into(),
                            parameter: "ratio".into(),
                            level: ratio,
                            stage: None,
                            seed,
                            metric: "accuracy".into(),
                            value,
                            baseline: None,
                        });
                    }
                }
            }
        }
    }
    Ok(finish(report, clock))
}

/// Baseline accuracy against accuracy with `m` appended `sgn(Pu)` features.
///
/// One projection `P` per (dataset, seed, m) is shared by the train and test
/// splits. `m = 0` reuses the baseline unchanged.
pub fn run_dimension_table(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let clock = Instant::now();
    let mut report = start(cfg, ExperimentKind::DimensionTable)?;
    if cfg.learners.iter().any(|l| l.name() == "ridge") {
        report
            .notes
            .push("ridge least squares on one-hot targets stands in for DLSR".into());
    }
    for di in 0..cfg.datasets.len() {
        for &seed in &cfg.seeds {
            let root = RngSeed::root(seed);
            let ds = dataset_for(cfg, di, &root, &mut report)?;
            let (train, test) = split(&ds, &cfg.split, &root.derive(format!("split{di}")))?;
            let mut baselines = Vec::with_capacity(cfg.learners.len());
            for learner in &cfg.learners {
                let model = learner.fit(&train, &root.derive(format!("learner/{}", learner.name())))?;
                baselines.push(accuracy_of(test.labels(), &predict(&model, &test)?)?);
            }
            for &m in &cfg.dimension_widths {
                let augmented = if m == 0 {
                    None
                } else {
                    let p = DimensionNoise::sample(ds.dim(), m, &root.derive(format!("projection{di}/m{m}")))?;
                    let (tr, te) = (p.apply(&train)?, p.apply(&test)?);
                    let mi = appended_mi(&tr, ds.dim(), m)?;
                    report.mi_estimates.push(MiRecord {
                        dataset: ds.name().to_string(),
                        noise: "dimension".into(),
                        parameter: "m".into(),
                        level: m as f64,
                        seed,
                        classification: classify_noise(&mi, cfg.alpha)?,
                        estimate: mi,
                    });
                    Some((tr, te))
                };
                for (li, learner) in cfg.learners.iter().enumerate() {
                    let value = match &augmented {
                        None => baselines[li],
                        Some((tr, te)) => {
                            let model = learner.fit(tr, &root.derive(format!("learner/{}", learner.name())))?;
                            accuracy_of(te.labels(), &predict(&model, te)?)?
                        }
                    };
                    report.cells.push(Cell {
                        dataset: ds.name().to_string(),
                        learner: learner.name().into(),
                        noise: "dimension".into(),
                        parameter: "m".into(),
                        level: m as f64,
                        stage: None,
                        seed,
                        metric: "accuracy".into(),
                        value,
                        baseline: Some(baselines[li]),
                    });
                }
            }
        }
    }
    Ok(finish(report, clock))
}

/// Plug-in MI between the labels and the first (up to three) appended sign features.
fn appended_mi(train: &LabeledDataset, d: usize, m: usize) -> Result<MiEstimate> {
    let k = m.min(3);
    let x = train.features();
    let block = DMatrix::from_fn(x.nrows(), k, |i, j| x[(i, d + j)]);
    estimate_mi_histogram(train.labels(), &block, None, LogBase::Nats)
}

/// The four nested stage datasets of a rectified run.
pub fn rectified_stages(ds: &LabeledDataset, cfg: &super::config::RectifiedSpec, root: &RngSeed) -> Result<[LabeledDataset; 4]> {
    let noisy = inject_instances(ds, &cfg.noise_blob, &root.derive("noise-blob"))?;
    let rectified = inject_instances(&noisy, &cfg.rectify_blob, &root.derive("rectify-blob"))?;
    let extra = cfg.rectify_blob.count * (cfg.excessive_multiplier - 1);
    let excessive = inject_instances(&rectified, &cfg.rectify_blob.with_count(extra), &root.derive("excessive-blob"))?;
    Ok([ds.clone(), noisy, rectified, excessive])
}

/// Trains the configured learner on each stage and scores it on that stage.
///
/// SVM reports training accuracy, K-Means clustering accuracy, and LDA the
/// angle in degrees between the stage direction and the original direction.
pub fn run_rectified(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let clock = Instant::now();
    let mut report = start(cfg, ExperimentKind::Rectified)?;
    let spec = cfg.rectified.as_ref().expect("validated");
    report.notes.push(format!(
        "excessive stage holds {}x the rectifying instances",
        spec.excessive_multiplier
    ));
    for di in 0..cfg.datasets.len() {
        for &seed in &cfg.seeds {
            let root = RngSeed::root(seed);
            let ds = dataset_for(cfg, di, &root, &mut report)?;
            let stages = rectified_stages(&ds, spec, &root.derive(format!("stages{di}")))?;
            let mut clean_direction = None;
            for (i, stage) in stages.iter().enumerate() {
                let (metric, value) = match spec.learner {
                    RectifiedLearner::Svm { c } => {
                        let model = train_svm(stage, &SvmParams::with_c(c), &root.derive("learner/svm"))?;
                        ("accuracy", accuracy_of(stage.labels(), &predict(&model, stage)?)?)
                    }
                    RectifiedLearner::Kmeans => {
                        let k = stage.class_count();
                        let (_, assign) = kmeans(stage, &KMeansParams::new(k), &root.derive("learner/kmeans"))?;
                        ("clustering-accuracy", clustering_accuracy(&assign, stage.labels(), k)?)
                    }
                    RectifiedLearner::Lda => {
                        let lda = train_lda(stage)?;
                        let reference = clean_direction.get_or_insert_with(|| lda.direction.clone());
                        ("angle-deg", angle_between_degrees(&lda.direction, reference))
                    }
                };
                report.cells.push(Cell {
                    dataset: ds.name().to_string(),
                    learner: spec.learner.name().into(),
                    noise: "instance".into(),
                    parameter: "stage".into(),
                    level: i as f64,
                    stage: Some(STAGE_NAMES[i].into()),
                    seed,
                    metric: metric.into(),
                    value,
                    baseline: None,
                });
                report.stage_datasets.push(StageDataset {
                    file_stem: format!("{}_seed{seed}_stage{i}_{}", ds.name(), STAGE_NAMES[i]),
                    data: stage.clone(),
                });
            }
        }
    }
    Ok(finish(report, clock))
}

/// Entropy with and without Gaussian dither across a σ list, per seed.
pub fn run_sr_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let clock = Instant::now();
    let mut report = start(cfg, ExperimentKind::SrSweep)?;
    let spec = cfg.sr.as_ref().expect("validated");
    let model = spec.model()?;
    report.notes.push(format!(
        "{} time points, {} amplitude bins, {} draws per point; entropies in nats",
        model.signal.len(),
        model.amplitude_bins,
        model.mc_draws
    ));
    for &seed in &cfg.seeds {
        for r in sr_sigma_sweep(&model, &spec.sigmas, &RngSeed::root(seed).derive("sr"))? {
            let lower = r.mi - r.mc_tolerance;
            let est = MiEstimate {
                value: lower.max(0.0),
                raw_value: lower,
                unit: LogBase::Nats,
                method: MiMethod::MonteCarlo,
                sample_count: spec.draws * model.signal.len(),
                bin_spec: None,
            };
            report.cells.push(Cell {
                dataset: "signal".into(),
                learner: "none".into(),
                noise: "gaussian".into(),
                parameter: "sigma".into(),
                level: r.sigma,
                stage: None,
                seed,
                metric: "mi-nats".into(),
                value: r.mi,
                baseline: None,
            });
            report.sr_sweeps.push(SrRecord {
                seed,
                report: r,
                classification: classify_noise(&est, cfg.alpha)?,
            });
        }
    }
    Ok(finish(report, clock))
}
