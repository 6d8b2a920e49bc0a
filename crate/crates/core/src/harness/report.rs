use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::{DatasetInfo, ExperimentConfig, ExperimentKind};
use super::svg::{LineChart, Series};
use crate::dataset::{write_csv, LabeledDataset};
use crate::entropy::{MiEstimate, NoiseClassification};
use crate::error::{Error, Result};
use crate::sr::SrEntropyReport;

/// One grid point for one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub dataset: String,
    pub learner: String,
    pub noise: String,
    /// Name of the swept parameter: `ratio`, `m`, `stage` or `sigma`.
    pub parameter: String,
    pub level: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    pub seed: u64,
    /// `accuracy`, `clustering-accuracy`, `angle-deg` or `mi-nats`.
    pub metric: String,
    pub value: f64,
    /// No-noise control for the same seed (dimension table ACC column).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<f64>,
}

/// Statistics over seeds for one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub dataset: String,
    pub learner: String,
    pub noise: String,
    pub parameter: String,
    pub level: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    pub metric: String,
    pub count: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_median: Option<f64>,
}

impl Aggregate {
    fn same_point(&self, c: &Cell) -> bool {
        self.dataset == c.dataset
            && self.learner == c.learner
            && self.noise == c.noise
            && self.parameter == c.parameter
            && self.level == c.level
            && self.stage == c.stage
            && self.metric == c.metric
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiRecord {
    pub dataset: String,
    pub noise: String,
    pub parameter: String,
    pub level: f64,
    pub seed: u64,
    pub estimate: MiEstimate,
    pub classification: NoiseClassification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrRecord {
    pub seed: u64,
    #[serde(flatten)]
    pub report: SrEntropyReport,
    /// Judged on `mi − mc_tolerance`, so Monte Carlo noise alone never yields π-noise.
    pub classification: NoiseClassification,
}

/// A dataset produced during a run, written out by [`emit_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct StageDataset {
    pub file_stem: String,
    pub data: LabeledDataset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentKind,
    pub config: ExperimentConfig,
    pub datasets: Vec<DatasetInfo>,
    pub cells: Vec<Cell>,
    pub aggregates: Vec<Aggregate>,
    #[serde(default)]
    pub mi_estimates: Vec<MiRecord>,
    #[serde(default)]
    pub sr_sweeps: Vec<SrRecord>,
    #[serde(default)]
    pub notes: Vec<String>,
    /// The only field that differs between identical runs.
    pub wall_clock_seconds: f64,
    #[serde(skip)]
    pub stage_datasets: Vec<StageDataset>,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig) -> Self {
        Self {
            experiment: config.experiment,
            config,
            datasets: Vec::new(),
            cells: Vec::new(),
            aggregates: Vec::new(),
            mi_estimates: Vec::new(),
            sr_sweeps: Vec::new(),
            notes: Vec::new(),
            wall_clock_seconds: 0.0,
            stage_datasets: Vec::new(),
        }
    }

    /// Recomputes `aggregates` from `cells`, in order of first appearance.
    pub fn aggregate(&mut self) {
        let mut groups: Vec<(Aggregate, Vec<f64>, Vec<f64>)> = Vec::new();
        for c in &self.cells {
            let pos = groups.iter().position(|(a, _, _)| a.same_point(c));
            let idx = pos.unwrap_or_else(|| {
                groups.push((
                    Aggregate {
                        dataset: c.dataset.clone(),
                        learner: c.learner.clone(),
                        noise: c.noise.clone(),
                        parameter: c.parameter.clone(),
                        level: c.level,
                        stage: c.stage.clone(),
                        metric: c.metric.clone(),
                        count: 0,
                        median: 0.0,
                        q1: 0.0,
                        q3: 0.0,
                        iqr: 0.0,
                        baseline_median: None,
                    },
                    Vec::new(),
                    Vec::new(),
                ));
                groups.len() - 1
            });
            groups[idx].1.push(c.value);
            if let Some(b) = c.baseline {
                groups[idx].2.push(b);
            }
        }
        self.aggregates = groups
            .into_iter()
            .map(|(mut a, values, baselines)| {
                a.count = values.len();
                a.median = quantile(&values, 0.5);
                a.q1 = quantile(&values, 0.25);
                a.q3 = quantile(&values, 0.75);
                a.iqr = a.q3 - a.q1;
                a.baseline_median = (!baselines.is_empty()).then(|| quantile(&baselines, 0.5));
                a
            })
            .collect();
    }

    /// Aggregates matching the given labels, in grid order.
    pub fn find<'a>(&'a self, dataset: &'a str, learner: &'a str, noise: &'a str) -> impl Iterator<Item = &'a Aggregate> + 'a {
        self.aggregates
            .iter()
            .filter(move |a| a.dataset == dataset && a.learner == learner && a.noise == noise)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut r: Self = serde_json::from_str(text)?;
        if r.aggregates.is_empty() {
            r.aggregate();
        }
        Ok(r)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// One row per cell.
    pub fn cells_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::InvalidSpec(format!("csv: {e}"));
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for c in &self.cells {
            w.write_record([
                c.dataset.clone(),
                c.learner.clone(),
                c.noise.clone(),
                c.parameter.clone(),
                c.level.to_string(),
                c.stage.clone().unwrap_or_default(),
                c.seed.to_string(),
                c.metric.clone(),
                c.value.to_string(),
                c.baseline.map(|b| b.to_string()).unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidSpec(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// One row per (seed, σ) of an SR sweep; `None` for other experiments.
    pub fn sr_csv(&self) -> Option<String> {
        if self.sr_sweeps.is_empty() {
            return None;
        }
        let mut out = String::from(
            "seed,sigma,h_unconditioned,h_conditioned,mi,supra_fraction,std_error,mc_tolerance,verdict\n",
        );
        for r in &self.sr_sweeps {
            let e = &r.report;
            let verdict = serde_json::to_value(r.classification.verdict).ok();
            let verdict = verdict.as_ref().and_then(|v| v.as_str()).unwrap_or("");
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.seed,
                e.sigma,
                e.h_unconditioned,
                e.h_conditioned,
                e.mi,
                e.supra_fraction,
                e.std_error,
                e.mc_tolerance,
                verdict
            ));
        }
        Some(out)
    }

    /// Line charts of the aggregate medians.
    pub fn charts(&self) -> Vec<(String, LineChart)> {
        match self.experiment {
            ExperimentKind::EnhancedSweep => {
                let mut noises: Vec<&str> = Vec::new();
                for a in &self.aggregates {
                    if !noises.contains(&a.noise.as_str()) {
                        noises.push(&a.noise);
                    }
                }
                noises
                    .into_iter()
                    .map(|noise| {
                        let chart = LineChart::new(format!("{noise} noise"), "noisy ratio p", "median test accuracy")
                            .with_series(self.series_by(|a| a.noise == noise, |a| format!("{} / {}", a.dataset, a.learner)));
                        (format!("accuracy_vs_ratio_{noise}"), chart)
                    })
                    .collect()
            }
            ExperimentKind::DimensionTable => {
                let mut series = self.series_by(|_| true, |a| format!("{} / {} Pi-ACC", a.dataset, a.learner));
                let mut base = Vec::new();
                for s in &series {
                    let label = s.label.replace("Pi-ACC", "ACC");
                    let points = self
                        .aggregates
                        .iter()
                        .filter(|a| format!("{} / {} Pi-ACC", a.dataset, a.learner) == s.label)
                        .filter_map(|a| a.baseline_median.map(|b| (a.level, b)))
                        .collect();
                    base.push(Series::dashed(label, points));
                }
                series.extend(base);
                vec![(
                    "accuracy_vs_m".into(),
                    LineChart::new("dimension noise", "appended width m", "median test accuracy").with_series(series),
                )]
            }
            ExperimentKind::Rectified => {
                let metric = self.aggregates.first().map(|a| a.metric.clone()).unwrap_or_else(|| "accuracy".into());
                vec![(
                    "stages".into(),
                    LineChart::new("rectified noise stages", "stage", format!("median {metric}"))
                        .with_series(self.series_by(|_| true, |a| format!("{} / {}", a.dataset, a.learner))),
                )]
            }
            ExperimentKind::SrSweep => {
                let mut h = Vec::new();
                let mut hc = Vec::new();
                let mut sigmas: Vec<f64> = Vec::new();
                for r in &self.sr_sweeps {
                    if !sigmas.contains(&r.report.sigma) {
                        sigmas.push(r.report.sigma);
                        let same: Vec<&SrRecord> = self.sr_sweeps.iter().filter(|x| x.report.sigma == r.report.sigma).collect();
                        let med = |f: fn(&SrEntropyReport) -> f64| quantile(&same.iter().map(|x| f(&x.report)).collect::<Vec<_>>(), 0.5);
                        h.push((r.report.sigma, med(|x| x.h_unconditioned)));
                        hc.push((r.report.sigma, med(|x| x.h_conditioned)));
                    }
                }
                let mut series = self.series_by(|_| true, |_| "MI".into());
                series.push(Series::dashed("H(T)", h));
                series.push(Series::dashed("H(T | noise)", hc));
                vec![(
                    "entropy_vs_sigma".into(),
                    LineChart::new("stochastic resonance", "noise sigma", "entropy (nats)").with_series(series),
                )]
            }
        }
    }

    fn series_by(&self, keep: impl Fn(&Aggregate) -> bool, label: impl Fn(&Aggregate) -> String) -> Vec<Series> {
        let mut out: Vec<Series> = Vec::new();
        for a in self.aggregates.iter().filter(|a| keep(a)) {
            let l = label(a);
            match out.iter_mut().find(|s| s.label == l) {
                Some(s) => s.points.push((a.level, a.median)),
                None => out.push(Series::solid(l, vec![(a.level, a.median)])),
            }
        }
        out
    }
}

pub const CSV_HEADER: [&str; 10] = [
    "dataset", "learner", "noise", "parameter", "level", "stage", "seed", "metric", "value", "baseline",
];

/// Linear-interpolation quantile of unsorted values; NaN when empty.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Svg,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "svg" => Ok(ReportFormat::Svg),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

/// Parses a comma-separated list such as `csv,json,svg`.
pub fn parse_formats(list: &str) -> Result<Vec<ReportFormat>> {
    let mut out = Vec::new();
    for f in list.split(',').filter(|s| !s.trim().is_empty()) {
        let f = f.parse()?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("no output format given".into()));
    }
    Ok(out)
}

/// Writes the report in the requested formats and returns the created paths.
///
/// Files: `cells.csv`, `report.json`, one SVG per chart, and `stages/*.csv`
/// for datasets recorded during the run.
pub fn emit_report(report: &ExperimentReport, formats: &[ReportFormat], out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let write = |path: PathBuf, body: &[u8], written: &mut Vec<PathBuf>| -> Result<()> {
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    for f in formats {
        match f {
            ReportFormat::Csv => {
                write(dir.join("cells.csv"), report.cells_csv()?.as_bytes(), &mut written)?;
                if let Some(sr) = report.sr_csv() {
                    write(dir.join("sr_sweep.csv"), sr.as_bytes(), &mut written)?;
                }
            }
            ReportFormat::Json => write(dir.join("report.json"), report.to_json()?.as_bytes(), &mut written)?,
            ReportFormat::Svg => {
                for (stem, chart) in report.charts() {
                    write(dir.join(format!("{stem}.svg")), chart.render().as_bytes(), &mut written)?;
                }
            }
        }
    }
    if !report.stage_datasets.is_empty() {
        let stages = dir.join("stages");
        fs::create_dir_all(&stages).map_err(|e| Error::io(&stages, e))?;
        for s in &report.stage_datasets {
            let path = stages.join(format!("{}.csv", s.file_stem));
            let mut file = File::create(&path).map_err(|e| Error::io(&path, e))?;
            write_csv(&s.data, &mut file)?;
            file.flush().map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}
