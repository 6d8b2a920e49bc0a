//! Experiment configs, runners and reports.
//!
//! An [`ExperimentConfig`] is a single JSON document naming one of four
//! experiment families. [`run_experiment`] turns it into an
//! [`ExperimentReport`] holding one [`Cell`] per grid point and seed, medians
//! and IQRs over seeds, and π-noise verdicts where an MI estimate applies.
//! [`emit_report`] writes the report as CSV, JSON and SVG; apart from
//! `wall_clock_seconds`, identical configs produce identical bytes.

mod config;
mod fixtures;
mod report;
mod run;
mod svg;

pub use config::{
    default_ratios, DatasetInfo, DatasetSource, DatasetSpec, ExperimentConfig, ExperimentKind, RectifiedLearner,
    RectifiedSpec, SignalSpec, SrSweepSpec,
};
pub use fixtures::{SyntheticPreset, NUISANCE_DISTRACTORS, NUISANCE_PER_CLASS};
pub use report::{
    emit_report, parse_formats, quantile, Aggregate, Cell, ExperimentReport, MiRecord, ReportFormat, SrRecord,
    StageDataset, CSV_HEADER,
};
pub use run::{
    rectified_stages, run_dimension_table, run_enhanced_sweep, run_experiment, run_rectified, run_sr_sweep, STAGE_NAMES,
};
pub use svg::{LineChart, Series};
