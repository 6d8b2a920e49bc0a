use std::fmt::Display;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Serialize;

use pinoise::dataset::{generate_blobs, load_csv, write_csv, GaussianBlobSpec, LabeledDataset};
use pinoise::entropy::{classify_noise, estimate_mi_histogram, LogBase, MiEstimate, NoiseClassification};
use pinoise::harness::{
    emit_report, parse_formats, run_experiment, ExperimentConfig, ExperimentKind, ExperimentReport, ReportFormat,
    SignalSpec, SrSweepSpec, SyntheticPreset,
};
use pinoise::noise::NoiseSpec;
use pinoise::{Error, Result, RngSeed};

#[derive(Parser)]
#[command(name = "pinoise", version, about = "Positive-incentive noise experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset to CSV.
    GenData(GenData),
    /// Apply a noise model (JSON) to a CSV dataset.
    InjectNoise(InjectNoise),
    /// Plug-in mutual information between labels and up to three columns.
    EstimateMi(EstimateMi),
    /// Stochastic-resonance entropy sweep over noise levels.
    SrSweep(SrSweep),
    /// Run an experiment described by a JSON config.
    Run(Run),
    /// Re-render a saved JSON report.
    Report(Report),
}

#[derive(Args)]
struct Output {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long, default_value = "csv,json,svg")]
    format: String,
}

#[derive(Args)]
struct Input {
    /// Labelled CSV file.
    #[arg(long)]
    input: PathBuf,
    /// Zero-based index of the label column.
    #[arg(long)]
    label_column: usize,
    /// The first row is a header.
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct GenData {
    #[arg(long, value_enum, conflicts_with = "config")]
    preset: Option<PresetArg>,
    /// JSON list of Gaussian blob specs.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct InjectNoise {
    #[command(flatten)]
    input: Input,
    /// JSON noise spec, e.g. {"kind": "gaussian", "mu": 0.5, "sigma": 0.5, "ratio": 0.3}.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct EstimateMi {
    #[command(flatten)]
    input: Input,
    /// Feature columns (after removing the label), comma separated; at most three.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    columns: Vec<usize>,
    /// Bins per axis; defaults to ⌈n^(1/3)⌉ capped at 64.
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long, value_enum, default_value_t = BaseArg::Bits)]
    base: BaseArg,
    /// Threshold for the π-noise verdict.
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SrSweep {
    /// JSON sweep spec; overrides the signal flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SignalArg::Constant)]
    signal: SignalArg,
    /// Constant level, or sine offset.
    #[arg(long, default_value_t = 0.5)]
    level: f64,
    #[arg(long, default_value_t = 0.4)]
    amplitude: f64,
    #[arg(long, default_value_t = 1.0)]
    cycles: f64,
    /// Signal file for `--signal csv` (last column of each row).
    #[arg(long)]
    signal_csv: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
    #[arg(long, default_value_t = 0.0)]
    floor: f64,
    #[arg(long, default_value_t = 2.0)]
    ceiling: f64,
    #[arg(long, default_value_t = 64)]
    bins: usize,
    #[arg(long, default_value_t = 1000)]
    draws: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.5,0.75,1,1.5,2")]
    sigmas: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Run {
    #[arg(long)]
    config: PathBuf,
    /// Replace the config's seed list with this single seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to the config's `output_dir`, then `.`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv,json,svg")]
    format: String,
}

#[derive(Args)]
struct Report {
    /// A `report.json` written by `run`.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Toy,
    LdaToy,
    NuisanceBackground,
    ConcentricRings,
    IrisShape,
    WineShape,
    CarsShape,
    BalanceShape,
    AustralianShape,
    BreastShape,
    DiabetesShape,
}

impl From<PresetArg> for SyntheticPreset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Toy => SyntheticPreset::Toy,
            PresetArg::LdaToy => SyntheticPreset::LdaToy,
            PresetArg::NuisanceBackground => SyntheticPreset::NuisanceBackground,
            PresetArg::ConcentricRings => SyntheticPreset::ConcentricRings,
            PresetArg::IrisShape => SyntheticPreset::IrisShape,
            PresetArg::WineShape => SyntheticPreset::WineShape,
            PresetArg::CarsShape => SyntheticPreset::CarsShape,
            PresetArg::BalanceShape => SyntheticPreset::BalanceShape,
            PresetArg::AustralianShape => SyntheticPreset::AustralianShape,
            PresetArg::BreastShape => SyntheticPreset::BreastShape,
            PresetArg::DiabetesShape => SyntheticPreset::DiabetesShape,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    Bits,
    Nats,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignalArg {
    Constant,
    Sine,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenData(a) => gen_data(a),
        Command::InjectNoise(a) => inject_noise(a),
        Command::EstimateMi(a) => estimate_mi(a),
        Command::SrSweep(a) => sr_sweep(a),
        Command::Run(a) => run(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}

/// An error together with the process exit code it maps to.
struct Failure {
    code: u8,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            code: exit_code(&error),
            error,
        }
    }
}

/// Errors while writing results are neither config nor ingestion failures.
fn output<T>(r: Result<T>) -> Result<T, Failure> {
    r.map_err(|error| Failure { code: 1, error })
}

fn exit_code(e: &Error) -> u8 {
    if e.is_ingestion() {
        3
    } else if matches!(e, Error::Config(_) | Error::InvalidSpec(_) | Error::Json(_)) {
        2
    } else {
        1
    }
}

fn config_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| config_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| config_error(path, e))
}

fn write_dataset(ds: &LabeledDataset, dir: &Path, stem: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let path = dir.join(format!("{stem}.csv"));
    let file = File::create(&path).map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })?;
    write_csv(ds, file)?;
    Ok(path)
}

fn load_input(input: &Input) -> Result<LabeledDataset> {
    load_csv(&input.input, input.label_column, input.header)
}

fn gen_data(a: GenData) -> Result<(), Failure> {
    let seed = RngSeed::root(a.seed);
    let ds = match (a.preset, &a.config) {
        (Some(p), _) => SyntheticPreset::from(p).generate(&seed)?,
        (None, Some(path)) => {
            let specs: Vec<GaussianBlobSpec> = read_json(path)?;
            generate_blobs(&specs, &seed).map_err(|e| config_error(path, e))?.with_name("blobs")
        }
        (None, None) => return Err(Error::Config("gen-data needs --preset or --config".into()).into()),
    };
    let path = output(write_dataset(&ds, &a.out, ds.name()))?;
    say(path.display());
    Ok(())
}

fn inject_noise(a: InjectNoise) -> Result<(), Failure> {
    let mut spec: NoiseSpec = read_json(&a.config)?;
    spec.validate().map_err(|e| config_error(&a.config, e))?;
    if spec.seed == RngSeed::default() {
        spec.seed = RngSeed::root(a.seed).derive("inject-noise");
    }
    let ds = load_input(&a.input)?;
    let noisy = spec.apply(&ds)?;
    let stem = format!("{}_{}", ds.name(), spec.kind.name());
    let path = output(write_dataset(&noisy, &a.out, &stem))?;
    say(path.display());
    Ok(())
}

#[derive(Serialize)]
struct MiOutput {
    input: String,
    columns: Vec<usize>,
    estimate: MiEstimate,
    classification: NoiseClassification,
}

fn estimate_mi(a: EstimateMi) -> Result<(), Failure> {
    let formats = parse_formats(&a.output.format)?;
    if a.columns.is_empty() || a.columns.len() > 3 {
        return Err(Error::Config("--columns takes one to three indices".into()).into());
    }
    let ds = load_input(&a.input)?;
    if let Some(&bad) = a.columns.iter().find(|&&c| c >= ds.dim()) {
        return Err(Error::Config(format!("column {bad} out of range for {} features", ds.dim())).into());
    }
    let x = ds.features();
    let block = DMatrix::from_fn(ds.len(), a.columns.len(), |i, j| x[(i, a.columns[j])]);
    let base = match a.base {
        BaseArg::Bits => LogBase::Bits,
        BaseArg::Nats => LogBase::Nats,
    };
    let estimate = estimate_mi_histogram(ds.labels(), &block, a.bins, base)?;
    let classification = classify_noise(&estimate, a.alpha)?;
    let out = MiOutput {
        input: a.input.input.display().to_string(),
        columns: a.columns,
        estimate,
        classification,
    };
    let json = output(serde_json::to_string_pretty(&out).map_err(Error::from))?;
    say(&json);
    output(fs::create_dir_all(&a.output.out).map_err(|e| Error::Io {
        path: a.output.out.clone(),
        source: e,
    }))?;
    for f in formats {
        let (name, body) = match f {
            ReportFormat::Json => ("mi.json", json.clone()),
            ReportFormat::Csv => (
                "mi.csv",
                format!(
                    "mi,raw_mi,unit,samples,verdict\n{},{},{:?},{},{:?}\n",
                    out.estimate.value,
                    out.estimate.raw_value,
                    out.estimate.unit,
                    out.estimate.sample_count,
                    out.classification.verdict
                ),
            ),
            ReportFormat::Svg => continue,
        };
        let path = a.output.out.join(name);
        output(fs::write(&path, body).map_err(|e| Error::Io { path, source: e }))?;
    }
    Ok(())
}

fn sr_sweep(a: SrSweep) -> Result<(), Failure> {
    let formats = parse_formats(&a.output.format)?;
    let spec = match &a.config {
        Some(path) => read_json(path)?,
        None => SrSweepSpec {
            signal: match a.signal {
                SignalArg::Constant => SignalSpec::Constant { level: a.level },
                SignalArg::Sine => SignalSpec::Sine {
                    offset: a.level,
                    amplitude: a.amplitude,
                    cycles: a.cycles,
                },
                SignalArg::Csv => SignalSpec::Csv {
                    path: a
                        .signal_csv
                        .clone()
                        .ok_or_else(|| Error::Config("--signal csv needs --signal-csv".into()))?,
                    has_header: false,
                },
            },
            points: a.points,
            threshold: a.threshold,
            floor: a.floor,
            ceiling: a.ceiling,
            bins: a.bins,
            draws: a.draws,
            sigmas: a.sigmas.clone(),
        },
    };
    let mut cfg = ExperimentConfig::new(ExperimentKind::SrSweep, vec![a.seed]);
    cfg.sr = Some(spec);
    let report = run_experiment(&cfg)?;
    for path in output(emit_report(&report, &formats, &a.output.out))? {
        say(path.display());
    }
    Ok(())
}

fn run(a: Run) -> Result<(), Failure> {
    let formats = parse_formats(&a.format)?;
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if let Some(seed) = a.seed {
        cfg.seeds = vec![seed];
    }
    let out = a.out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let report = run_experiment(&cfg)?;
    for path in output(emit_report(&report, &formats, &out))? {
        say(path.display());
    }
    Ok(())
}

fn report(a: Report) -> Result<(), Failure> {
    let formats = parse_formats(&a.output.format)?;
    let report = ExperimentReport::load(&a.input)?;
    for path in output(emit_report(&report, &formats, &a.output.out))? {
        say(path.display());
    }
    Ok(())
}

/// Prints a line to stdout. A closed pipe (e.g. `| head`) is not an error:
/// the files on disk are the real output.
fn say(line: impl Display) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}
