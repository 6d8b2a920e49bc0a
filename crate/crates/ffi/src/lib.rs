//! C ABI over the `pinoise` crate.
//!
//! Every fallible function returns a [`PinoiseStatus`]; on failure the message
//! is available from [`pinoise_last_error`] until the next call on the same
//! thread. Objects cross the boundary as opaque handles that the caller frees
//! with the matching `*_free` function. Strings returned by the library are
//! freed with [`pinoise_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use nalgebra::DMatrix;
use pinoise::dataset::{load_csv, LabeledDataset};
use pinoise::entropy::{
    classify_noise, entropy, estimate_mi_histogram, mutual_information, DiscreteDistribution, DiscreteJoint, LogBase,
    NoiseVerdict,
};
use pinoise::harness::{run_experiment, ExperimentConfig};
use pinoise::noise::NoiseSpec;
use pinoise::sr::{sr_sigma_sweep, SrEntropyReport, SrModel};
use pinoise::{Error, RngSeed};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinoiseStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Ingestion = 4,
    Failure = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinoiseLogBase {
    Nats = 0,
    Bits = 1,
}

impl From<PinoiseLogBase> for LogBase {
    fn from(b: PinoiseLogBase) -> Self {
        match b {
            PinoiseLogBase::Nats => LogBase::Nats,
            PinoiseLogBase::Bits => LogBase::Bits,
        }
    }
}

/// Opaque labelled dataset.
pub struct PinoiseDataset {
    inner: LabeledDataset,
}

/// Opaque result of a stochastic-resonance sweep.
pub struct PinoiseSrSweep {
    rows: Vec<SrEntropyReport>,
}

/// One σ of an SR sweep; entropies in nats.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PinoiseSrPoint {
    pub sigma: f64,
    pub h_unconditioned: f64,
    pub h_conditioned: f64,
    pub mi: f64,
    pub supra_fraction: f64,
    pub std_error: f64,
    pub mc_tolerance: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PinoiseStatus {
    if e.is_ingestion() {
        PinoiseStatus::Ingestion
    } else {
        match e {
            Error::Config(_) | Error::Json(_) => PinoiseStatus::Config,
            Error::InvalidSpec(_)
            | Error::InvalidDataset(_)
            | Error::DimensionMismatch { .. }
            | Error::LengthMismatch { .. }
            | Error::InvalidDistribution(_) => PinoiseStatus::InvalidArgument,
            _ => PinoiseStatus::Failure,
        }
    }
}

enum Fail {
    Null(&'static str),
    Arg(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, records any error and converts panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PinoiseStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PinoiseStatus::Ok,
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("{name} is null"));
            PinoiseStatus::NullPointer
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(msg);
            PinoiseStatus::InvalidArgument
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            PinoiseStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &'static str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail::Null(name))
    } else {
        Ok(())
    }
}

unsafe fn slice_of<'a, T>(p: *const T, len: usize, name: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, name)?;
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn str_of<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Fail> {
    non_null(p, name)?;
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Arg(format!("{name} is not UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Message of the last failed call on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn pinoise_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn pinoise_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a dataset from a row-major `n × d` feature buffer and `n` labels.
///
/// # Safety
/// `features` must hold `n * d` values and `labels` `n` values.
#[no_mangle]
pub unsafe extern "C" fn pinoise_dataset_new(
    features: *const f64,
    labels: *const u32,
    n: usize,
    d: usize,
    class_count: usize,
    out: *mut *mut PinoiseDataset,
) -> PinoiseStatus {
    guard(|| {
        non_null(out, "out")?;
        let len = n.checked_mul(d).ok_or_else(|| Fail::Arg("n * d overflows".into()))?;
        let x = slice_of(features, len, "features")?;
        let y = slice_of(labels, n, "labels")?;
        let matrix = DMatrix::from_row_slice(n, d, x);
        let labels = y.iter().map(|&l| l as usize).collect();
        let inner = LabeledDataset::new("ffi", matrix, labels, class_count)?;
        *out = Box::into_raw(Box::new(PinoiseDataset { inner }));
        Ok(())
    })
}

/// Loads a labelled CSV file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pinoise_dataset_load_csv(
    path: *const c_char,
    label_column: usize,
    has_header: bool,
    out: *mut *mut PinoiseDataset,
) -> PinoiseStatus {
    guard(|| {
        non_null(out, "out")?;
        let path = str_of(path, "path")?;
        let inner = load_csv(path, label_column, has_header)?;
        *out = Box::into_raw(Box::new(PinoiseDataset { inner }));
        Ok(())
    })
}

/// # Safety
/// `ds` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pinoise_dataset_free(ds: *mut PinoiseDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Writes the row count, feature count and class count.
///
/// # Safety
/// `ds` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn pinoise_dataset_shape(
    ds: *const PinoiseDataset,
    n: *mut usize,
    d: *mut usize,
    classes: *mut usize,
) -> PinoiseStatus {
    guard(|| {
        non_null(ds, "ds")?;
        non_null(n, "n")?;
        non_null(d, "d")?;
        non_null(classes, "classes")?;
        let ds = &(*ds).inner;
        *n = ds.len();
        *d = ds.dim();
        *classes = ds.class_count();
        Ok(())
    })
}

/// Copies the features (row-major) and labels into caller buffers of
/// `n * d` and `n` elements.
///
/// # Safety
/// `ds` must be a live handle; the buffers must be large enough.
#[no_mangle]
pub unsafe extern "C" fn pinoise_dataset_copy(
    ds: *const PinoiseDataset,
    features: *mut f64,
    labels: *mut u32,
) -> PinoiseStatus {
    guard(|| {
        non_null(ds, "ds")?;
        non_null(features, "features")?;
        non_null(labels, "labels")?;
        let ds = &(*ds).inner;
        let (n, d) = (ds.len(), ds.dim());
        let x = ds.features();
        for i in 0..n {
            for j in 0..d {
                *features.add(i * d + j) = x[(i, j)];
            }
            *labels.add(i) = ds.labels()[i] as u32;
        }
        Ok(())
    })
}

/// Applies a JSON noise spec (for example
/// `{"kind": "gaussian", "mu": 0.5, "sigma": 0.5, "ratio": 0.3}`) with the
/// given root seed, producing a new dataset.
///
/// # Safety
/// `ds` must be a live handle, `spec_json` a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pinoise_noise_apply(
    ds: *const PinoiseDataset,
    spec_json: *const c_char,
    seed: u64,
    out: *mut *mut PinoiseDataset,
) -> PinoiseStatus {
    guard(|| {
        non_null(ds, "ds")?;
        non_null(out, "out")?;
        let json = str_of(spec_json, "spec_json")?;
        let mut spec: NoiseSpec = serde_json::from_str(json).map_err(Error::from)?;
        spec.seed = RngSeed::root(seed).derive("ffi/noise");
        let inner = spec.apply(&(*ds).inner)?;
        *out = Box::into_raw(Box::new(PinoiseDataset { inner }));
        Ok(())
    })
}

/// Entropy of a probability vector.
///
/// # Safety
/// `p` must hold `k` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pinoise_entropy(p: *const f64, k: usize, base: PinoiseLogBase, out: *mut f64) -> PinoiseStatus {
    guard(|| {
        non_null(out, "out")?;
        let dist = DiscreteDistribution::new(slice_of(p, k, "p")?.to_vec())?;
        *out = entropy(&dist, base.into());
        Ok(())
    })
}

/// Exact mutual information of a row-major `rows × cols` joint table.
///
/// # Safety
/// `table` must hold `rows * cols` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pinoise_mutual_information(
    table: *const f64,
    rows: usize,
    cols: usize,
    base: PinoiseLogBase,
    out: *mut f64,
) -> PinoiseStatus {
    guard(|| {
        non_null(out, "out")?;
        let len = rows.checked_mul(cols).ok_or_else(|| Fail::Arg("rows * cols overflows".into()))?;
        if cols == 0 {
            return Err(Fail::Arg("cols must be positive".into()));
        }
        let flat = slice_of(table, len, "table")?;
        let joint = DiscreteJoint::new(flat.chunks(cols).map(<[f64]>::to_vec).collect())?;
        *out = mutual_information(&joint, base.into()).value;
        Ok(())
    })
}

/// Histogram plug-in MI between `n` labels and a row-major `n × k` noise
/// block (`k ≤ 3`). `bins = 0` selects the default bin count.
///
/// # Safety
/// `labels` must hold `n` values, `noise` `n * k` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pinoise_estimate_mi(
    labels: *const u32,
    noise: *const f64,
    n: usize,
    k: usize,
    bins: usize,
    base: PinoiseLogBase,
    out: *mut f64,
) -> PinoiseStatus {
    guard(|| {
        non_null(out, "out")?;
        let len = n.checked_mul(k).ok_or_else(|| Fail::Arg("n * k overflows".into()))?;
        let y: Vec<usize> = slice_of(labels, n, "labels")?.iter().map(|&l| l as usize).collect();
        let block = DMatrix::from_row_slice(n, k, slice_of(noise, len, "noise")?);
        let bins = (bins > 0).then_some(bins);
        *out = estimate_mi_histogram(&y, &block, bins, base.into())?.value;
        Ok(())
    })
}

/// Sets `*is_pi_noise` when `mi > alpha`.
///
/// # Safety
/// `is_pi_noise` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pinoise_classify(mi: f64, alpha: f64, is_pi_noise: *mut bool) -> PinoiseStatus {
    guard(|| {
        non_null(is_pi_noise, "is_pi_noise")?;
        if !mi.is_finite() {
            return Err(Fail::Arg("mi must be finite".into()));
        }
        let est = mutual_information(&DiscreteJoint::new(vec![vec![1.0]])?, LogBase::Nats);
        let est = pinoise::entropy::MiEstimate {
            value: mi.max(0.0),
            raw_value: mi,
            ..est
        };
        *is_pi_noise = classify_noise(&est, alpha)?.verdict == NoiseVerdict::PiNoise;
        Ok(())
    })
}

/// SR sweep of a sampled signal over a list of noise levels.
///
/// # Safety
/// `signal` must hold `points` values and `sigmas` `sigma_count` values;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pinoise_sr_sweep(
    signal: *const f64,
    points: usize,
    threshold: f64,
    floor: f64,
    ceiling: f64,
    bins: usize,
    draws: usize,
    sigmas: *const f64,
    sigma_count: usize,
    seed: u64,
    out: *mut *mut PinoiseSrSweep,
) -> PinoiseStatus {
    guard(|| {
        non_null(out, "out")?;
        let f = slice_of(signal, points, "signal")?.to_vec();
        let grid = (0..f.len()).map(|i| i as f64).collect();
        let model = SrModel::new(grid, f, threshold, floor, ceiling)?
            .with_bins(bins)
            .with_draws(draws);
        let sigmas = slice_of(sigmas, sigma_count, "sigmas")?;
        let rows = sr_sigma_sweep(&model, sigmas, &RngSeed::root(seed).derive("sr"))?;
        *out = Box::into_raw(Box::new(PinoiseSrSweep { rows }));
        Ok(())
    })
}

/// Number of rows in a sweep; zero for null.
///
/// # Safety
/// `sweep` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pinoise_sr_sweep_len(sweep: *const PinoiseSrSweep) -> usize {
    if sweep.is_null() {
        0
    } else {
        (&*sweep).rows.len()
    }
}

/// # Safety
/// `sweep` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pinoise_sr_sweep_get(
    sweep: *const PinoiseSrSweep,
    index: usize,
    out: *mut PinoiseSrPoint,
) -> PinoiseStatus {
    guard(|| {
        non_null(sweep, "sweep")?;
        non_null(out, "out")?;
        let sweep = &*sweep;
        let r = sweep
            .rows
            .get(index)
            .ok_or_else(|| Fail::Arg(format!("index {index} out of range")))?;
        *out = PinoiseSrPoint {
            sigma: r.sigma,
            h_unconditioned: r.h_unconditioned,
            h_conditioned: r.h_conditioned,
            mi: r.mi,
            supra_fraction: r.supra_fraction,
            std_error: r.std_error,
            mc_tolerance: r.mc_tolerance,
        };
        Ok(())
    })
}

/// # Safety
/// `sweep` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pinoise_sr_sweep_free(sweep: *mut PinoiseSrSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

/// Runs an experiment from a JSON config and returns the JSON report in
/// `*report_json` (free with [`pinoise_string_free`]).
///
/// # Safety
/// `config_json` must be a nul-terminated string; `report_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pinoise_run_experiment(config_json: *const c_char, report_json: *mut *mut c_char) -> PinoiseStatus {
    guard(|| {
        non_null(report_json, "report_json")?;
        let cfg = ExperimentConfig::from_json(str_of(config_json, "config_json")?)?;
        let report = run_experiment(&cfg)?;
        *report_json = into_c_string(report.to_json()?);
        Ok(())
    })
}
