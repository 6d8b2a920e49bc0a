//! Positive-incentive noise toolkit.
//!
//! A noise source is *positive-incentive* (π-noise) for a task when it carries
//! information about the task, i.e. conditioning on it lowers the task
//! entropy: `MI(T, ε) = H(T) − H(T | ε) > 0`. Noise with zero mutual
//! information is *pure* noise.
//!
//! The crate is organised around that definition:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`dataset`] | labelled datasets, Gaussian blob generators, CSV ingestion, splits, PCA, accuracy metrics |
//! | [`noise`] | salt-and-pepper, Gaussian, uniform, dimension and instance noise injectors |
//! | [`entropy`] | exact discrete entropy / MI, task entropy, histogram plug-in estimator, π-noise verdicts |
//! | [`sr`] | discretised stochastic-resonance model and its entropy comparison |
//! | [`learners`] | one-vs-rest linear SVM, lasso, ridge, K-Means, two-class LDA |
//! | [`harness`] | experiment configs, runners, reports and charts |
//!
//! All randomness flows through [`RngSeed`], which derives an independent
//! ChaCha stream from a root seed and a label path, so every result is
//! reproducible bit for bit.

pub mod dataset;
pub mod entropy;
pub mod error;
pub mod harness;
pub mod learners;
pub mod noise;
pub mod rng;
pub mod sr;

pub use dataset::{GaussianBlobSpec, LabeledDataset, SplitSpec};
pub use error::{Error, Result};
pub use rng::RngSeed;
