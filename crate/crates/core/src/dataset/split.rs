use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::RngSeed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub stratified: bool,
}

impl SplitSpec {
    /// Stratified 50/50 split.
    pub fn half_stratified() -> Self {
        Self {
            train_fraction: 0.5,
            stratified: true,
        }
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self::half_stratified()
    }
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Train/test index partition, each side sorted ascending.
pub fn split_indices(ds: &LabeledDataset, spec: &SplitSpec, seed: &RngSeed) -> Result<(Vec<usize>, Vec<usize>)> {
    let f = spec.train_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::Split(format!("train_fraction {f} outside (0, 1)")));
    }
    let mut rng = seed.rng();
    let mut train = Vec::new();
    let mut test = Vec::new();
    if spec.stratified {
        let mut by_class = vec![Vec::new(); ds.class_count()];
        for (i, &l) in ds.labels().iter().enumerate() {
            by_class[l].push(i);
        }
        for (class, mut members) in by_class.into_iter().enumerate() {
            if members.is_empty() {
                continue;
            }
            if members.len() < 2 {
                return Err(Error::Split(format!(
                    "class {class} has a single sample; stratified split needs at least 2"
                )));
            }
            members.shuffle(&mut rng);
            let k = round_half_up(f * members.len() as f64).clamp(1, members.len() - 1);
            train.extend_from_slice(&members[..k]);
            test.extend_from_slice(&members[k..]);
        }
    } else {
        if ds.len() < 2 {
            return Err(Error::Split("need at least 2 samples".into()));
        }
        let mut all: Vec<usize> = (0..ds.len()).collect();
        all.shuffle(&mut rng);
        let k = round_half_up(f * ds.len() as f64).clamp(1, ds.len() - 1);
        train.extend_from_slice(&all[..k]);
        test.extend_from_slice(&all[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Disjoint train/test datasets covering `ds`.
pub fn split(ds: &LabeledDataset, spec: &SplitSpec, seed: &RngSeed) -> Result<(LabeledDataset, LabeledDataset)> {
    let (train, test) = split_indices(ds, spec, seed)?;
    Ok((ds.select(&train)?, ds.select(&test)?))
}
