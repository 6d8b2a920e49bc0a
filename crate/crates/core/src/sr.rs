//! Discretised stochastic-resonance model.
//!
//! A sensor reports `y_t = f(t)` only when it reaches the threshold `θ`;
//! otherwise any amplitude in `[θ₀, θ_max]` is possible. Amplitudes are
//! quantised into `B` equal-width bins, so an unseen sample is uniform over
//! the bins (entropy `ln B`) and a seen one is a point mass (entropy 0).
//! Gaussian dither `ε ~ N(0, σ²)` can lift a subthreshold signal over `θ`,
//! which lowers the conditional entropy `H(T | ε)` below `H(T)`.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::entropy::{entropy, DiscreteDistribution, LogBase};
use crate::error::{Error, Result};
use crate::rng::RngSeed;

pub const DEFAULT_BINS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrModel {
    pub time_grid: Vec<f64>,
    pub signal: Vec<f64>,
    /// Detection threshold `θ`.
    pub threshold: f64,
    /// Amplitude floor `θ₀`.
    pub floor: f64,
    /// Amplitude ceiling `θ_max`.
    pub ceiling: f64,
    pub amplitude_bins: usize,
    pub noise_sigma: f64,
    /// Noise draws per time point.
    pub mc_draws: usize,
}

/// What the sensor reports at one time point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observation {
    /// Below threshold: every amplitude bin equally likely.
    Hidden,
    /// At or above threshold: the containing bin.
    Seen(usize),
}

impl SrModel {
    pub fn new(time_grid: Vec<f64>, signal: Vec<f64>, threshold: f64, floor: f64, ceiling: f64) -> Result<Self> {
        let model = Self {
            time_grid,
            signal,
            threshold,
            floor,
            ceiling,
            amplitude_bins: DEFAULT_BINS,
            noise_sigma: 0.0,
            mc_draws: 1000,
        };
        model.validate()?;
        Ok(model)
    }

    /// `f(t) = level` on `points` grid points over `[0, 1]`.
    pub fn constant(level: f64, points: usize, threshold: f64, floor: f64, ceiling: f64) -> Result<Self> {
        let grid = unit_grid(points);
        let signal = vec![level; grid.len()];
        Self::new(grid, signal, threshold, floor, ceiling)
    }

    /// `f(t) = offset + amplitude · sin(2π · cycles · t)` on `[0, 1]`.
    pub fn sine(offset: f64, amplitude: f64, cycles: f64, points: usize, threshold: f64, floor: f64, ceiling: f64) -> Result<Self> {
        let grid = unit_grid(points);
        let signal = grid
            .iter()
            .map(|t| offset + amplitude * (2.0 * std::f64::consts::PI * cycles * t).sin())
            .collect();
        Self::new(grid, signal, threshold, floor, ceiling)
    }

    pub fn with_bins(mut self, bins: usize) -> Self {
        self.amplitude_bins = bins;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }

    pub fn with_draws(mut self, draws: usize) -> Self {
        self.mc_draws = draws;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.time_grid.is_empty() {
            return bad("time grid is empty".into());
        }
        if self.time_grid.len() != self.signal.len() {
            return Err(Error::LengthMismatch {
                left: self.time_grid.len(),
                right: self.signal.len(),
            });
        }
        if self.time_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("time grid must be strictly increasing".into());
        }
        if self.signal.iter().any(|v| !v.is_finite()) {
            return bad("signal has non-finite values".into());
        }
        if !(self.floor < self.threshold && self.threshold <= self.ceiling) {
            return bad(format!(
                "need floor < threshold <= ceiling, got {} / {} / {}",
                self.floor, self.threshold, self.ceiling
            ));
        }
        if self.amplitude_bins < 2 {
            return bad("need at least 2 amplitude bins".into());
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return bad(format!("noise sigma {} must be finite and >= 0", self.noise_sigma));
        }
        if self.mc_draws == 0 {
            return bad("mc_draws must be at least 1".into());
        }
        Ok(())
    }

    /// Bin containing `value`; values outside `[θ₀, θ_max]` clip to the end bins.
    pub fn bin_of(&self, value: f64) -> usize {
        let b = self.amplitude_bins;
        let x = (value - self.floor) / (self.ceiling - self.floor) * b as f64;
        if x <= 0.0 {
            0
        } else {
            (x as usize).min(b - 1)
        }
    }

    pub fn observe(&self, value: f64) -> Observation {
        if value >= self.threshold {
            Observation::Seen(self.bin_of(value))
        } else {
            Observation::Hidden
        }
    }

    /// Per-time-point outcome distribution over amplitude bins.
    pub fn outcome_distribution(&self, obs: Observation) -> DiscreteDistribution {
        let dist = match obs {
            Observation::Hidden => DiscreteDistribution::uniform(self.amplitude_bins),
            Observation::Seen(bin) => DiscreteDistribution::point_mass(self.amplitude_bins, bin),
        };
        dist.expect("validated model yields valid distributions")
    }

    /// `|S_f| / T`.
    pub fn supra_fraction(&self) -> f64 {
        let seen = self.signal.iter().filter(|&&f| f >= self.threshold).count();
        seen as f64 / self.signal.len() as f64
    }
}

fn unit_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|i| i as f64 / (points - 1) as f64).collect(),
    }
}

/// Entropies of the two observation kinds, in nats.
fn observation_entropies(model: &SrModel) -> (f64, f64) {
    let hidden = entropy(&model.outcome_distribution(Observation::Hidden), LogBase::Nats);
    let seen = entropy(&model.outcome_distribution(Observation::Seen(0)), LogBase::Nats);
    (hidden, seen)
}

/// `H(T_SR) = H(y_t | t)` in nats, with `t` uniform over the grid.
pub fn sr_base_entropy(model: &SrModel) -> Result<f64> {
    model.validate()?;
    let total: f64 = model
        .signal
        .iter()
        .map(|&f| entropy(&model.outcome_distribution(model.observe(f)), LogBase::Nats))
        .sum();
    Ok(total / model.signal.len() as f64)
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub draws: usize,
}

/// `H(T_SR | ε)` in nats, averaging over `mc_draws` noise draws per time point.
///
/// The standard error treats time points as strata: `sqrt(Σ_t s_t² / draws) / T`,
/// with each `s_t²` taken from the Jeffreys-smoothed hidden fraction.
pub fn sr_conditional_entropy(model: &SrModel, seed: &RngSeed) -> Result<McEstimate> {
    model.validate()?;
    let t_count = model.signal.len();
    if model.noise_sigma == 0.0 {
        return Ok(McEstimate {
            value: sr_base_entropy(model)?,
            std_error: 0.0,
            draws: 0,
        });
    }
    let (h_hidden, h_seen) = observation_entropies(model);
    let normal = Normal::new(0.0, model.noise_sigma).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let draws = model.mc_draws;
    let mut total = 0.0;
    let mut variance_sum = 0.0;
    for (t, &f) in model.signal.iter().enumerate() {
        let mut rng = seed.derive(format!("t{t}")).rng();
        let mut hidden = 0usize;
        for _ in 0..draws {
            let y = f + normal.sample(&mut rng);
            if matches!(model.observe(y), Observation::Hidden) {
                hidden += 1;
            }
        }
        let q = hidden as f64 / draws as f64;
        let mean = q * h_hidden + (1.0 - q) * h_seen;
        total += mean;
        if draws > 1 {
            // Jeffreys-smoothed proportion, so an all-or-nothing count does not
            // claim zero uncertainty
            let q_s = (hidden as f64 + 0.5) / (draws as f64 + 1.0);
            let spread = (h_hidden - h_seen).powi(2);
            variance_sum += spread * q_s * (1.0 - q_s) * draws as f64 / (draws - 1) as f64;
        }
    }
    let t = t_count as f64;
    Ok(McEstimate {
        value: total / t,
        std_error: (variance_sum / draws as f64).sqrt() / t,
        draws: draws * t_count,
    })
}

/// One row of a noise-level sweep. Entropies in nats.
///
/// `mi` can be negative when the signal is partly above threshold, since
/// dither then hides points that were visible without it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrEntropyReport {
    pub sigma: f64,
    pub h_unconditioned: f64,
    pub h_conditioned: f64,
    pub mi: f64,
    pub supra_fraction: f64,
    pub std_error: f64,
    /// Three standard errors.
    pub mc_tolerance: f64,
}

pub fn sr_sigma_sweep(model: &SrModel, sigmas: &[f64], seed: &RngSeed) -> Result<Vec<SrEntropyReport>> {
    if sigmas.is_empty() {
        return Err(Error::InvalidSpec("sigma list is empty".into()));
    }
    let base = sr_base_entropy(model)?;
    let supra_fraction = model.supra_fraction();
    sigmas
        .iter()
        .enumerate()
        .map(|(i, &sigma)| {
            let m = model.clone().with_sigma(sigma);
            let cond = sr_conditional_entropy(&m, &seed.derive(format!("sigma{i}")))?;
            Ok(SrEntropyReport {
                sigma,
                h_unconditioned: base,
                h_conditioned: cond.value,
                mi: base - cond.value,
                supra_fraction,
                std_error: cond.std_error,
                mc_tolerance: 3.0 * cond.std_error,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(level: f64) -> SrModel {
        SrModel::constant(level, 8, 1.0, 0.0, 2.0).unwrap()
    }

    #[test]
    fn base_entropy_limits() {
        let ln_b = (DEFAULT_BINS as f64).ln();
        assert!((sr_base_entropy(&constant(0.5)).unwrap() - ln_b).abs() < 1e-12);
        assert_eq!(sr_base_entropy(&constant(1.5)).unwrap(), 0.0);
        let grid = unit_grid(10);
        let signal = (0..10).map(|i| if i < 5 { 0.5 } else { 1.5 }).collect();
        let half = SrModel::new(grid, signal, 1.0, 0.0, 2.0).unwrap();
        assert!((sr_base_entropy(&half).unwrap() - ln_b / 2.0).abs() < 1e-12);
        assert_eq!(half.supra_fraction(), 0.5);
    }

    #[test]
    fn zero_sigma_matches_base() {
        let m = SrModel::sine(0.8, 0.4, 2.0, 50, 1.0, 0.0, 2.0).unwrap();
        let cond = sr_conditional_entropy(&m, &RngSeed::root(1)).unwrap();
        assert_eq!(cond.value, sr_base_entropy(&m).unwrap());
        assert_eq!(cond.std_error, 0.0);
    }

    #[test]
    fn dither_lowers_subthreshold_entropy() {
        let m = constant(0.9).with_sigma(1.0).with_draws(2000);
        let cond = sr_conditional_entropy(&m, &RngSeed::root(2)).unwrap();
        assert!(cond.value < (DEFAULT_BINS as f64).ln());
        assert!(cond.std_error > 0.0);
    }

    #[test]
    fn deterministic_per_seed() {
        let m = constant(0.7).with_sigma(0.3).with_draws(500);
        let a = sr_conditional_entropy(&m, &RngSeed::root(3)).unwrap();
        let b = sr_conditional_entropy(&m, &RngSeed::root(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn binning() {
        let m = constant(0.5).with_bins(4);
        assert_eq!(m.bin_of(-1.0), 0);
        assert_eq!(m.bin_of(0.49), 0);
        assert_eq!(m.bin_of(0.5), 1);
        assert_eq!(m.bin_of(2.0), 3);
        assert_eq!(m.bin_of(9.0), 3);
        assert_eq!(m.observe(1.0), Observation::Seen(2));
        assert_eq!(m.observe(0.99), Observation::Hidden);
    }

    #[test]
    fn invalid_models() {
        assert!(SrModel::constant(0.5, 4, 0.0, 0.0, 1.0).is_err());
        assert!(SrModel::new(vec![0.0, 0.0], vec![1.0, 1.0], 1.0, 0.0, 2.0).is_err());
        assert!(constant(0.5).with_bins(1).validate().is_err());
        assert!(constant(0.5).with_draws(0).validate().is_err());
        assert!(constant(0.5).with_sigma(-1.0).validate().is_err());
    }

    #[test]
    fn sweep_zero_sigma() {
        let r = sr_sigma_sweep(&constant(0.5), &[0.0], &RngSeed::root(0)).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].mi, 0.0);
        assert!(sr_sigma_sweep(&constant(0.5), &[], &RngSeed::root(0)).is_err());
    }
}
