//! Synthetic wetness signals: Gaussian-mixture peaks over a smoothed random-walk
//! baseline with additive white Gaussian noise.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::smooth;
use crate::signal::Signal;

/// Peaks contribute nothing beyond this many widths from their center.
const PEAK_SUPPORT_WIDTHS: f64 = 12.0;

/// A positive-valued random quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DistSpec {
    Constant { value: f64 },
    LogNormal { median: f64, sigma_log: f64 },
    Uniform { low: f64, high: f64 },
}

impl DistSpec {
    pub fn constant(value: f64) -> Self {
        DistSpec::Constant { value }
    }

    pub fn log_normal(median: f64, sigma_log: f64) -> Self {
        DistSpec::LogNormal { median, sigma_log }
    }

    /// Checks the distribution parameters; `strictly_positive` additionally forbids zero draws.
    fn validate(&self, name: &str, strictly_positive: bool) -> Result<()> {
        let ok = match *self {
            DistSpec::Constant { value } => {
                value.is_finite()
                    && if strictly_positive {
                        value > 0.0
                    } else {
                        value >= 0.0
                    }
            }
            DistSpec::LogNormal { median, sigma_log } => {
                median.is_finite() && median > 0.0 && sigma_log.is_finite() && sigma_log >= 0.0
            }
            DistSpec::Uniform { low, high } => {
                low.is_finite()
                    && high.is_finite()
                    && low <= high
                    && if strictly_positive {
                        low > 0.0
                    } else {
                        low >= 0.0
                    }
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "{name} distribution {self:?}"
            )))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DistSpec::Constant { value } => value,
            DistSpec::LogNormal { median, sigma_log } => LogNormal::new(median.ln(), sigma_log)
                .expect("validated parameters")
                .sample(rng),
            DistSpec::Uniform { low, high } if low == high => low,
            DistSpec::Uniform { low, high } => Uniform::new(low, high)
                .expect("validated parameters")
                .sample(rng),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_samples: usize,
    /// Peak amplitude in mV.
    pub peak_amplitude: DistSpec,
    /// Peak standard deviation in samples.
    pub peak_width: DistSpec,
    /// Distance between consecutive peak centers in samples.
    pub peak_gap: DistSpec,
    /// Random-walk step in mV.
    pub walk_step: f64,
    pub walk_smooth_len: usize,
    /// Noise variance in mV².
    pub noise_power: f64,
    pub seed: u64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            n_samples: 9858,
            peak_amplitude: DistSpec::log_normal(3.0, 0.8),
            peak_width: DistSpec::log_normal(8.0, 0.5),
            peak_gap: DistSpec::log_normal(60.0, 0.7),
            walk_step: 0.1,
            walk_smooth_len: 50,
            noise_power: 0.01,
            seed: 0,
        }
    }
}

impl ModelParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1 {
            return Err(Error::InvalidParams("n_samples must be at least 1".into()));
        }
        if !(self.walk_step.is_finite() && self.walk_step > 0.0) {
            return Err(Error::InvalidParams(format!(
                "walk_step {}",
                self.walk_step
            )));
        }
        if self.walk_smooth_len < 1 {
            return Err(Error::InvalidParams(
                "walk_smooth_len must be at least 1".into(),
            ));
        }
        if !(self.noise_power.is_finite() && self.noise_power >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "noise_power {}",
                self.noise_power
            )));
        }
        self.peak_amplitude.validate("amplitude", false)?;
        self.peak_width.validate("width", true)?;
        self.peak_gap.validate("gap", true)?;
        Ok(())
    }

    /// Independent generator for one scene component.
    fn stream(&self, component: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(component);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub center: f64,
    pub amplitude: f64,
    pub width: f64,
}

/// Sum of `A exp(-(i - c)^2 / (2 w^2))` over `peaks`, for `i` in `0..n`.
pub fn gaussian_mixture(n: usize, peaks: &[Peak]) -> Vec<f64> {
    let mut h = vec![0.0; n];
    for p in peaks {
        let reach = PEAK_SUPPORT_WIDTHS * p.width;
        let lo = (p.center - reach).floor().max(0.0) as usize;
        let hi = ((p.center + reach).ceil().max(0.0) as usize).min(n.saturating_sub(1));
        for (i, slot) in h.iter_mut().enumerate().take(hi + 1).skip(lo) {
            let z = (i as f64 - p.center) / p.width;
            *slot += p.amplitude * (-0.5 * z * z).exp();
        }
    }
    h
}

/// Draws peaks with centers at cumulative gaps, stopping at the end of the series.
pub fn draw_peaks<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<Vec<Peak>> {
    params.validate()?;
    let mut peaks = Vec::new();
    let mut center = 0.0;
    loop {
        center += params.peak_gap.sample(rng);
        if center >= params.n_samples as f64 {
            break;
        }
        peaks.push(Peak {
            center,
            amplitude: params.peak_amplitude.sample(rng),
            width: params.peak_width.sample(rng),
        });
    }
    Ok(peaks)
}

pub fn generate_peaks<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<Signal> {
    let peaks = draw_peaks(params, rng)?;
    Signal::new(gaussian_mixture(params.n_samples, &peaks))
}

/// Cumulative sum of equiprobable `±step` increments, before smoothing.
pub fn random_walk<R: RngCore + ?Sized>(n: usize, step: f64, rng: &mut R) -> Vec<f64> {
    let mut level = 0.0;
    (0..n)
        .map(|_| {
            level += if rng.random::<bool>() { step } else { -step };
            level
        })
        .collect()
}

pub fn generate_baseline<R: RngCore + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<Signal> {
    params.validate()?;
    let walk = random_walk(params.n_samples, params.walk_step, rng);
    Signal::new(smooth(&walk, params.walk_smooth_len)?)
}

pub fn generate_noise<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<Signal> {
    params.validate()?;
    if params.noise_power == 0.0 {
        return Signal::new(vec![0.0; params.n_samples]);
    }
    let normal = Normal::new(0.0, params.noise_power.sqrt())
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    Signal::new((0..params.n_samples).map(|_| normal.sample(rng)).collect())
}

/// Ground-truth components and their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticScene {
    pub h: Signal,
    pub b: Signal,
    pub n: Signal,
    pub s: Signal,
    pub seed: u64,
}

impl SyntheticScene {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Header `index,h,b,n,s`, one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * 64);
        out.push_str("index,h,b,n,s\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{i},{},{},{},{}\n",
                self.h[i], self.b[i], self.n[i], self.s[i]
            ));
        }
        out
    }
}

/// Deterministic in `params.seed`; peaks, walk and noise use separate streams.
pub fn generate_scene(params: &ModelParams) -> Result<SyntheticScene> {
    params.validate()?;
    let h = generate_peaks(params, &mut params.stream(0))?;
    let b = generate_baseline(params, &mut params.stream(1))?;
    let n = generate_noise(params, &mut params.stream(2))?;
    let s: Vec<f64> = h
        .iter()
        .zip(b.iter())
        .zip(n.iter())
        .map(|((h, b), n)| h + b + n)
        .collect();
    Ok(SyntheticScene {
        h,
        b,
        n,
        s: Signal::new(s)?,
        seed: params.seed,
    })
}
