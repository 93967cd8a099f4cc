//! The sampled series shared by every module.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sensor sampling period in minutes used when nothing else is known.
pub const DEFAULT_SAMPLE_PERIOD: f64 = 15.0;

/// A uniformly sampled, finite, non-empty series of amplitudes in mV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    samples: Vec<f64>,
    sample_period: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        Self::with_period(samples, DEFAULT_SAMPLE_PERIOD)
    }

    pub fn with_period(samples: Vec<f64>, sample_period: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidSignal("empty series".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal(format!(
                "non-finite sample {} at index {i}",
                samples[i]
            )));
        }
        if !(sample_period.is_finite() && sample_period > 0.0) {
            return Err(Error::InvalidSignal(format!(
                "sample period must be positive (got {sample_period})"
            )));
        }
        Ok(Self {
            samples,
            sample_period,
        })
    }

    /// Sampling period in minutes.
    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Applies `f` elementwise, keeping the sampling period.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::with_period(
            self.samples.iter().map(|&v| f(v)).collect(),
            self.sample_period,
        )
    }
}

impl Deref for Signal {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.samples
    }
}

impl TryFrom<Vec<f64>> for Signal {
    type Error = Error;

    fn try_from(samples: Vec<f64>) -> Result<Self> {
        Signal::new(samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(Signal::new(vec![]).is_err());
        assert!(Signal::new(vec![1.0, f64::NAN]).is_err());
        assert!(Signal::new(vec![f64::INFINITY]).is_err());
        assert!(Signal::with_period(vec![1.0], 0.0).is_err());
    }

    #[test]
    fn default_period_is_fifteen_minutes() {
        let s = Signal::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(s.sample_period(), 15.0);
        assert_eq!(s.len(), 2);
    }
}
