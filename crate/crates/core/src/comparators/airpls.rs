//! Adaptive iteratively reweighted penalized least squares (airPLS).
//!
//! Each iteration fits a weighted Whittaker smoother, then zeroes the weight of
//! every point above the fit and raises the weight of points below it
//! exponentially in their share of the total negative residual.

use serde::{Deserialize, Serialize};

use super::banded::whittaker_smooth;
use crate::error::{Error, Result};
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AirPlsConfig {
    pub lambda: f64,
    pub max_iter: usize,
    /// Difference order of the roughness penalty, 1 or 2.
    pub order: usize,
    /// Stop once the summed negative residual falls below `tolerance * |y|_1`.
    pub tolerance: f64,
}

impl Default for AirPlsConfig {
    fn default() -> Self {
        Self {
            lambda: 125_577.0,
            max_iter: 15,
            order: 2,
            tolerance: 1e-3,
        }
    }
}

impl AirPlsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "airPLS lambda {}",
                self.lambda
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidConfig(
                "airPLS max_iter must be at least 1".into(),
            ));
        }
        if !(1..=2).contains(&self.order) {
            return Err(Error::InvalidConfig(format!(
                "airPLS order {} not in {{1, 2}}",
                self.order
            )));
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "airPLS tolerance {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AirPlsFit {
    pub baseline: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub fn airpls_fit(y: &[f64], config: &AirPlsConfig) -> Result<AirPlsFit> {
    config.validate()?;
    let n = y.len();
    if n < config.order + 2 {
        return Err(Error::SingularSystem(format!(
            "series of length {n} is too short for difference order {}",
            config.order
        )));
    }
    let abs_sum: f64 = y.iter().map(|v| v.abs()).sum();
    let mut weights = vec![1.0; n];
    let mut iteration = 1;
    loop {
        let z = whittaker_smooth(y, &weights, config.lambda, config.order)?;
        let residual: Vec<f64> = y.iter().zip(&z).map(|(y, z)| y - z).collect();
        let neg_sum: f64 = residual.iter().filter(|d| **d < 0.0).map(|d| -d).sum();
        let converged = neg_sum < config.tolerance * abs_sum || neg_sum == 0.0;
        if converged || iteration == config.max_iter {
            return Ok(AirPlsFit {
                baseline: z,
                iterations: iteration,
                converged,
            });
        }
        let scale = iteration as f64 / neg_sum;
        for (w, d) in weights.iter_mut().zip(&residual) {
            *w = if *d < 0.0 {
                (scale * d.abs()).exp()
            } else {
                0.0
            };
        }
        // The end points always keep a small weight so the system stays definite.
        let closest = residual
            .iter()
            .copied()
            .filter(|d| *d < 0.0)
            .fold(f64::NEG_INFINITY, f64::max);
        weights[0] = (scale * closest).exp();
        weights[n - 1] = weights[0];
        iteration += 1;
    }
}

pub fn airpls(signal: &Signal, config: &AirPlsConfig) -> Result<Signal> {
    let fit = airpls_fit(signal, config)?;
    Signal::with_period(fit.baseline, signal.sample_period())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn constant_signal_is_reproduced() {
        let y = vec![3.5; 200];
        let fit = airpls_fit(&y, &AirPlsConfig::default()).unwrap();
        for v in &fit.baseline {
            assert!((v - 3.5).abs() < 1e-9);
        }
    }

    #[test]
    fn smooth_peak_free_signal_is_tracked() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noise = Normal::new(0.0, 0.1).unwrap();
        let clean: Vec<f64> = (0..1000).map(|i| 2.0 + 0.002 * i as f64).collect();
        let y: Vec<f64> = clean.iter().map(|c| c + noise.sample(&mut rng)).collect();
        let z = airpls(&Signal::new(y).unwrap(), &AirPlsConfig::default()).unwrap();
        // The fit sinks toward the lower envelope but stays within the noise scale.
        let worst = z
            .iter()
            .zip(&clean)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 0.5, "max deviation {worst}");
    }

    #[test]
    fn peaks_are_rejected() {
        let y: Vec<f64> = (0..400)
            .map(|i| {
                let x = i as f64;
                1.0 + 10.0 * (-(x - 200.0).powi(2) / 50.0).exp()
            })
            .collect();
        let cfg = AirPlsConfig {
            lambda: 1e4,
            ..AirPlsConfig::default()
        };
        let z = airpls_fit(&y, &cfg).unwrap().baseline;
        assert!((z[200] - 1.0).abs() < 0.1, "baseline under peak {}", z[200]);
    }

    #[test]
    fn shift_equivariant_at_fixed_iterations() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let noise = Normal::new(0.0, 0.3).unwrap();
        let y: Vec<f64> = (0..300)
            .map(|i| (i as f64 / 25.0).sin() + noise.sample(&mut rng))
            .collect();
        let cfg = AirPlsConfig {
            tolerance: 0.0,
            lambda: 500.0,
            ..AirPlsConfig::default()
        };
        let base = airpls_fit(&y, &cfg).unwrap();
        let shifted: Vec<f64> = y.iter().map(|v| v + 7.0).collect();
        let moved = airpls_fit(&shifted, &cfg).unwrap();
        assert_eq!(base.iterations, moved.iterations);
        for (a, b) in base.baseline.iter().zip(&moved.baseline) {
            assert!((b - a - 7.0).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(airpls_fit(&[1.0, 2.0, 3.0], &AirPlsConfig::default()).is_err());
        let cfg = AirPlsConfig {
            order: 3,
            ..AirPlsConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = AirPlsConfig {
            lambda: 0.0,
            ..AirPlsConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
