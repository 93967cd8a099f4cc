//! Global polynomial quantile regression fitted by iteratively reweighted least squares.
//!
//! The index axis is mapped onto `[-1, 1]` and expanded in Legendre polynomials.
//! Each iteration solves a weighted least-squares problem with weights
//! `tau / |r|` above the curve and `(1 - tau) / |r|` below it, which makes the
//! weighted squared loss match the pinball loss at the current residuals.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantRegConfig {
    pub degree: usize,
    pub quantile: f64,
    pub max_iter: usize,
    /// Convergence bound on the largest coefficient change.
    pub tolerance: f64,
}

impl Default for QuantRegConfig {
    fn default() -> Self {
        Self {
            degree: 4,
            quantile: 0.05,
            max_iter: 500,
            tolerance: 1e-8,
        }
    }
}

impl QuantRegConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.quantile > 0.0 && self.quantile < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "quantile {} not in (0, 1)",
                self.quantile
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidConfig(
                "quantile max_iter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantRegFit {
    pub curve: Vec<f64>,
    /// Legendre coefficients on the normalized axis.
    pub coefficients: Vec<f64>,
    pub iterations: usize,
    /// False when `max_iter` ran out; `curve` is then the lowest-loss iterate.
    pub converged: bool,
}

/// `sum rho_tau(r)` with `rho_tau(r) = r (tau - 1[r < 0])`.
pub fn pinball_loss(residuals: impl IntoIterator<Item = f64>, tau: f64) -> f64 {
    residuals
        .into_iter()
        .map(|r| if r >= 0.0 { tau * r } else { (tau - 1.0) * r })
        .sum()
}

fn legendre_design(n: usize, degree: usize) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(n, degree + 1);
    for i in 0..n {
        let t = if n == 1 {
            0.0
        } else {
            2.0 * i as f64 / (n - 1) as f64 - 1.0
        };
        x[(i, 0)] = 1.0;
        if degree >= 1 {
            x[(i, 1)] = t;
        }
        for k in 1..degree {
            let kf = k as f64;
            x[(i, k + 1)] = ((2.0 * kf + 1.0) * t * x[(i, k)] - kf * x[(i, k - 1)]) / (kf + 1.0);
        }
    }
    x
}

fn weighted_lstsq(x: &DMatrix<f64>, y: &DVector<f64>, w: &[f64]) -> Result<DVector<f64>> {
    let mut xw = x.clone();
    let mut yw = y.clone();
    for (i, wi) in w.iter().enumerate() {
        let s = wi.sqrt();
        xw.row_mut(i).scale_mut(s);
        yw[i] *= s;
    }
    let qr = xw.qr();
    let qty = qr.q().transpose() * yw;
    qr.r()
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::SingularSystem("rank-deficient polynomial design".into()))
}

pub fn quantile_poly_fit(y: &[f64], config: &QuantRegConfig) -> Result<QuantRegFit> {
    config.validate()?;
    let n = y.len();
    if n <= config.degree + 1 {
        return Err(Error::InvalidConfig(format!(
            "series of length {n} is too short for degree {}",
            config.degree
        )));
    }
    let tau = config.quantile;
    let x = legendre_design(n, config.degree);
    let yv = DVector::from_column_slice(y);
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    // Residual floor keeps the weights bounded near interpolated points.
    let floor = 1e-9 * scale;

    let mut beta = weighted_lstsq(&x, &yv, &vec![1.0; n])?;
    let mut best = (f64::INFINITY, beta.clone());
    let mut weights = vec![0.0; n];
    for iteration in 1..=config.max_iter {
        let residual = &yv - &x * &beta;
        let loss = pinball_loss(residual.iter().copied(), tau);
        if loss < best.0 {
            best = (loss, beta.clone());
        }
        for (w, r) in weights.iter_mut().zip(residual.iter()) {
            let side = if *r >= 0.0 { tau } else { 1.0 - tau };
            *w = side / r.abs().max(floor);
        }
        let next = weighted_lstsq(&x, &yv, &weights)?;
        let change = (&next - &beta).amax();
        beta = next;
        if change < config.tolerance * (1.0 + beta.amax()) {
            return Ok(finish(&x, beta, iteration, true));
        }
    }
    let residual = &yv - &x * &beta;
    if pinball_loss(residual.iter().copied(), tau) < best.0 {
        best.1 = beta;
    }
    Ok(finish(&x, best.1, config.max_iter, false))
}

fn finish(x: &DMatrix<f64>, beta: DVector<f64>, iterations: usize, converged: bool) -> QuantRegFit {
    QuantRegFit {
        curve: (x * &beta).iter().copied().collect(),
        coefficients: beta.iter().copied().collect(),
        iterations,
        converged,
    }
}

pub fn quantile_poly(signal: &Signal, config: &QuantRegConfig) -> Result<Signal> {
    let fit = quantile_poly_fit(signal, config)?;
    Signal::with_period(fit.curve, signal.sample_period())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pinball_values() {
        assert_eq!(pinball_loss([2.0], 0.25), 0.5);
        assert_eq!(pinball_loss([-2.0], 0.25), 1.5);
        assert_eq!(pinball_loss([0.0], 0.9), 0.0);
    }

    #[test]
    fn exact_polynomials_are_recovered() {
        let n = 300;
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / 10.0;
                3.0 - 0.5 * t + 0.02 * t * t - 0.0004 * t * t * t
            })
            .collect();
        for tau in [0.05, 0.5, 0.9] {
            for degree in [3, 4] {
                let cfg = QuantRegConfig {
                    degree,
                    quantile: tau,
                    ..QuantRegConfig::default()
                };
                let fit = quantile_poly_fit(&y, &cfg).unwrap();
                for (a, b) in fit.curve.iter().zip(&y) {
                    assert!(
                        (a - b).abs() <= 1e-6 * b.abs().max(1.0),
                        "tau {tau} degree {degree}"
                    );
                }
            }
        }
    }

    #[test]
    fn constant_median() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let mut y: Vec<f64> = (0..101).map(|_| rng.random_range(-3.0..8.0)).collect();
            let cfg = QuantRegConfig {
                degree: 0,
                quantile: 0.5,
                ..QuantRegConfig::default()
            };
            let fit = quantile_poly_fit(&y, &cfg).unwrap();
            y.sort_by(|a, b| a.total_cmp(b));
            let median = y[50];
            assert!(
                (fit.curve[0] - median).abs() <= 1e-6 * median.abs().max(1.0),
                "{} vs {median}",
                fit.curve[0]
            );
        }
    }

    #[test]
    fn low_quantile_lies_below_most_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 2000;
        let y: Vec<f64> = (0..n)
            .map(|i| (i as f64 / 300.0).cos() * 2.0 + rng.random::<f64>().powi(3) * 5.0)
            .collect();
        for tau in [0.02, 0.05, 0.2] {
            let cfg = QuantRegConfig {
                quantile: tau,
                ..QuantRegConfig::default()
            };
            let fit = quantile_poly_fit(&y, &cfg).unwrap();
            let below = y.iter().zip(&fit.curve).filter(|(y, c)| y < c).count() as f64 / n as f64;
            assert!(below <= tau + 2.0 / (n as f64).sqrt(), "tau {tau}: {below}");
        }
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = QuantRegConfig {
            quantile: 1.0,
            ..QuantRegConfig::default()
        };
        assert!(quantile_poly_fit(&[1.0; 10], &cfg).is_err());
        assert!(quantile_poly_fit(&[1.0; 5], &QuantRegConfig::default()).is_err());
    }
}
