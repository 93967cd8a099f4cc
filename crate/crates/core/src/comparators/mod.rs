//! Reference baseline estimators used for benchmarking: airPLS and global
//! polynomial quantile regression.

pub mod airpls;
pub mod banded;
pub mod quantile;

pub use airpls::{airpls, airpls_fit, AirPlsConfig, AirPlsFit};
pub use quantile::{pinball_loss, quantile_poly, quantile_poly_fit, QuantRegConfig, QuantRegFit};
