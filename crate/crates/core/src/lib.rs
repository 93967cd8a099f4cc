//! Baseline (drift) estimation for dielectric leaf-wetness sensor signals.
//!
//! The estimator keeps scale-T local minima whose L1 window cost is below a
//! threshold and interpolates linearly between them. The crate also provides a
//! synthetic signal model with ground truth, error metrics, airPLS and quantile
//! regression comparators, CSV I/O, and the `lws-baseline` command-line tool.

pub mod cli;
pub mod comparators;
pub mod error;
pub mod estimator;
pub mod evaluation;
pub mod io;
pub mod model;
pub mod signal;

pub use error::{Error, Result};
pub use estimator::{
    estimate, interpolate, local_minima, select_anchors, smooth, Anchor, BaselineEstimate,
    EdgePolicy, EstimatorConfig, StreamingEstimator, TiePolicy,
};
pub use model::{generate_scene, ModelParams, SyntheticScene};
pub use signal::Signal;
