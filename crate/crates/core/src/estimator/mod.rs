//! Baseline estimation by L1-cost selection of scale-T local minima.
//!
//! The batch pipeline is
//!
//! 1. centered moving average of length `L` (shrinking windows at the edges),
//! 2. selection of every index that is the minimum of its `[i - T, i + T]`
//!    window and whose mean absolute deviation from that minimum over the
//!    window is below `C0`,
//! 3. piecewise-linear reconstruction through the selected anchors.
//!
//! [`streaming::StreamingEstimator`] runs the same selection online with
//! `O(T + L)` memory and yields the same anchors as [`select_anchors`].

pub mod streaming;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

pub use streaming::{Segment, StreamStep, StreamingEstimator};

/// How the baseline is extended before the first and after the last anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgePolicy {
    #[default]
    Hold,
    LinearExtend,
}

/// Which indices of a plateau of equal window minima are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// Only the first index of each run of consecutive, equal-valued minima.
    #[default]
    First,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Half-width of the observation window, in samples.
    pub scale: usize,
    /// Anchors need a window cost strictly below this value (mV).
    pub cost_threshold: f64,
    /// Length of the moving-average pre-filter.
    pub smooth_len: usize,
    pub edge_policy: EdgePolicy,
    pub tie_policy: TiePolicy,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            scale: 5,
            cost_threshold: 1.0,
            smooth_len: 10,
            edge_policy: EdgePolicy::Hold,
            tie_policy: TiePolicy::First,
        }
    }
}

impl EstimatorConfig {
    pub fn new(scale: usize, cost_threshold: f64) -> Self {
        Self {
            scale,
            cost_threshold,
            ..Self::default()
        }
    }

    pub fn with_smooth_len(mut self, smooth_len: usize) -> Self {
        self.smooth_len = smooth_len;
        self
    }

    pub fn with_edge_policy(mut self, edge_policy: EdgePolicy) -> Self {
        self.edge_policy = edge_policy;
        self
    }

    pub fn with_tie_policy(mut self, tie_policy: TiePolicy) -> Self {
        self.tie_policy = tie_policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale < 1 {
            return Err(Error::InvalidConfig("scale must be at least 1".into()));
        }
        if !(self.cost_threshold.is_finite() && self.cost_threshold > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "cost threshold must be positive (got {})",
                self.cost_threshold
            )));
        }
        if self.smooth_len < 1 {
            return Err(Error::InvalidLength(self.smooth_len));
        }
        Ok(())
    }
}

/// A selected baseline point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub index: usize,
    pub value: f64,
}

impl Anchor {
    pub fn new(index: usize, value: f64) -> Self {
        Self { index, value }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineEstimate {
    pub anchors: Vec<Anchor>,
    pub baseline: Signal,
    /// The pre-filtered signal the anchors were measured on.
    pub smoothed: Signal,
    pub config: EstimatorConfig,
}

/// Samples before and after the center of a length-`len` moving-average window.
///
/// Odd lengths are symmetric; even lengths lean one sample forward.
pub(crate) fn smoothing_radii(len: usize) -> (usize, usize) {
    let after = len / 2;
    (len - 1 - after, after)
}

pub(crate) fn mean_of<'a>(values: impl Iterator<Item = &'a f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    sum / count as f64
}

pub(crate) fn window_cost<'a>(window: impl Iterator<Item = &'a f64>, center: f64) -> f64 {
    let (sum, count) = window.fold((0.0, 0usize), |(s, c), v| (s + (v - center).abs(), c + 1));
    sum / count as f64
}

/// Centered moving average of length `len` with shrinking windows at the edges.
pub fn smooth(signal: &[f64], len: usize) -> Result<Vec<f64>> {
    if len < 1 {
        return Err(Error::InvalidLength(len));
    }
    if signal.is_empty() {
        return Err(Error::InvalidSignal("empty series".into()));
    }
    let n = signal.len();
    let (before, after) = smoothing_radii(len);
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(before);
            let hi = (i + after).min(n - 1);
            mean_of(signal[lo..=hi].iter())
        })
        .collect())
}

/// Indices `i` in `[T, N-1-T]` where `signal[i]` is the minimum of `signal[i-T..=i+T]`.
pub fn local_minima(signal: &[f64], scale: usize, tie: TiePolicy) -> Vec<usize> {
    let n = signal.len();
    let mut out = Vec::new();
    if scale == 0 || n < 2 * scale + 1 {
        return out;
    }
    let width = 2 * scale + 1;
    // Monotone deque of indices whose values increase front to back.
    let mut deque: VecDeque<usize> = VecDeque::with_capacity(width);
    let mut prev_qualified = false;
    for j in 0..n {
        while let Some(&back) = deque.back() {
            if signal[back] > signal[j] {
                deque.pop_back();
            } else {
                break;
            }
        }
        deque.push_back(j);
        if j + 1 < width {
            continue;
        }
        let start = j + 1 - width;
        while deque.front().is_some_and(|&f| f < start) {
            deque.pop_front();
        }
        let center = start + scale;
        let min = signal[*deque.front().expect("window is non-empty")];
        let qualifies = signal[center] == min;
        let duplicate =
            tie == TiePolicy::First && prev_qualified && signal[center - 1] == signal[center];
        if qualifies && !duplicate {
            out.push(center);
        }
        prev_qualified = qualifies;
    }
    out
}

/// Mean absolute deviation from `signal[t0]` over the window `[t0 - T, t0 + T]`.
pub fn cost(signal: &[f64], t0: usize, scale: usize) -> Result<f64> {
    let start = t0 as isize - scale as isize;
    let end = t0 as isize + scale as isize;
    if start < 0 || end >= signal.len() as isize {
        return Err(Error::OutOfRange {
            start,
            end,
            len: signal.len(),
        });
    }
    Ok(window_cost(
        signal[t0 - scale..=t0 + scale].iter(),
        signal[t0],
    ))
}

/// Scale-T local minima whose cost is strictly below the threshold.
///
/// Operates on `signal` as given; [`estimate`] passes the smoothed series.
/// An empty result is not an error here.
pub fn select_anchors(signal: &[f64], config: &EstimatorConfig) -> Result<Vec<Anchor>> {
    config.validate()?;
    let scale = config.scale;
    Ok(local_minima(signal, scale, config.tie_policy)
        .into_iter()
        .filter(|&i| {
            window_cost(signal[i - scale..=i + scale].iter(), signal[i]) < config.cost_threshold
        })
        .map(|i| Anchor::new(i, signal[i]))
        .collect())
}

/// Value at `index` of the line through `a` and `b`.
pub(crate) fn lerp(a: &Anchor, b: &Anchor, index: usize) -> f64 {
    let span = b.index as f64 - a.index as f64;
    let t = (index as f64 - a.index as f64) / span;
    a.value + t * (b.value - a.value)
}

/// Piecewise-linear baseline of length `n` through `anchors`.
pub fn interpolate(anchors: &[Anchor], n: usize, edge: EdgePolicy) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidSignal("empty series".into()));
    }
    let (first, last) = match (anchors.first(), anchors.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::NoAnchors),
    };
    for (k, a) in anchors.iter().enumerate() {
        if a.index >= n || (k > 0 && anchors[k - 1].index >= a.index) {
            return Err(Error::InvalidAnchors {
                index: a.index,
                len: n,
            });
        }
    }
    if anchors.len() == 1 {
        return Ok(vec![first.value; n]);
    }

    let mut out = vec![0.0; n];
    for pair in anchors.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        for (i, slot) in out.iter_mut().enumerate().take(b.index + 1).skip(a.index) {
            *slot = lerp(a, b, i);
        }
    }
    // Anchor values are exact, not recomputed through the line.
    for a in anchors {
        out[a.index] = a.value;
    }
    match edge {
        EdgePolicy::Hold => {
            out[..first.index].fill(first.value);
            out[last.index + 1..].fill(last.value);
        }
        EdgePolicy::LinearExtend => {
            let (a0, a1) = (&anchors[0], &anchors[1]);
            for (i, slot) in out.iter_mut().enumerate().take(first.index) {
                *slot = lerp(a0, a1, i);
            }
            let (b0, b1) = (&anchors[anchors.len() - 2], last);
            for (i, slot) in out.iter_mut().enumerate().skip(last.index + 1) {
                *slot = lerp(b0, b1, i);
            }
        }
    }
    Ok(out)
}

/// Smooth, select anchors on the smoothed series, and interpolate.
pub fn estimate(signal: &Signal, config: &EstimatorConfig) -> Result<BaselineEstimate> {
    config.validate()?;
    let n = signal.len();
    if n <= 2 * config.scale + config.smooth_len {
        return Err(Error::InvalidConfig(format!(
            "signal of length {n} is too short for scale {} and smoothing length {}",
            config.scale, config.smooth_len
        )));
    }
    let smoothed = smooth(signal, config.smooth_len)?;
    let anchors = select_anchors(&smoothed, config)?;
    let baseline = interpolate(&anchors, n, config.edge_policy)?;
    Ok(BaselineEstimate {
        anchors,
        baseline: Signal::with_period(baseline, signal.sample_period())?,
        smoothed: Signal::with_period(smoothed, signal.sample_period())?,
        config: *config,
    })
}
