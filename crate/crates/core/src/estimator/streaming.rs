//! Online anchor selection with bounded memory.
//!
//! The estimator keeps the last `L` raw samples (for the moving average) and the
//! last `2T + 1` smoothed samples (for the minimum test and the cost). Once the
//! smoothed sample `j` is known, the candidate at `c = j - T` is decided and the
//! baseline value for index `c` is emitted. An index is therefore emitted
//! `T + L / 2` raw samples after it arrives (integer division), and never revised.
//!
//! Emitted values hold the most recent anchor, or the first smoothed sample
//! before any anchor exists. Because the next anchor is not yet known at
//! emission time, these values differ from [`interpolate`](super::interpolate)
//! between anchors. Each new anchor also yields a [`Segment`] describing the
//! now-final linear piece back to the previous anchor; expanding the segments
//! reproduces the batch baseline exactly between the first and last anchors.

use std::collections::VecDeque;

use super::{lerp, mean_of, smoothing_radii, window_cost, Anchor, EstimatorConfig, TiePolicy};
use crate::error::Result;

/// The linear piece between two consecutive anchors, covering `(from.index, to.index]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub from: Anchor,
    pub to: Anchor,
}

impl Segment {
    pub fn value_at(&self, index: usize) -> f64 {
        if index == self.to.index {
            self.to.value
        } else {
            lerp(&self.from, &self.to, index)
        }
    }

    pub fn values(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.from.index + 1..=self.to.index).map(move |i| (i, self.value_at(i)))
    }
}

/// Output for one emitted index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamStep {
    pub index: usize,
    /// Causal baseline value for `index`.
    pub baseline: f64,
    /// Smoothed signal value at `index`.
    pub smoothed: f64,
    /// Set when `index` was accepted as an anchor.
    pub anchor: Option<Anchor>,
    /// Set when the new anchor closes a segment with the previous one.
    pub segment: Option<Segment>,
}

/// Single-owner online estimator; see the module docs for the output contract.
#[derive(Debug, Clone)]
pub struct StreamingEstimator {
    config: EstimatorConfig,
    before: usize,
    after: usize,
    raw: VecDeque<f64>,
    smoothed: VecDeque<f64>,
    raw_count: usize,
    smoothed_count: usize,
    emitted: usize,
    prev_qualified: bool,
    first_smoothed: Option<f64>,
    last_anchor: Option<Anchor>,
    peak_occupancy: usize,
}

impl StreamingEstimator {
    pub fn new(config: EstimatorConfig) -> Result<Self> {
        config.validate()?;
        let (before, after) = smoothing_radii(config.smooth_len);
        Ok(Self {
            config,
            before,
            after,
            raw: VecDeque::with_capacity(config.smooth_len),
            smoothed: VecDeque::with_capacity(2 * config.scale + 1),
            raw_count: 0,
            smoothed_count: 0,
            emitted: 0,
            prev_qualified: false,
            first_smoothed: None,
            last_anchor: None,
            peak_occupancy: 0,
        })
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    /// Raw samples between arrival and emission.
    pub fn latency(&self) -> usize {
        self.config.scale + self.after
    }

    /// Upper bound on [`occupancy`](Self::occupancy): `2T + L + 1`.
    pub fn capacity(&self) -> usize {
        2 * self.config.scale + self.config.smooth_len + 1
    }

    /// Samples currently buffered.
    pub fn occupancy(&self) -> usize {
        self.raw.len() + self.smoothed.len()
    }

    /// Largest occupancy observed so far.
    pub fn peak_occupancy(&self) -> usize {
        self.peak_occupancy
    }

    pub fn last_anchor(&self) -> Option<Anchor> {
        self.last_anchor
    }

    /// Feeds one raw sample; returns the step for the index that became final, if any.
    pub fn push(&mut self, sample: f64) -> Option<StreamStep> {
        if self.raw.len() == self.config.smooth_len {
            self.raw.pop_front();
        }
        self.raw.push_back(sample);
        self.raw_count += 1;
        self.track_occupancy();

        let j = self.smoothed_count;
        if self.raw_count < j + self.after + 1 {
            return None;
        }
        let value = self.smoothed_at(j, self.raw_count - 1);
        self.advance(value)
    }

    /// Ends the stream, emitting every index not yet emitted.
    pub fn finish(&mut self) -> Vec<StreamStep> {
        let mut steps = Vec::new();
        if self.raw_count == 0 {
            return steps;
        }
        let last = self.raw_count - 1;
        while self.smoothed_count < self.raw_count {
            let value = self.smoothed_at(self.smoothed_count, last);
            steps.extend(self.advance(value));
        }
        // Indices within T of the end are never candidates.
        while self.emitted < self.raw_count {
            let offset = self.smoothed.len() - (self.smoothed_count - self.emitted);
            let smoothed = self.smoothed[offset];
            steps.push(self.emit(smoothed, None, None));
        }
        steps
    }

    /// Moving average for smoothed index `j`, with `last` the final raw index available.
    fn smoothed_at(&self, j: usize, last: usize) -> f64 {
        let lo = j.saturating_sub(self.before);
        let hi = (j + self.after).min(last);
        let buf_start = self.raw_count - self.raw.len();
        mean_of(self.raw.range(lo - buf_start..=hi - buf_start))
    }

    fn advance(&mut self, value: f64) -> Option<StreamStep> {
        let width = 2 * self.config.scale + 1;
        if self.smoothed.len() == width {
            self.smoothed.pop_front();
        }
        self.smoothed.push_back(value);
        self.smoothed_count += 1;
        self.first_smoothed.get_or_insert(value);
        self.track_occupancy();

        let scale = self.config.scale;
        let j = self.smoothed_count - 1;
        if j < scale {
            return None;
        }
        let center = j - scale;
        if center < scale {
            let smoothed = self.smoothed[center];
            return Some(self.emit(smoothed, None, None));
        }

        let window = self.smoothed.make_contiguous();
        let center_value = window[scale];
        let min = window.iter().copied().fold(f64::INFINITY, f64::min);
        let qualifies = center_value == min;
        let duplicate = self.config.tie_policy == TiePolicy::First
            && self.prev_qualified
            && window[scale - 1] == center_value;
        self.prev_qualified = qualifies;

        let mut anchor = None;
        let mut segment = None;
        if qualifies
            && !duplicate
            && window_cost(window.iter(), center_value) < self.config.cost_threshold
        {
            let new = Anchor::new(center, center_value);
            segment = self.last_anchor.map(|from| Segment { from, to: new });
            self.last_anchor = Some(new);
            anchor = Some(new);
        }
        Some(self.emit(center_value, anchor, segment))
    }

    fn emit(
        &mut self,
        smoothed: f64,
        anchor: Option<Anchor>,
        segment: Option<Segment>,
    ) -> StreamStep {
        let baseline = match self.last_anchor {
            Some(a) => a.value,
            None => self.first_smoothed.unwrap_or(smoothed),
        };
        let step = StreamStep {
            index: self.emitted,
            baseline,
            smoothed,
            anchor,
            segment,
        };
        self.emitted += 1;
        step
    }

    fn track_occupancy(&mut self) {
        self.peak_occupancy = self.peak_occupancy.max(self.occupancy());
    }
}
