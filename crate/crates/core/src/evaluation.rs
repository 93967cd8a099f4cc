//! Error metrics against ground truth and Monte-Carlo benchmarks over synthetic scenes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::comparators::{airpls, quantile_poly, AirPlsConfig, QuantRegConfig};
use crate::error::{Error, Result};
use crate::estimator::{estimate, Anchor, BaselineEstimate, EstimatorConfig};
use crate::model::{generate_scene, ModelParams, SyntheticScene};

/// Wet/dry offset above the baseline, in mV.
pub const DEFAULT_THRESHOLD: f64 = 5.0;
pub const DEFAULT_TRIALS: usize = 55;

fn check_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Mean squared error of the anchor values against the truth at the anchor indices.
pub fn mse_selected(anchors: &[Anchor], truth: &[f64]) -> Result<f64> {
    if anchors.is_empty() {
        return Err(Error::NoAnchors);
    }
    let mut sum = 0.0;
    for a in anchors {
        let t = truth.get(a.index).ok_or(Error::LengthMismatch {
            left: a.index + 1,
            right: truth.len(),
        })?;
        sum += (a.value - t).powi(2);
    }
    Ok(sum / anchors.len() as f64)
}

pub fn mse_full(estimated: &[f64], truth: &[f64]) -> Result<f64> {
    check_len(estimated, truth)?;
    if estimated.is_empty() {
        return Err(Error::InvalidSignal("empty series".into()));
    }
    let sum: f64 = estimated
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    Ok(sum / estimated.len() as f64)
}

/// False-alarm and missed-detection indices.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ErrorSets {
    pub false_alarms: Vec<usize>,
    pub missed: Vec<usize>,
    pub len: usize,
}

impl ErrorSets {
    pub fn p_fa(&self) -> f64 {
        self.false_alarms.len() as f64 / self.len as f64
    }

    pub fn p_md(&self) -> f64 {
        self.missed.len() as f64 / self.len as f64
    }

    /// Sorted union of both sets.
    pub fn all(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .false_alarms
            .iter()
            .chain(&self.missed)
            .copied()
            .collect();
        v.sort_unstable();
        v
    }
}

/// FA = {i | b̂+S < s ≤ b+S}, MD = {i | b+S < s ≤ b̂+S}.
pub fn fa_md_sets(s: &[f64], b_true: &[f64], b_hat: &[f64], threshold: f64) -> Result<ErrorSets> {
    check_len(s, b_true)?;
    check_len(s, b_hat)?;
    let mut sets = ErrorSets {
        len: s.len(),
        ..ErrorSets::default()
    };
    for i in 0..s.len() {
        let truth = b_true[i] + threshold;
        let est = b_hat[i] + threshold;
        if est < s[i] && s[i] <= truth {
            sets.false_alarms.push(i);
        } else if truth < s[i] && s[i] <= est {
            sets.missed.push(i);
        }
    }
    Ok(sets)
}

/// Field-data variant without ground truth: the adaptive threshold `b̂ + S`
/// plays the reference and the fixed threshold `S` plays the estimate.
pub fn fa_md_field(s: &[f64], b_hat: &[f64], threshold: f64) -> Result<ErrorSets> {
    fa_md_sets(s, b_hat, &vec![0.0; s.len()], threshold)
}

/// Whether the agreed-wet condition includes the `S` offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WetCondition {
    /// `s(j) > b(j) + S` and `s(j) > b̂(j) + S`.
    #[default]
    WithOffset,
    /// `s(j) > b(j)` and `s(j) > b̂(j)`.
    NoOffset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WetDistances {
    /// `(index, distance)` for every queried error index.
    pub distances: Vec<(usize, usize)>,
    /// Relative frequency of each distance.
    pub histogram: BTreeMap<usize, f64>,
}

impl WetDistances {
    /// CSV with header `distance,frequency`.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("distance,frequency\n");
        for (d, f) in &self.histogram {
            let _ = writeln!(out, "{d},{f}");
        }
        out
    }
}

pub fn normalized_histogram(values: impl IntoIterator<Item = usize>) -> BTreeMap<usize, f64> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut total = 0usize;
    for v in values {
        *counts.entry(v).or_default() += 1;
        total += 1;
    }
    counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / total as f64))
        .collect()
}

/// Distance from each error index to the nearest sample that is wet under both thresholds.
pub fn distance_to_wet(
    s: &[f64],
    b_true: &[f64],
    b_hat: &[f64],
    threshold: f64,
    err_indices: &[usize],
    condition: WetCondition,
) -> Result<WetDistances> {
    check_len(s, b_true)?;
    check_len(s, b_hat)?;
    let offset = match condition {
        WetCondition::WithOffset => threshold,
        WetCondition::NoOffset => 0.0,
    };
    let n = s.len();
    let wet: Vec<bool> = (0..n)
        .map(|j| s[j] > b_true[j] + offset && s[j] > b_hat[j] + offset)
        .collect();
    if !wet.iter().any(|&w| w) {
        return Err(Error::NoWetPhase);
    }
    // Nearest wet index at or before / at or after each position.
    let mut left = vec![None; n];
    let mut last = None;
    for j in 0..n {
        if wet[j] {
            last = Some(j);
        }
        left[j] = last;
    }
    let mut right = vec![None; n];
    let mut next = None;
    for j in (0..n).rev() {
        if wet[j] {
            next = Some(j);
        }
        right[j] = next;
    }
    let mut distances = Vec::with_capacity(err_indices.len());
    for &i in err_indices {
        if i >= n {
            return Err(Error::LengthMismatch {
                left: i + 1,
                right: n,
            });
        }
        let d = match (left[i], right[i]) {
            (Some(l), Some(r)) => (i - l).min(r - i),
            (Some(l), None) => i - l,
            (None, Some(r)) => r - i,
            (None, None) => unreachable!("at least one wet sample exists"),
        };
        distances.push((i, d));
    }
    let histogram = normalized_histogram(distances.iter().map(|&(_, d)| d));
    Ok(WetDistances {
        distances,
        histogram,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Absent without ground truth.
    pub mse_selected: Option<f64>,
    pub mse_full: Option<f64>,
    pub p_fa: f64,
    pub p_md: f64,
    /// Empty when no sample is wet under both thresholds.
    pub d_histogram: BTreeMap<usize, f64>,
    pub n_anchors: usize,
    pub threshold: f64,
}

/// Metrics of `est` against the scene's true baseline.
pub fn evaluate_scene(
    scene: &SyntheticScene,
    est: &BaselineEstimate,
    threshold: f64,
) -> Result<EvalReport> {
    let sets = fa_md_sets(&scene.s, &scene.b, &est.baseline, threshold)?;
    let d_histogram = match distance_to_wet(
        &scene.s,
        &scene.b,
        &est.baseline,
        threshold,
        &sets.all(),
        WetCondition::default(),
    ) {
        Ok(d) => d.histogram,
        Err(Error::NoWetPhase) => BTreeMap::new(),
        Err(e) => return Err(e),
    };
    Ok(EvalReport {
        mse_selected: Some(mse_selected(&est.anchors, &scene.b)?),
        mse_full: Some(mse_full(&est.baseline, &scene.b)?),
        p_fa: sets.p_fa(),
        p_md: sets.p_md(),
        d_histogram,
        n_anchors: est.anchors.len(),
        threshold,
    })
}

/// Metrics of the adaptive threshold against a fixed one, for data without ground truth.
pub fn evaluate_field(s: &[f64], est: &BaselineEstimate, threshold: f64) -> Result<EvalReport> {
    let zeros = vec![0.0; s.len()];
    let sets = fa_md_field(s, &est.baseline, threshold)?;
    let d_histogram = match distance_to_wet(
        s,
        &est.baseline,
        &zeros,
        threshold,
        &sets.all(),
        WetCondition::default(),
    ) {
        Ok(d) => d.histogram,
        Err(Error::NoWetPhase) => BTreeMap::new(),
        Err(e) => return Err(e),
    };
    Ok(EvalReport {
        mse_selected: None,
        mse_full: None,
        p_fa: sets.p_fa(),
        p_md: sets.p_md(),
        d_histogram,
        n_anchors: est.anchors.len(),
        threshold,
    })
}

/// Scene for trial `k`; trial seeds are consecutive from `params.seed`.
pub fn trial_scene(params: &ModelParams, trial: usize) -> Result<SyntheticScene> {
    generate_scene(&params.with_seed(params.seed.wrapping_add(trial as u64)))
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Half-width of the normal-approximation 95% confidence interval of the mean.
fn ci95(values: &[f64]) -> f64 {
    let k = values.len();
    if k < 2 {
        return f64::INFINITY;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (k - 1) as f64;
    1.96 * (var / k as f64).sqrt()
}

/// Per-trial result for one estimator configuration; `None` when no anchor was selected.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TrialCell {
    n_anchors: usize,
    mse_selected: f64,
    mse_full: f64,
    p_fa: f64,
    p_md: f64,
}

fn run_cell(
    scene: &SyntheticScene,
    config: &EstimatorConfig,
    threshold: f64,
) -> Result<Option<TrialCell>> {
    let est = match estimate(&scene.s, config) {
        Ok(e) => e,
        Err(Error::NoAnchors) => return Ok(None),
        Err(e) => return Err(e),
    };
    let sets = fa_md_sets(&scene.s, &scene.b, &est.baseline, threshold)?;
    Ok(Some(TrialCell {
        n_anchors: est.anchors.len(),
        mse_selected: mse_selected(&est.anchors, &scene.b)?,
        mse_full: mse_full(&est.baseline, &scene.b)?,
        p_fa: sets.p_fa(),
        p_md: sets.p_md(),
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub scale: usize,
    pub cost_threshold: f64,
    pub trials: usize,
    /// Trials in which no anchor was selected; excluded from the error means.
    pub failures: usize,
    /// Mean anchor count over all trials, failures counted as zero.
    pub mean_anchors: f64,
    pub mean_mse_selected: f64,
    pub mse_selected_ci95: f64,
    pub mean_mse_full: f64,
    pub mean_p_fa: f64,
    pub mean_p_md: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub model: ModelParams,
    pub threshold: f64,
    pub trials: usize,
    pub cells: Vec<CellSummary>,
}

impl BenchmarkReport {
    pub fn cell(&self, scale: usize, cost_threshold: f64) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.scale == scale && c.cost_threshold == cost_threshold)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "scale_T,cost_C0,trials,failures,mean_anchors,mse_selected,mse_selected_ci95,mse_full,p_fa,p_md\n",
        );
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                c.scale,
                c.cost_threshold,
                c.trials,
                c.failures,
                c.mean_anchors,
                c.mean_mse_selected,
                c.mse_selected_ci95,
                c.mean_mse_full,
                c.mean_p_fa,
                c.mean_p_md
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:>5} {:>6} {:>8} {:>10} {:>10} {:>10} {:>10} {:>10}\n",
            "T", "C0", "fail", "|anchors|", "mse_sel", "mse_full", "P_FA", "P_MD"
        );
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{:>5} {:>6} {:>8} {:>10.1} {:>10.4} {:>10.4} {:>10.2e} {:>10.2e}",
                c.scale,
                c.cost_threshold,
                c.failures,
                c.mean_anchors,
                c.mean_mse_selected,
                c.mean_mse_full,
                c.mean_p_fa,
                c.mean_p_md
            );
        }
        out
    }
}

/// Monte-Carlo grid over estimator configurations; trials run in parallel and
/// are merged in seed order.
pub fn benchmark(
    params: &ModelParams,
    grid: &[EstimatorConfig],
    n_trials: usize,
    threshold: f64,
) -> Result<BenchmarkReport> {
    if n_trials < 1 {
        return Err(Error::InvalidConfig("n_trials must be at least 1".into()));
    }
    params.validate()?;
    for c in grid {
        c.validate()?;
    }
    let per_trial: Vec<Vec<Option<TrialCell>>> = (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let scene = trial_scene(params, trial)?;
            grid.iter()
                .map(|c| run_cell(&scene, c, threshold))
                .collect()
        })
        .collect::<Result<_>>()?;

    let cells = grid
        .iter()
        .enumerate()
        .map(|(k, config)| {
            let ok: Vec<TrialCell> = per_trial.iter().filter_map(|t| t[k]).collect();
            let sel: Vec<f64> = ok.iter().map(|c| c.mse_selected).collect();
            CellSummary {
                scale: config.scale,
                cost_threshold: config.cost_threshold,
                trials: n_trials,
                failures: n_trials - ok.len(),
                mean_anchors: ok.iter().map(|c| c.n_anchors as f64).sum::<f64>() / n_trials as f64,
                mean_mse_selected: mean(&sel),
                mse_selected_ci95: ci95(&sel),
                mean_mse_full: mean(&ok.iter().map(|c| c.mse_full).collect::<Vec<_>>()),
                mean_p_fa: mean(&ok.iter().map(|c| c.p_fa).collect::<Vec<_>>()),
                mean_p_md: mean(&ok.iter().map(|c| c.p_md).collect::<Vec<_>>()),
            }
        })
        .collect();
    Ok(BenchmarkReport {
        model: *params,
        threshold,
        trials: n_trials,
        cells,
    })
}

/// Cartesian product of scales and cost thresholds sharing `base`'s other settings.
pub fn config_grid(
    base: &EstimatorConfig,
    scales: &[usize],
    thresholds: &[f64],
) -> Vec<EstimatorConfig> {
    scales
        .iter()
        .flat_map(|&scale| {
            thresholds
                .iter()
                .map(move |&cost_threshold| EstimatorConfig {
                    scale,
                    cost_threshold,
                    ..*base
                })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialComparison {
    pub seed: u64,
    /// `NaN` when the proposed estimator selected no anchor.
    pub proposed: f64,
    pub airpls: f64,
    pub quantile: f64,
}

impl TrialComparison {
    /// proposed < airPLS < quantile regression.
    pub fn ordered(&self) -> bool {
        self.proposed < self.airpls && self.airpls < self.quantile
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub model: ModelParams,
    pub estimator: EstimatorConfig,
    pub airpls: AirPlsConfig,
    pub quantile: QuantRegConfig,
    pub trials: Vec<TrialComparison>,
    pub mean_proposed: f64,
    pub mean_airpls: f64,
    pub mean_quantile: f64,
    /// Share of trials with proposed < airPLS < quantile regression.
    pub ordered_fraction: f64,
}

impl ComparisonReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,mse_full\n");
        for (name, v) in self.methods() {
            let _ = writeln!(out, "{name},{v}");
        }
        out
    }

    pub fn trials_csv(&self) -> String {
        let mut out = String::from("seed,proposed,airpls,quantile\n");
        for t in &self.trials {
            let _ = writeln!(out, "{},{},{},{}", t.seed, t.proposed, t.airpls, t.quantile);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{:<12} {:>10}\n", "method", "mse_full");
        for (name, v) in self.methods() {
            let _ = writeln!(out, "{name:<12} {v:>10.4}");
        }
        let _ = writeln!(
            out,
            "ordered in {:.1}% of {} trials",
            100.0 * self.ordered_fraction,
            self.trials.len()
        );
        out
    }

    fn methods(&self) -> [(&'static str, f64); 3] {
        [
            ("proposed", self.mean_proposed),
            ("airpls", self.mean_airpls),
            ("quantile", self.mean_quantile),
        ]
    }
}

/// Full-series MSE of the proposed estimator and both comparators over `n_trials` scenes.
pub fn compare(
    params: &ModelParams,
    estimator: &EstimatorConfig,
    airpls_config: &AirPlsConfig,
    quantile_config: &QuantRegConfig,
    n_trials: usize,
) -> Result<ComparisonReport> {
    if n_trials < 1 {
        return Err(Error::InvalidConfig("n_trials must be at least 1".into()));
    }
    params.validate()?;
    estimator.validate()?;
    airpls_config.validate()?;
    quantile_config.validate()?;
    let trials: Vec<TrialComparison> = (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let scene = trial_scene(params, trial)?;
            let proposed = match estimate(&scene.s, estimator) {
                Ok(e) => mse_full(&e.baseline, &scene.b)?,
                Err(Error::NoAnchors) => f64::NAN,
                Err(e) => return Err(e),
            };
            Ok(TrialComparison {
                seed: scene.seed,
                proposed,
                airpls: mse_full(&airpls(&scene.s, airpls_config)?, &scene.b)?,
                quantile: mse_full(&quantile_poly(&scene.s, quantile_config)?, &scene.b)?,
            })
        })
        .collect::<Result<_>>()?;
    let column = |f: fn(&TrialComparison) -> f64| -> f64 {
        mean(
            &trials
                .iter()
                .map(f)
                .filter(|v| v.is_finite())
                .collect::<Vec<_>>(),
        )
    };
    Ok(ComparisonReport {
        model: *params,
        estimator: *estimator,
        airpls: *airpls_config,
        quantile: *quantile_config,
        mean_proposed: column(|t| t.proposed),
        mean_airpls: column(|t| t.airpls),
        mean_quantile: column(|t| t.quantile),
        ordered_fraction: trials.iter().filter(|t| t.ordered()).count() as f64 / n_trials as f64,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_distance(s: &[f64], b: &[f64], bh: &[f64], th: f64, i: usize) -> Option<usize> {
        (0..s.len())
            .filter(|&j| s[j] > b[j] + th && s[j] > bh[j] + th)
            .map(|j| j.abs_diff(i))
            .min()
    }

    #[test]
    fn mse_examples() {
        let truth = [1.0, 2.0, 3.0];
        assert_eq!(mse_selected(&[Anchor::new(1, 2.0)], &truth).unwrap(), 0.0);
        assert_eq!(mse_selected(&[Anchor::new(2, 3.5)], &truth).unwrap(), 0.25);
        assert!(matches!(mse_selected(&[], &truth), Err(Error::NoAnchors)));
        assert_eq!(mse_full(&truth, &truth).unwrap(), 0.0);
        let shifted: Vec<f64> = truth.iter().map(|v| v + 0.5).collect();
        assert!((mse_full(&shifted, &truth).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(
            mse_full(&[1.0], &truth),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn overestimated_baseline_masks_wetness() {
        let mut s = vec![0.0; 10];
        s[4] = 1.0;
        let sets = fa_md_sets(&s, &[0.0; 10], &[1.0; 10], 0.5).unwrap();
        assert_eq!(sets.missed, vec![4]);
        assert!(sets.false_alarms.is_empty());
        assert!((sets.p_md() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn identical_baselines_have_no_errors() {
        let s = [0.0, 6.0, 2.0, 9.0];
        let b = [0.5, 0.4, 0.3, 0.2];
        let sets = fa_md_sets(&s, &b, &b, 5.0).unwrap();
        assert!(sets.false_alarms.is_empty() && sets.missed.is_empty());
    }

    #[test]
    fn field_mode_uses_fixed_threshold_as_estimate() {
        // s = 5.5: wet under the fixed S = 5, dry under b̂ + S = 6.
        let sets = fa_md_field(&[5.5, 7.0, 0.0], &[1.0, 1.0, 1.0], 5.0).unwrap();
        assert_eq!(sets.false_alarms, vec![0]);
        assert!(sets.missed.is_empty());
    }

    #[test]
    fn distance_single_candidate() {
        let mut s = vec![0.0; 20];
        s[10] = 10.0;
        let d = distance_to_wet(
            &s,
            &[0.0; 20],
            &[0.0; 20],
            5.0,
            &[7],
            WetCondition::WithOffset,
        )
        .unwrap();
        assert_eq!(d.distances, vec![(7, 3)]);
        assert_eq!(d.histogram.get(&3), Some(&1.0));
        assert_eq!(d.histogram_csv(), "distance,frequency\n3,1\n");
    }

    #[test]
    fn distance_without_wet_phase() {
        let err = distance_to_wet(
            &[0.0; 5],
            &[0.0; 5],
            &[0.0; 5],
            1.0,
            &[2],
            WetCondition::WithOffset,
        );
        assert!(matches!(err, Err(Error::NoWetPhase)));
        // Without the offset the same sample counts as wet.
        let d = distance_to_wet(
            &[0.5; 5],
            &[0.0; 5],
            &[0.0; 5],
            1.0,
            &[2],
            WetCondition::NoOffset,
        )
        .unwrap();
        assert_eq!(d.distances, vec![(2, 0)]);
    }

    #[test]
    fn benchmark_noise_free_peak_free_is_exact_at_anchors() {
        let params = ModelParams {
            n_samples: 3000,
            peak_amplitude: crate::model::DistSpec::constant(0.0),
            noise_power: 0.0,
            ..ModelParams::default()
        };
        let grid = config_grid(
            &EstimatorConfig::default().with_smooth_len(1),
            &[3, 10],
            &[0.1, 1.0],
        );
        let report = benchmark(&params, &grid, 1, DEFAULT_THRESHOLD).unwrap();
        for c in &report.cells {
            assert_eq!(c.failures, 0);
            assert!(c.mean_mse_selected < 1e-20, "{c:?}");
        }
    }

    #[test]
    fn benchmark_is_deterministic() {
        let params = ModelParams {
            n_samples: 1500,
            ..ModelParams::default()
        };
        let grid = config_grid(&EstimatorConfig::default(), &[3, 5], &[0.5, 1.0]);
        let a = benchmark(&params, &grid, 4, 5.0).unwrap();
        let b = benchmark(&params, &grid, 4, 5.0).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(benchmark(&params, &grid, 0, 5.0).is_err());
    }

    proptest! {
        #[test]
        fn sets_are_disjoint_and_directional(
            data in prop::collection::vec((-5.0f64..15.0, -3.0f64..3.0, -3.0f64..3.0), 1..200),
            th in 0.0f64..6.0,
        ) {
            let s: Vec<f64> = data.iter().map(|d| d.0).collect();
            let b: Vec<f64> = data.iter().map(|d| d.1).collect();
            let bh: Vec<f64> = data.iter().map(|d| d.2).collect();
            let sets = fa_md_sets(&s, &b, &bh, th).unwrap();
            for i in &sets.false_alarms {
                prop_assert!(!sets.missed.contains(i));
                prop_assert!(bh[*i] < b[*i]);
            }
            for i in &sets.missed {
                prop_assert!(bh[*i] > b[*i]);
            }
            if let Ok(d) = distance_to_wet(&s, &b, &bh, th, &sets.all(), WetCondition::WithOffset) {
                for (i, dist) in &d.distances {
                    prop_assert!(*dist >= 1);
                    prop_assert_eq!(Some(*dist), brute_distance(&s, &b, &bh, th, *i));
                }
                if !d.distances.is_empty() {
                    let total: f64 = d.histogram.values().sum();
                    prop_assert!((total - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}
