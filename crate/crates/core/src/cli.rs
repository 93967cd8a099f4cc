//! Command-line front end: argument parsing and the `run` orchestrator.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::comparators::{airpls, quantile_poly, AirPlsConfig, QuantRegConfig};
use crate::error::{Error, Result};
use crate::estimator::{estimate, EdgePolicy, EstimatorConfig, TiePolicy};
use crate::evaluation::{
    benchmark, compare, config_grid, distance_to_wet, evaluate_field, evaluate_scene, fa_md_field,
    fa_md_sets, WetCondition, DEFAULT_THRESHOLD, DEFAULT_TRIALS,
};
use crate::io::{estimate_csv, is_scene_csv, read_scene_csv, read_sensor_csv};
use crate::model::{generate_scene, ModelParams, SyntheticScene};
use crate::signal::Signal;

/// Directory used for outputs when `--output` is not given.
pub const OUTPUT_DIR_ENV: &str = "LWS_OUTPUT_DIR";

pub const BENCHMARK_SCALES: [usize; 6] = [3, 5, 7, 10, 15, 20];
pub const BENCHMARK_THRESHOLDS: [f64; 4] = [0.1, 0.5, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Command {
    Generate,
    Estimate,
    Benchmark,
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComparatorKind {
    Airpls,
    Quantile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EdgeArg {
    Hold,
    LinearExtend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TieArg {
    First,
    All,
}

/// Baseline estimation for leaf-wetness sensor signals.
#[derive(Debug, Parser)]
#[command(name = "lws-baseline", version)]
pub struct Cli {
    #[arg(long, value_enum)]
    command: Command,
    /// Sensor CSV (`mv` or `timestamp,mv`) or scene CSV (`index,h,b,n,s`).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Observation half-width; a comma-separated list for `benchmark`.
    #[arg(long = "scale-T", value_delimiter = ',')]
    scale: Option<Vec<usize>>,
    /// Cost threshold in mV; a comma-separated list for `benchmark`.
    #[arg(long = "cost-C0", value_delimiter = ',')]
    cost: Option<Vec<f64>>,
    #[arg(long = "smooth-L", default_value_t = 10)]
    smooth: usize,
    /// Wet threshold above the baseline, in mV.
    #[arg(long = "threshold-S", default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, default_value_t = 125_577.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.05)]
    quantile: f64,
    #[arg(long, default_value_t = 4)]
    degree: usize,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Length of generated scenes.
    #[arg(long, default_value_t = 9858)]
    samples: usize,
    /// Noise variance of generated scenes, in mV².
    #[arg(long, default_value_t = 0.01)]
    noise_power: f64,
    #[arg(long, value_enum, default_value_t = EdgeArg::Hold)]
    edge_policy: EdgeArg,
    #[arg(long, value_enum, default_value_t = TieArg::First)]
    tie_policy: TieArg,
    /// Comparator baselines to add as extra columns to `estimate` output.
    #[arg(long, value_enum, value_delimiter = ',')]
    comparators: Vec<ComparatorKind>,
    /// Also write the `distance,frequency` histogram of `estimate` errors here.
    #[arg(long)]
    histogram: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input_path: Option<PathBuf>,
    pub output_path: PathBuf,
    pub estimator: EstimatorConfig,
    /// Scales and thresholds swept by `benchmark`.
    pub scales: Vec<usize>,
    pub thresholds: Vec<f64>,
    pub model: ModelParams,
    pub airpls: AirPlsConfig,
    pub quantile: QuantRegConfig,
    pub comparators: Vec<ComparatorKind>,
    pub threshold: f64,
    pub trials: usize,
    pub format: Format,
    pub histogram_path: Option<PathBuf>,
}

impl RunConfig {
    /// Builds a run configuration, resolving the default output path from
    /// `output_dir` (usually the value of [`OUTPUT_DIR_ENV`]).
    pub fn from_cli(cli: Cli, output_dir: Option<PathBuf>) -> Result<Self> {
        let benchmark = cli.command == Command::Benchmark;
        let scales = cli.scale.unwrap_or_else(|| {
            if benchmark {
                BENCHMARK_SCALES.to_vec()
            } else {
                vec![5]
            }
        });
        let thresholds = cli.cost.unwrap_or_else(|| {
            if benchmark {
                BENCHMARK_THRESHOLDS.to_vec()
            } else {
                vec![1.0]
            }
        });
        if scales.is_empty() || thresholds.is_empty() {
            return Err(Error::InvalidConfig("empty scale or threshold list".into()));
        }
        let estimator = EstimatorConfig {
            scale: scales[0],
            cost_threshold: thresholds[0],
            smooth_len: cli.smooth,
            edge_policy: match cli.edge_policy {
                EdgeArg::Hold => EdgePolicy::Hold,
                EdgeArg::LinearExtend => EdgePolicy::LinearExtend,
            },
            tie_policy: match cli.tie_policy {
                TieArg::First => TiePolicy::First,
                TieArg::All => TiePolicy::All,
            },
        };
        let model = ModelParams {
            n_samples: cli.samples,
            noise_power: cli.noise_power,
            seed: cli.seed,
            ..ModelParams::default()
        };
        let ext = match cli.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let name = match cli.command {
            Command::Generate => "scene",
            Command::Estimate => "estimate",
            Command::Benchmark => "benchmark",
            Command::Compare => "compare",
        };
        let output_path = cli.output.unwrap_or_else(|| {
            output_dir
                .unwrap_or_else(|| PathBuf::from("."))
                .join(format!("{name}.{ext}"))
        });
        let config = Self {
            command: cli.command,
            input_path: cli.input,
            output_path,
            estimator,
            scales,
            thresholds,
            model,
            airpls: AirPlsConfig {
                lambda: cli.lambda,
                ..AirPlsConfig::default()
            },
            quantile: QuantRegConfig {
                degree: cli.degree,
                quantile: cli.quantile,
                ..QuantRegConfig::default()
            },
            comparators: cli.comparators,
            threshold: cli.threshold,
            trials: cli.trials,
            format: cli.format,
            histogram_path: cli.histogram,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.estimator.validate()?;
        self.model.validate()?;
        if !self.threshold.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "threshold {}",
                self.threshold
            )));
        }
        match self.command {
            Command::Benchmark | Command::Compare if self.trials < 1 => {
                Err(Error::InvalidConfig("trials must be at least 1".into()))
            }
            Command::Compare => {
                self.airpls.validate()?;
                self.quantile.validate()
            }
            _ => Ok(()),
        }
    }
}

/// Files written by a run and a human-readable summary for stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub written: Vec<PathBuf>,
    pub summary: String,
}

fn write(path: &Path, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    written.push(path.to_path_buf());
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct EstimateJson<'a> {
    config: &'a EstimatorConfig,
    threshold: f64,
    anchors: &'a [crate::estimator::Anchor],
    s: &'a [f64],
    b_hat: &'a [f64],
    report: Option<crate::evaluation::EvalReport>,
}

pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let mut written = Vec::new();
    let summary = match config.command {
        Command::Generate => {
            let scene = generate_scene(&config.model)?;
            let body = match config.format {
                Format::Csv => scene.to_csv(),
                Format::Json => json(&scene)?,
            };
            write(&config.output_path, &body, &mut written)?;
            format!("generated {} samples (seed {})\n", scene.len(), scene.seed)
        }
        Command::Estimate => run_estimate(config, &mut written)?,
        Command::Benchmark => {
            let grid = config_grid(&config.estimator, &config.scales, &config.thresholds);
            let report = benchmark(&config.model, &grid, config.trials, config.threshold)?;
            let body = match config.format {
                Format::Csv => report.to_csv(),
                Format::Json => json(&report)?,
            };
            write(&config.output_path, &body, &mut written)?;
            report.to_text()
        }
        Command::Compare => {
            let report = compare(
                &config.model,
                &config.estimator,
                &config.airpls,
                &config.quantile,
                config.trials,
            )?;
            let body = match config.format {
                Format::Csv => report.to_csv(),
                Format::Json => json(&report)?,
            };
            write(&config.output_path, &body, &mut written)?;
            report.to_text()
        }
    };
    Ok(RunOutput { written, summary })
}

fn run_estimate(config: &RunConfig, written: &mut Vec<PathBuf>) -> Result<String> {
    // Ground truth is available for generated scenes and scene files.
    let (signal, truth): (Signal, Option<SyntheticScene>) = match &config.input_path {
        Some(path) if is_scene_csv(path)? => {
            let scene = read_scene_csv(path)?;
            (scene.s.clone(), Some(scene))
        }
        Some(path) => (read_sensor_csv(path)?, None),
        None => {
            let scene = generate_scene(&config.model)?;
            (scene.s.clone(), Some(scene))
        }
    };
    let est = estimate(&signal, &config.estimator)?;
    let report = match &truth {
        Some(scene) => evaluate_scene(scene, &est, config.threshold)?,
        None => evaluate_field(&signal, &est, config.threshold)?,
    };

    let mut extra: Vec<(&str, Vec<f64>)> = Vec::new();
    for kind in &config.comparators {
        match kind {
            ComparatorKind::Airpls => {
                extra.push(("b_airpls", airpls(&signal, &config.airpls)?.into_samples()))
            }
            ComparatorKind::Quantile => extra.push((
                "b_quantile",
                quantile_poly(&signal, &config.quantile)?.into_samples(),
            )),
        }
    }
    let body = match config.format {
        Format::Csv => {
            let cols: Vec<(&str, &[f64])> = extra.iter().map(|(n, v)| (*n, v.as_slice())).collect();
            estimate_csv(&signal, &est.baseline, config.threshold, &cols)
        }
        Format::Json => json(&EstimateJson {
            config: &est.config,
            threshold: config.threshold,
            anchors: &est.anchors,
            s: &signal,
            b_hat: &est.baseline,
            report: Some(report.clone()),
        })?,
    };
    write(&config.output_path, &body, written)?;

    if let Some(path) = &config.histogram_path {
        let distances = match &truth {
            Some(scene) => {
                let sets = fa_md_sets(&scene.s, &scene.b, &est.baseline, config.threshold)?;
                distance_to_wet(
                    &scene.s,
                    &scene.b,
                    &est.baseline,
                    config.threshold,
                    &sets.all(),
                    WetCondition::default(),
                )
            }
            None => {
                let sets = fa_md_field(&signal, &est.baseline, config.threshold)?;
                let zeros = vec![0.0; signal.len()];
                distance_to_wet(
                    &signal,
                    &est.baseline,
                    &zeros,
                    config.threshold,
                    &sets.all(),
                    WetCondition::default(),
                )
            }
        }?;
        write(path, &distances.histogram_csv(), written)?;
    }

    let mut summary = format!(
        "{} anchors over {} samples; P_FA {:.3e}, P_MD {:.3e}\n",
        est.anchors.len(),
        signal.len(),
        report.p_fa,
        report.p_md
    );
    if let (Some(sel), Some(full)) = (report.mse_selected, report.mse_full) {
        summary.push_str(&format!(
            "mse at anchors {sel:.4}, full-series mse {full:.4}\n"
        ));
    }
    Ok(summary)
}
