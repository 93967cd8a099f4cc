//! CSV ingestion and emission.
//!
//! All writers use `.` as decimal point, LF line endings, and Rust's shortest
//! round-trip float formatting, so written values re-parse bit-exactly.

use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};

use crate::error::{Error, Result};
use crate::model::SyntheticScene;
use crate::signal::{Signal, DEFAULT_SAMPLE_PERIOD};

/// Allowed deviation of each timestamp step from the first one, as a fraction of it.
pub const SAMPLING_TOLERANCE: f64 = 0.01;

const NAIVE_FORMATS: [&str; 4] = [
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M",
    "%Y-%m-%dT%H:%M",
];

fn open(path: &Path) -> Result<csv::Reader<File>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?)
}

fn malformed(line: u64, reason: impl Into<String>) -> Error {
    Error::MalformedRow {
        line,
        reason: reason.into(),
    }
}

fn parse_value(field: &str, line: u64, name: &str) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(malformed(line, format!("non-finite {name} value {v}"))),
        Err(_) => Err(malformed(
            line,
            format!("cannot parse {name} value {field:?}"),
        )),
    }
}

/// Timestamp in minutes. Plain numbers are Unix seconds; otherwise RFC 3339 or
/// `YYYY-MM-DD HH:MM[:SS]`.
fn parse_timestamp(field: &str, line: u64) -> Result<f64> {
    if let Ok(secs) = field.parse::<f64>() {
        if secs.is_finite() {
            return Ok(secs / 60.0);
        }
    }
    if let Ok(t) = DateTime::parse_from_rfc3339(field) {
        return Ok(t.timestamp() as f64 / 60.0);
    }
    for fmt in NAIVE_FORMATS {
        if let Ok(t) = NaiveDateTime::parse_from_str(field, fmt) {
            return Ok(t.and_utc().timestamp() as f64 / 60.0);
        }
    }
    Err(malformed(line, format!("cannot parse timestamp {field:?}")))
}

/// Reads a sensor series with header `mv` or `timestamp,mv`.
///
/// With timestamps, the sample period is the first step and every later step
/// must match it within [`SAMPLING_TOLERANCE`].
pub fn read_sensor_csv(path: impl AsRef<Path>) -> Result<Signal> {
    let mut reader = open(path.as_ref())?;
    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').to_ascii_lowercase())
        .collect();
    let timed = match header
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .as_slice()
    {
        ["mv"] => false,
        ["timestamp", "mv"] => true,
        other => {
            return Err(malformed(
                1,
                format!("expected header `mv` or `timestamp,mv`, found {other:?}"),
            ))
        }
    };
    let width = if timed { 2 } else { 1 };

    let mut values = Vec::new();
    let mut times: Vec<(u64, f64)> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(malformed(
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        if timed {
            times.push((line, parse_timestamp(&record[0], line)?));
        }
        values.push(parse_value(&record[width - 1], line, "mv")?);
    }
    if values.is_empty() {
        return Err(malformed(2, "no data rows"));
    }

    let mut period = DEFAULT_SAMPLE_PERIOD;
    if times.len() >= 2 {
        period = times[1].1 - times[0].1;
        if period <= 0.0 || period.is_nan() {
            return Err(Error::NonUniformSampling {
                line: times[1].0,
                step: period,
                period,
            });
        }
        for pair in times.windows(2) {
            let step = pair[1].1 - pair[0].1;
            if (step - period).abs() > SAMPLING_TOLERANCE * period {
                return Err(Error::NonUniformSampling {
                    line: pair[1].0,
                    step,
                    period,
                });
            }
        }
    }
    Signal::with_period(values, period)
}

/// Reads a scene written by [`SyntheticScene::to_csv`]; the seed is not stored and reads as 0.
pub fn read_scene_csv(path: impl AsRef<Path>) -> Result<SyntheticScene> {
    let mut reader = open(path.as_ref())?;
    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(str::to_ascii_lowercase)
        .collect();
    if header != ["index", "h", "b", "n", "s"] {
        return Err(malformed(
            1,
            format!("expected header `index,h,b,n,s`, found {header:?}"),
        ));
    }
    let mut cols: [Vec<f64>; 4] = Default::default();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 5 {
            return Err(malformed(
                line,
                format!("expected 5 fields, found {}", record.len()),
            ));
        }
        if record[0].parse::<usize>().ok() != Some(row) {
            return Err(malformed(
                line,
                format!("expected index {row}, found {:?}", &record[0]),
            ));
        }
        for (k, name) in ["h", "b", "n", "s"].iter().enumerate() {
            cols[k].push(parse_value(&record[k + 1], line, name)?);
        }
    }
    let [h, b, n, s] = cols;
    Ok(SyntheticScene {
        h: Signal::new(h)?,
        b: Signal::new(b)?,
        n: Signal::new(n)?,
        s: Signal::new(s)?,
        seed: 0,
    })
}

/// Whether a file starts with the scene header.
pub fn is_scene_csv(path: impl AsRef<Path>) -> Result<bool> {
    let mut reader = open(path.as_ref())?;
    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(str::to_ascii_lowercase)
        .collect();
    Ok(header == ["index", "h", "b", "n", "s"])
}

/// Single-column `mv` file.
pub fn sensor_csv(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 24 + 3);
    out.push_str("mv\n");
    for v in values {
        let _ = writeln!(out, "{v}");
    }
    out
}

/// Estimation output: `index,s,b_hat,wet` followed by any extra named columns.
pub fn estimate_csv(s: &[f64], b_hat: &[f64], threshold: f64, extra: &[(&str, &[f64])]) -> String {
    let mut out = String::from("index,s,b_hat,wet");
    for (name, _) in extra {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for i in 0..s.len() {
        let wet = u8::from(s[i] > b_hat[i] + threshold);
        let _ = write!(out, "{i},{},{},{wet}", s[i], b_hat[i]);
        for (_, col) in extra {
            let _ = write!(out, ",{}", col[i]);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_scene, ModelParams};
    use std::io::Write;
    use tempfile::NamedTempFile;

    fn file(contents: &str) -> NamedTempFile {
        let mut f = NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn single_column() {
        let f = file("mv\n1.0\n2.0\n3.0\n");
        let s = read_sensor_csv(f.path()).unwrap();
        assert_eq!(s.samples(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.sample_period(), 15.0);
    }

    #[test]
    fn nan_is_rejected_with_line_number() {
        let f = file("mv\nNaN\n2.0\n");
        match read_sensor_csv(f.path()) {
            Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let f = file("mv\n1.0\nabc\n");
        assert!(matches!(
            read_sensor_csv(f.path()),
            Err(Error::MalformedRow { line: 3, .. })
        ));
    }

    #[test]
    fn timestamps_set_the_period() {
        let f = file("timestamp,mv\n2014-03-01 00:00:00,270.1\n2014-03-01 00:15:00,270.3\n2014-03-01T00:30:00Z,271\n");
        let s = read_sensor_csv(f.path()).unwrap();
        assert_eq!(s.sample_period(), 15.0);
        assert_eq!(s.len(), 3);
        let f = file("timestamp,mv\n0,1\n600,2\n1200,3\n");
        assert_eq!(read_sensor_csv(f.path()).unwrap().sample_period(), 10.0);
    }

    #[test]
    fn irregular_sampling_is_rejected() {
        let f = file("timestamp,mv\n0,1\n900,2\n1800,3\n2800,4\n");
        match read_sensor_csv(f.path()) {
            Err(Error::NonUniformSampling { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        // 0.5% jitter is tolerated.
        let f = file("timestamp,mv\n0,1\n900,2\n1804.5,3\n");
        assert!(read_sensor_csv(f.path()).is_ok());
    }

    #[test]
    fn missing_file_and_bad_header() {
        assert!(matches!(
            read_sensor_csv("/nonexistent/data.csv"),
            Err(Error::MissingFile(_))
        ));
        let f = file("value\n1\n");
        assert!(matches!(
            read_sensor_csv(f.path()),
            Err(Error::MalformedRow { line: 1, .. })
        ));
        let f = file("mv\n");
        assert!(read_sensor_csv(f.path()).is_err());
    }

    #[test]
    fn scene_round_trip_is_bit_exact() {
        let scene = generate_scene(&ModelParams {
            n_samples: 500,
            ..ModelParams::default()
        })
        .unwrap();
        let f = file(&sensor_csv(&scene.s));
        assert_eq!(
            read_sensor_csv(f.path()).unwrap().samples(),
            scene.s.samples()
        );
        let f = file(&scene.to_csv());
        assert!(is_scene_csv(f.path()).unwrap());
        let back = read_scene_csv(f.path()).unwrap();
        assert_eq!(back.h, scene.h);
        assert_eq!(back.b, scene.b);
        assert_eq!(back.n, scene.n);
        assert_eq!(back.s, scene.s);
    }

    #[test]
    fn estimate_columns() {
        let out = estimate_csv(&[1.0, 7.0], &[0.5, 1.0], 5.0, &[("b_airpls", &[0.0, 0.25])]);
        assert_eq!(
            out,
            "index,s,b_hat,wet,b_airpls\n0,1,0.5,0,0\n1,7,1,1,0.25\n"
        );
    }
}
