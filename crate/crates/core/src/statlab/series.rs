use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricPoint {
    pub step: i64,
    pub value: f64,
}

/// Ordered `(step, value)` log of a training metric such as FID per epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub metric_name: String,
    points: Vec<MetricPoint>,
}

impl MetricSeries {
    pub fn new(metric_name: impl Into<String>, points: Vec<MetricPoint>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !p.value.is_finite() || p.value < 0.0 {
                return Err(Error::validation(format!("point {i} has invalid value {}", p.value)));
            }
            if i > 0 && p.step <= points[i - 1].step {
                return Err(Error::validation(format!("steps must increase strictly (point {i})")));
            }
        }
        Ok(Self { metric_name: metric_name.into(), points })
    }

    pub fn from_values(metric_name: impl Into<String>, values: &[f64]) -> Result<Self> {
        let points = values.iter().enumerate().map(|(i, &value)| MetricPoint { step: i as i64, value }).collect();
        Self::new(metric_name, points)
    }

    pub fn points(&self) -> &[MetricPoint] {
        &self.points
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Parses CSV with header `step,value`. Errors name the 1-based file line.
    pub fn parse_csv<R: Read>(input: R, metric_name: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(input);
        let header = reader.headers().map_err(|e| Error::Format(format!("line 1: {e}")))?.clone();
        if header.len() != 2 || &header[0] != "step" || &header[1] != "value" {
            return Err(Error::Format(format!("line 1: header must be `step,value`, got {:?}", header.as_slice())));
        }
        let mut points = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Format(e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != 2 {
                return Err(Error::Format(format!("line {line}: expected 2 cells, got {}", record.len())));
            }
            let step = record[0]
                .parse()
                .map_err(|_| Error::Format(format!("line {line}: step {:?} is not an integer", &record[0])))?;
            let value: f64 = record[1]
                .parse()
                .map_err(|_| Error::Format(format!("line {line}: value {:?} is not a number", &record[1])))?;
            if let Some(prev) = points.last().map(|p: &MetricPoint| p.step) {
                if step <= prev {
                    return Err(Error::Format(format!("line {line}: step {step} does not increase")));
                }
            }
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Format(format!("line {line}: value {value} must be finite and non-negative")));
            }
            points.push(MetricPoint { step, value });
        }
        Self::new(metric_name, points)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Ingest { path: path.to_path_buf(), message: e.to_string() })?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Self::parse_csv(std::io::BufReader::new(file), &name)
    }
}

/// Number of points kept by [`tail_fraction`] and [`head_fraction`]: `ceil(fraction * len)`.
///
/// The product is nudged down by 1e-9 before the ceiling so that values such as
/// `0.3 * 10 = 3.0000000000000004` count as 3.
fn fraction_len(series: &MetricSeries, fraction: f64) -> Result<usize> {
    if series.is_empty() {
        return Err(Error::validation("series is empty"));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::validation(format!("fraction must be in (0, 1], got {fraction}")));
    }
    let len = series.len();
    Ok(((fraction * len as f64 - 1e-9).ceil() as usize).clamp(1, len))
}

/// The last `ceil(fraction * len)` points, order preserved.
pub fn tail_fraction(series: &MetricSeries, fraction: f64) -> Result<MetricSeries> {
    let keep = fraction_len(series, fraction)?;
    let len = series.len();
    Ok(MetricSeries { metric_name: series.metric_name.clone(), points: series.points[len - keep..].to_vec() })
}

/// The first `ceil(fraction * len)` points.
pub fn head_fraction(series: &MetricSeries, fraction: f64) -> Result<MetricSeries> {
    let keep = fraction_len(series, fraction)?;
    Ok(MetricSeries { metric_name: series.metric_name.clone(), points: series.points[..keep].to_vec() })
}

/// Right-continuous empirical CDF: fraction of values `<= query`.
pub fn ecdf_percentile<T: PartialOrd>(values: &[T], query: &T) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::validation("ECDF needs at least one value"));
    }
    let below = values.iter().filter(|v| *v <= query).count();
    Ok(below as f64 / values.len() as f64)
}
