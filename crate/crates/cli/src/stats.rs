//! `stats` subcommands over a `step,value` metric log.

use std::path::PathBuf;

use clap::Subcommand;
use evalkit::statlab::{
    bootstrap_mean_ci, ecdf_percentile, head_fraction, mann_whitney_u, shapiro_wilk, tail_fraction, BootstrapResult,
    MetricSeries, TestResult,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Subcommand)]
pub enum StatsCommand {
    /// Percentile-bootstrap CI for the mean of the series tail
    Bootstrap {
        #[arg(long)]
        series: PathBuf,
        #[arg(long, default_value_t = 0.3)]
        tail: f64,
        #[arg(long, default_value_t = 10_000)]
        resamples: usize,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Shapiro-Wilk normality test on the series tail
    Shapiro {
        #[arg(long)]
        series: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        tail: f64,
    },
    /// Mann-Whitney U between the first and last fractions of the series
    Mwu {
        #[arg(long)]
        series: PathBuf,
        #[arg(long, default_value_t = 0.3)]
        early: f64,
        #[arg(long, default_value_t = 0.3)]
        late: f64,
    },
    /// Empirical-CDF percentile of a query value within the series tail
    Cdf {
        #[arg(long)]
        series: PathBuf,
        #[arg(long, default_value_t = 0.3)]
        tail: f64,
        /// Default: the last value of the series
        #[arg(long)]
        query: Option<f64>,
    },
}

/// Printed as JSON; one variant per subcommand, tagged by `command`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum StatsOutput {
    Bootstrap { n: usize, tail: f64, result: BootstrapResult },
    Shapiro { n: usize, tail: f64, result: TestResult },
    Mwu { n_early: usize, n_late: usize, early: f64, late: f64, result: TestResult },
    Cdf { n: usize, tail: f64, query: f64, percentile: f64 },
}

fn check_fraction(name: &str, f: f64) -> CliResult<()> {
    if f > 0.0 && f <= 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{name} must be in (0, 1], got {f}")))
    }
}

pub fn run(cmd: &StatsCommand) -> CliResult<StatsOutput> {
    match cmd {
        StatsCommand::Bootstrap { series, tail, resamples, level, seed } => {
            check_fraction("tail", *tail)?;
            if *resamples < 100 {
                return Err(CliError::Usage(format!("--resamples must be at least 100, got {resamples}")));
            }
            if !(*level > 0.0 && *level < 1.0) {
                return Err(CliError::Usage(format!("--level must be in (0, 1), got {level}")));
            }
            let values = tail_fraction(&MetricSeries::read_csv(series)?, *tail)?.values();
            let result = bootstrap_mean_ci(&values, *resamples, *level, *seed)?;
            Ok(StatsOutput::Bootstrap { n: values.len(), tail: *tail, result })
        }
        StatsCommand::Shapiro { series, tail } => {
            check_fraction("tail", *tail)?;
            let values = tail_fraction(&MetricSeries::read_csv(series)?, *tail)?.values();
            Ok(StatsOutput::Shapiro { n: values.len(), tail: *tail, result: shapiro_wilk(&values)? })
        }
        StatsCommand::Mwu { series, early, late } => {
            check_fraction("early", *early)?;
            check_fraction("late", *late)?;
            let s = MetricSeries::read_csv(series)?;
            let x = head_fraction(&s, *early)?.values();
            let y = tail_fraction(&s, *late)?.values();
            if x.len() + y.len() > s.len() {
                return Err(CliError::Usage(format!(
                    "--early and --late overlap: {} + {} points of {}",
                    x.len(),
                    y.len(),
                    s.len()
                )));
            }
            Ok(StatsOutput::Mwu {
                n_early: x.len(),
                n_late: y.len(),
                early: *early,
                late: *late,
                result: mann_whitney_u(&x, &y)?,
            })
        }
        StatsCommand::Cdf { series, tail, query } => {
            check_fraction("tail", *tail)?;
            let values = tail_fraction(&MetricSeries::read_csv(series)?, *tail)?.values();
            let query = match query {
                Some(q) if !q.is_finite() => return Err(CliError::Usage(format!("--query must be finite, got {q}"))),
                Some(q) => *q,
                None => *values.last().expect("tail is non-empty"),
            };
            let percentile = ecdf_percentile(&values, &query)?;
            Ok(StatsOutput::Cdf { n: values.len(), tail: *tail, query, percentile })
        }
    }
}
