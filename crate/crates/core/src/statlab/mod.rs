//! Statistical validation: training-log statistics, hypothesis tests, and the
//! EMA / R1 utilities from the training setup.

mod bootstrap;
mod chisq;
mod mwu;
mod series;
mod shapiro;
mod training;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use self::bootstrap::{bootstrap_mean_ci, BootstrapResult};
pub use self::chisq::{chi_square_2x2, chi_square_sf_df1, ContingencyTable2x2};
pub use self::mwu::{exact_u_distribution, mann_whitney_u};
pub use self::series::{ecdf_percentile, head_fraction, tail_fraction, MetricPoint, MetricSeries};
pub use self::shapiro::shapiro_wilk;
pub use self::training::{ema_update, r1_penalty, DEFAULT_FD_STEP, DEFAULT_R1_GAMMA, DEFAULT_EMA_BETA};

/// Outcome of a hypothesis test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub df: Option<u32>,
    pub method: String,
    #[serde(default)]
    pub details: BTreeMap<String, f64>,
}

impl TestResult {
    fn new(method: &str, statistic: f64, p_value: f64) -> Self {
        Self { statistic, p_value: p_value.clamp(0.0, 1.0), df: None, method: method.to_string(), details: BTreeMap::new() }
    }

    fn detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }
}
