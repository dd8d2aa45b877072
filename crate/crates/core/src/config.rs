//! Run configuration shared by every estimator and the simulator. Loaded
//! from TOML; every table and field is optional and falls back to defaults.
//!
//! ```toml
//! [estimator]
//! w_phi = 0.6
//! w_len = 0.4
//!
//! [simulator]
//! heading_noise = 0.1
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{EcfParams, RbiiParams};
use crate::estimator::{EstimatorError, EstimatorParams};
use crate::metrics::LogBase;
use crate::simulator::SimParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Parse(String),
    #[error(transparent)]
    Invalid(#[from] EstimatorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsParams {
    pub log_base: LogBase,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub estimator: EstimatorParams,
    pub ecf: EcfParams,
    pub rbii: RbiiParams,
    pub simulator: SimParams,
    pub metrics: MetricsParams,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config, ConfigError> {
        let config: Config = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), EstimatorError> {
        self.estimator.validate()?;
        self.ecf.validate()?;
        self.rbii.validate()?;
        self.simulator.validate()
    }

    pub fn tick_rate(&self) -> f64 {
        self.estimator.tick_rate
    }
}
