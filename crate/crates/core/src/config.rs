//! TOML run configuration. Every key has a default; unknown keys are rejected.
//!
//! ```toml
//! [device]
//! inductance = 97e-12
//! flux_bias = 0.5
//!
//! [grid]
//! n_points = 2001
//!
//! [circuit]
//! ring_period_ps = 100
//! [circuit.delays]
//! tff = 5
//!
//! [readout]
//! jout_bias_fraction = 0.95
//!
//! [experiment]
//! n_values = [0, 64, 127]
//! trials_per_n = 1000
//! rng_seed = 7
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::{CircuitParams, CHAIN_MODULUS};
use crate::qubit::{FluxGrid, RfSquidParams};
use crate::readout::ReadoutParams;

pub type CircuitConfig = CircuitParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot serialize configuration: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub phi_min: f64,
    pub phi_max: f64,
    pub n_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = FluxGrid::standard();
        GridConfig { phi_min: g.phi_min(), phi_max: g.phi_max(), n_points: g.n_points() }
    }
}

impl GridConfig {
    pub fn to_grid(&self) -> Result<FluxGrid, ConfigError> {
        FluxGrid::new(self.phi_min, self.phi_max, self.n_points).map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

/// Programmed counts for 16 delays spaced roughly logarithmically over
/// 1..=128 ring periods.
pub const DEFAULT_N_VALUES: [u32; 16] = [127, 126, 125, 124, 123, 122, 121, 118, 115, 110, 103, 93, 79, 61, 35, 0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSettings {
    pub n_values: Vec<u32>,
    pub trials_per_n: u64,
    pub rng_seed: u64,
    pub decoherence_enabled: bool,
    /// Worker threads; 0 uses all available cores.
    pub workers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        ExperimentSettings {
            n_values: DEFAULT_N_VALUES.to_vec(),
            trials_per_n: 10_000,
            rng_seed: 1,
            decoherence_enabled: false,
            workers: 0,
            output_path: None,
        }
    }
}

impl ExperimentSettings {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials_per_n == 0 {
            return Err(ConfigError::Invalid("trials_per_n must be at least 1".into()));
        }
        if self.n_values.is_empty() {
            return Err(ConfigError::Invalid("n_values must not be empty".into()));
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n >= CHAIN_MODULUS) {
            return Err(ConfigError::Invalid(format!("n_values entry {n} is outside 0..=127")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub device: RfSquidParams,
    pub grid: GridConfig,
    pub circuit: CircuitParams,
    pub readout: ReadoutParams,
    pub experiment: ExperimentSettings,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: Config = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String, ConfigError> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: String| ConfigError::Invalid(e);
        self.device.validate().map_err(|e| invalid(e.to_string()))?;
        self.grid.to_grid()?;
        self.circuit.validate().map_err(|e| invalid(format!("circuit: {e}")))?;
        self.readout.validate().map_err(|e| invalid(e.to_string()))?;
        self.experiment.validate()
    }
}
