//! Experiment configuration, loadable from TOML.

use std::fs;
use std::path::{Path, PathBuf};

use ckm_core::alignment::Scheme;
use ckm_core::ckm::CpmParams;
use ckm_core::metrics::LinkBudget;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, FormatError};

/// Overrides the directory relative output paths resolve against.
pub const OUTPUT_DIR_ENV: &str = "CKMBEAM_OUTPUT_DIR";

/// Where evaluation locations come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TestLocations {
    /// Fresh uniform draws, disjoint from the dataset stream.
    #[default]
    Fresh,
    /// The first dataset samples themselves.
    Knots,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Scene TOML; the built-in desk scene when absent.
    pub scene_file: Option<PathBuf>,
    /// Pre-generated dataset; generated from the scene when absent.
    pub dataset_file: Option<PathBuf>,
    /// BS array rows (vertical elements), fixed across the sweep.
    pub tx_rows: usize,
    /// BS array columns swept.
    pub tx_cols: Vec<usize>,
    pub rx_rows: usize,
    pub rx_cols: usize,
    /// Symbols per coherent block.
    pub block_len: u64,
    /// Transmit power (W).
    pub power: f64,
    /// Noise power (W).
    pub noise: f64,
    pub max_paths: usize,
    pub k: usize,
    pub idw_power: f64,
    pub samples: usize,
    pub test_locations: usize,
    pub test_mode: TestLocations,
    /// Mean location error in meters.
    pub mean_error: f64,
    pub seed: u64,
    pub schemes: Vec<Scheme>,
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scene_file: None,
            dataset_file: None,
            tx_rows: 4,
            tx_cols: vec![4, 8, 16, 32, 64],
            rx_rows: 2,
            rx_cols: 2,
            block_len: 50_000,
            power: 1.0,
            // median perfect-CSI SNR of 10 dB on the desk scene, 4×16 BS
            noise: 8.5e-11,
            max_paths: 3,
            k: 3,
            idw_power: 2.0,
            samples: 5000,
            test_locations: 200,
            test_mode: TestLocations::Fresh,
            mean_error: 0.0,
            seed: 1,
            schemes: Scheme::ALL.to_vec(),
            output: PathBuf::from("results.csv"),
        }
    }
}

fn at_least(field: &'static str, got: u64, min: u64) -> Result<(), ConfigError> {
    if got < min {
        return Err(ConfigError::TooSmall { field, min, got });
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, FormatError> {
        toml::from_str(text).map_err(|e| FormatError::Malformed(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        let text = fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        at_least("tx_rows", self.tx_rows as u64, 1)?;
        at_least("rx_rows", self.rx_rows as u64, 1)?;
        at_least("rx_cols", self.rx_cols as u64, 1)?;
        at_least("block_len", self.block_len, 1)?;
        at_least("max_paths", self.max_paths as u64, 1)?;
        at_least("k", self.k as u64, 1)?;
        at_least("samples", self.samples as u64, self.k as u64)?;
        at_least("test_locations", self.test_locations as u64, 1)?;
        if self.tx_cols.is_empty() {
            return Err(ConfigError::Invalid("tx_cols must list at least one value".into()));
        }
        if let Some(c) = self.tx_cols.iter().find(|&&c| c == 0) {
            return Err(ConfigError::Invalid(format!("tx_cols entries must be positive (got {c})")));
        }
        if self.schemes.is_empty() {
            return Err(ConfigError::Invalid("schemes must not be empty".into()));
        }
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(ConfigError::Invalid(format!("power must be positive (got {})", self.power)));
        }
        if !(self.noise.is_finite() && self.noise > 0.0) {
            return Err(ConfigError::Invalid(format!("noise must be positive (got {})", self.noise)));
        }
        if !(self.idw_power.is_finite() && self.idw_power > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "idw_power must be positive (got {})",
                self.idw_power
            )));
        }
        if !(self.mean_error.is_finite() && self.mean_error >= 0.0) {
            return Err(ConfigError::Invalid(format!(
                "mean_error must be non-negative (got {})",
                self.mean_error
            )));
        }
        Ok(())
    }

    pub fn link_budget(&self) -> LinkBudget {
        LinkBudget {
            power: self.power,
            noise: self.noise,
            block_len: self.block_len,
        }
    }

    pub fn cpm_params(&self) -> CpmParams {
        CpmParams {
            k: self.k,
            power: self.idw_power,
            max_paths: self.max_paths,
        }
    }

    /// Output path, relocated under `$CKMBEAM_OUTPUT_DIR` when set and the
    /// configured path is relative.
    pub fn resolved_output(&self) -> PathBuf {
        resolve_output(&self.output)
    }
}

pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}
