//! Run configuration, read from TOML. Every field has a default, so an
//! empty file is a valid configuration.

use crate::construction::TowerParams;
use crate::rational::q;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// How many random instances each sampled check draws.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleCounts {
    /// Random triples for the metric and norm axioms.
    pub metric_triples: usize,
    /// Random `(g, f, ε)` instances of the orthogonality inequality.
    pub orthogonality_trials: usize,
    /// Random elements of the top stage's ball to compress.
    pub compression_samples: usize,
    /// Random unit elements of the span of an independent spike family.
    pub spike_span_samples: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        SampleCounts {
            metric_triples: 1000,
            orthogonality_trials: 100,
            compression_samples: 50,
            spike_span_samples: 500,
        }
    }
}

/// The tower and order used for the `Daug_n` lower-bound certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertificateConfig {
    pub n: usize,
    pub tower: TowerParams,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        CertificateConfig {
            n: 2,
            tower: TowerParams {
                eps1: q(1, 50),
                family_size: Some(2),
                ..TowerParams::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Seed for every sampled check; recorded in each sampled report.
    pub seed: u64,
    /// Output directory for manifests, reports and certificates.
    pub out: PathBuf,
    /// The main tower, used by the stage, compression and estimate suites.
    pub tower: TowerParams,
    pub certificate: CertificateConfig,
    pub samples: SampleCounts,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out: PathBuf::from("out"),
            tower: TowerParams::default(),
            certificate: CertificateConfig::default(),
            samples: SampleCounts::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Applies a cell cap to both towers.
    pub fn set_cell_cap(&mut self, cap: usize) {
        self.tower.cell_cap = cap;
        self.certificate.tower.cell_cap = cap;
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, t) in [("tower", &self.tower), ("certificate.tower", &self.certificate.tower)] {
            t.validate().map_err(|e| ConfigError::Invalid(format!("{name}: {e}")))?;
        }
        if self.certificate.n == 0 {
            return Err(ConfigError::Invalid("certificate.n must be positive".into()));
        }
        Ok(())
    }
}
