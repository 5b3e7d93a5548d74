//! Service configuration file (TOML).

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use eyedoc_core::{InteractionConfig, PipelineConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// ```toml
/// bind = "127.0.0.1:7070"
/// cors_allow_origin = ["http://localhost:8000"]
/// export_dir = "/var/lib/eyedoc/sessions"
///
/// [pipeline]
/// dispersion_px = 35.0
///
/// [interaction]
/// dwell_ms = 700
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    /// Origins allowed to call the API; the overlay runs on the documentation's origin.
    /// `"*"` allows any.
    pub cors_allow_origin: Vec<String>,
    /// Where session logs are written as JSONL when a session is deleted.
    pub export_dir: Option<PathBuf>,
    pub pipeline: PipelineConfig,
    pub interaction: InteractionConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: SocketAddr::from(([127, 0, 0, 1], 7070)),
            cors_allow_origin: vec!["*".into()],
            export_dir: None,
            pipeline: PipelineConfig::default(),
            interaction: InteractionConfig::default(),
        }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ServiceConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.pipeline.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.interaction.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.cors_allow_origin.is_empty() {
            return Err(ConfigError::Invalid("cors_allow_origin must list at least one origin".into()));
        }
        Ok(())
    }
}
