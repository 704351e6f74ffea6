//! Run configuration: a JSON file with a `physical` and an `ensemble`
//! section, every field optional.

use std::fmt;
use std::fs;
use std::path::Path;

use eprb_core::ensemble::EnsembleConfig;
use eprb_core::{Error as CoreError, Experiment, PhysicalConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub physical: PhysicalConfig,
    pub ensemble: EnsembleConfig,
}

/// A configuration problem, located by JSON path and, for syntax and type
/// errors, by line and column.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub position: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some((line, col)) => write!(
                f,
                "`{}` (line {line}, column {col}): {}",
                self.path, self.message
            ),
            None => write!(f, "`{}`: {}", self.path, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(section: &str, err: CoreError) -> ConfigError {
    match err {
        CoreError::InvalidParameter { field, reason } => ConfigError {
            path: format!("{section}.{field}"),
            position: None,
            message: reason,
        },
        other => ConfigError {
            path: section.to_string(),
            position: None,
            message: other.to_string(),
        },
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            ConfigError {
                path,
                position: Some((inner.line(), inner.column())),
                message: inner.to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.physical
            .validate()
            .map_err(|e| invalid("physical", e))?;
        self.ensemble.validate().map_err(|e| invalid("ensemble", e))
    }

    pub fn experiment(&self) -> anyhow::Result<Experiment> {
        self.validate()?;
        Ok(Experiment::new(self.physical)?)
    }
}
