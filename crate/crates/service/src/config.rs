use std::fs;
use std::path::{Path, PathBuf};

use burt_core::dialogue::DialogueConfig;
use burt_core::predictor::PredictorConfig;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PORT_VAR: &str = "BURT_PORT";
pub const MODELS_DIR_VAR: &str = "BURT_MODELS_DIR";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("invalid port {0:?}: expected an integer in 1..=65535")]
    BadPort(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    /// One subdirectory per app, each holding `model.json`.
    pub models_dir: PathBuf,
    /// Screenshot root; `<assets_dir>/<app_id>/...`. Defaults to `models_dir`.
    pub assets_dir: Option<PathBuf>,
    /// Reports and session transcripts are written here.
    pub output_dir: PathBuf,
    pub host: String,
    pub port: u16,
    pub threshold: f64,
    pub card_cap: usize,
    pub path_bound: usize,
    /// Extra lexicon entries merged over the builtin vocabulary.
    pub lexicon: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            models_dir: PathBuf::from("models"),
            assets_dir: None,
            output_dir: PathBuf::from("output"),
            host: "127.0.0.1".to_string(),
            port: 8080,
            threshold: 0.5,
            card_cap: 5,
            path_bound: 8,
            lexicon: None,
        }
    }
}

impl ServiceConfig {
    /// Reads `path` (or defaults), then applies environment overrides.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut config = match path {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| ConfigError::Read {
                    path: p.display().to_string(),
                    message: e.to_string(),
                })?;
                Self::from_json(&text)?
            }
            None => ServiceConfig::default(),
        };
        config.apply_env(|k| std::env::var(k).ok())?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(p) = lookup(PORT_VAR) {
            self.port = parse_port(&p)?;
        }
        if let Some(d) = lookup(MODELS_DIR_VAR) {
            self.models_dir = PathBuf::from(d);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.port == 0 {
            return Err(ConfigError::BadPort("0".into()));
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(ConfigError::Invalid(format!(
                "threshold {} outside (0, 1]",
                self.threshold
            )));
        }
        if self.card_cap == 0 || self.path_bound == 0 {
            return Err(ConfigError::Invalid(
                "card_cap and path_bound must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn assets_root(&self) -> &Path {
        self.assets_dir.as_deref().unwrap_or(&self.models_dir)
    }

    pub fn dialogue_config(&self) -> DialogueConfig {
        DialogueConfig {
            threshold: self.threshold,
            card_cap: self.card_cap,
            predictor: PredictorConfig {
                max_path_len: self.path_bound,
                max_steps: self.card_cap,
                ..PredictorConfig::default()
            },
            ..DialogueConfig::default()
        }
    }
}

pub fn parse_port(text: &str) -> Result<u16, ConfigError> {
    match text.trim().parse::<u16>() {
        Ok(p) if p > 0 => Ok(p),
        _ => Err(ConfigError::BadPort(text.to_string())),
    }
}
