//! The experiment configuration file: one TOML document with nested
//! sections; every field has a default, so an empty file is a valid
//! reference-scenario TDD experiment.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::ppo::PpoHyperparams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// "rw" | "rr" | "ga" | "ppo".
    pub policy: String,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    /// Fairness floor reported (not enforced) in the metrics.
    pub jain_min: f64,
    pub env: EnvConfig,
    /// When absent, mode-appropriate defaults are used.
    pub ppo: Option<PpoHyperparams>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            policy: "ppo".into(),
            seeds: vec![1, 2, 3, 4, 5],
            output_dir: default_output_dir(),
            jain_min: 0.85,
            env: EnvConfig::default(),
            ppo: None,
        }
    }
}

/// Default output directory; overridable via `AUVSIM_OUT`.
pub fn default_output_dir() -> PathBuf {
    std::env::var_os("AUVSIM_OUT").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = toml::from_str(&text).map_err(|e| Error::Serde(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !["rw", "rr", "ga", "ppo"].contains(&self.policy.as_str()) {
            return Err(Error::Config(format!(
                "unknown policy {:?}; expected rw, rr, ga or ppo",
                self.policy
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must be nonempty".into()));
        }
        self.env.validate()?;
        if let Some(hp) = &self.ppo {
            hp.validate()?;
        }
        Ok(())
    }

    pub fn hyperparams(&self) -> PpoHyperparams {
        self.ppo.clone().unwrap_or_else(|| PpoHyperparams::for_mode(self.env.mode))
    }
}
