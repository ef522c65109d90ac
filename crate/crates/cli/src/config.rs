use std::path::Path;

use clap::ValueEnum;
use modal_core::Tolerances;
use serde::{Deserialize, Serialize};

pub const CONFIG_VAR: &str = "MODAL_KERNEL_TOLERANCES";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

/// Run-wide settings. Every field is optional in the file; missing ones
/// take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub seed: u64,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { tolerances: Tolerances::default(), seed: 0, output_format: OutputFormat::Json }
    }
}

impl RunConfig {
    /// Reads the file named by `MODAL_KERNEL_TOLERANCES`, or the defaults
    /// when the variable is unset. A value starting with `{` is parsed as
    /// inline JSON.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(CONFIG_VAR) {
            Ok(value) if !value.trim().is_empty() => Self::load(&value),
            _ => Ok(Self::default()),
        }
    }

    fn load(value: &str) -> Result<Self, String> {
        let text = if value.trim_start().starts_with('{') {
            value.to_string()
        } else {
            std::fs::read_to_string(Path::new(value)).map_err(|e| format!("{CONFIG_VAR}: cannot read {value}: {e}"))?
        };
        let config: RunConfig = serde_json::from_str(&text).map_err(|e| format!("{CONFIG_VAR}: invalid run configuration: {e}"))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), String> {
        match self.tolerances.first_invalid() {
            Some(name) => Err(format!("{CONFIG_VAR}: tolerance {name} must be a positive finite number")),
            None => Ok(()),
        }
    }
}
