//! JSON configuration files, command-line overrides and published schemas.

use std::path::Path;

use schemars::schema_for;

use crate::error::{Error, Result};
use crate::types::CompressionConfig;

/// Reads a JSON config. Missing fields take their defaults, unknown fields
/// are rejected, and the result is validated.
pub fn load_config(path: &Path) -> Result<CompressionConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text).map_err(|e| match e {
        Error::InvalidConfig(msg) => Error::InvalidConfig(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_config(text: &str) -> Result<CompressionConfig> {
    let config: CompressionConfig =
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Values given on the command line, applied over a file or the defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
    pub rho: Option<f64>,
    pub history_len: Option<usize>,
    pub patch_px: Option<u32>,
    pub merge_factor: Option<u32>,
    pub pruning_layer: Option<u32>,
}

impl ConfigOverrides {
    pub fn apply(&self, mut config: CompressionConfig) -> Result<CompressionConfig> {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { config.$field = v; })*
            };
        }
        set!(lambda, gamma, mu, rho, history_len, patch_px, merge_factor, pruning_layer);
        config.validate()?;
        Ok(config)
    }
}

/// Loads `path` when given, otherwise starts from the defaults, then applies
/// the overrides.
pub fn resolve_config(path: Option<&Path>, overrides: &ConfigOverrides) -> Result<CompressionConfig> {
    let base = match path {
        Some(p) => load_config(p)?,
        None => CompressionConfig::default(),
    };
    overrides.apply(base)
}

/// JSON schema of the config file.
pub fn config_schema() -> serde_json::Value {
    serde_json::to_value(schema_for!(CompressionConfig)).expect("schema serialises")
}

/// JSON schema of `report.json`.
pub fn report_schema() -> serde_json::Value {
    serde_json::to_value(schema_for!(crate::accounting::EfficiencyReport)).expect("schema serialises")
}

/// JSON schema of `plan.json`.
pub fn plan_schema() -> serde_json::Value {
    serde_json::to_value(schema_for!(crate::tar::HistoryBudgetPlan)).expect("schema serialises")
}
