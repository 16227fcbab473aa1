//! Config-file loading. A config is a single JSON document with top-level
//! keys `command`, `parameters`, `axes`, and `output`; unknown keys anywhere
//! are hard errors so parameter-name typos never pass silently.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
    #[serde(default)]
    pub axes: Vec<AxisConfig>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: Option<String>,
    #[serde(default)]
    pub path: Option<String>,
}

/// Parameter names each command accepts in a config file.
pub fn allowed_parameters(command: &str) -> Option<&'static [&'static str]> {
    Some(match command {
        "battle-p" => &["s", "m", "n", "R", "gamma", "i", "general", "gamma_convention"],
        "winprob" => &["s", "p", "m", "n", "R", "gamma", "general", "gamma_convention"],
        "simulate" => &[
            "s", "p", "m", "n", "R", "gamma", "gamma_convention", "trials", "seed",
            "partitions",
        ],
        "decide" => &["r", "b", "c", "s_hat", "m0", "m1", "n"],
        "equilibrium" => &["members", "m0", "m1", "n", "actual_s"],
        "classify" => &[
            "r", "b", "c", "s_hat", "r_myopic", "bc_naive", "s_defeatist", "s_complacent",
        ],
        "verify-prop1" => &["s", "n", "R", "gamma", "m_max", "gamma_convention"],
        "critical-s" => &["n", "R", "gamma", "m_max", "s_lo", "s_hi", "tol", "gamma_convention"],
        "optimal-m" => &["s", "n", "R", "gamma", "m_max", "gamma_convention"],
        "sweep" => &["quantity", "gamma_convention", "fixed"],
        _ => return None,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::new(format!("config not found: {}", path.display()))
        } else {
            CliError::new(format!("cannot read config {}: {e}", path.display()))
        }
    })?;
    let config: RunConfig = serde_json::from_str(&text).map_err(|e| {
        CliError::new(format!(
            "config parse error in {} at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    let allowed = allowed_parameters(&config.command).ok_or_else(|| {
        CliError::new(format!("unknown command '{}' in config", config.command))
    })?;
    for key in config.parameters.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(CliError::new(format!(
                "unknown parameter key '{key}' for command '{}'",
                config.command
            )));
        }
    }
    if !config.axes.is_empty() && config.command != "sweep" {
        return Err(CliError::new(format!(
            "axes are only valid for the sweep command, not '{}'",
            config.command
        )));
    }
    Ok(config)
}

/// Pull a required float out of the parameter map.
pub fn require_f64(params: &BTreeMap<String, Value>, key: &str) -> Result<f64, CliError> {
    params
        .get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| CliError::new(format!("missing or non-numeric parameter '{key}'")))
}

pub fn optional_f64(params: &BTreeMap<String, Value>, key: &str) -> Result<Option<f64>, CliError> {
    match params.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| CliError::new(format!("non-numeric parameter '{key}'"))),
    }
}

pub fn optional_u64(params: &BTreeMap<String, Value>, key: &str) -> Result<Option<u64>, CliError> {
    match params.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| CliError::new(format!("parameter '{key}' must be a non-negative integer"))),
    }
}

pub fn require_u32(params: &BTreeMap<String, Value>, key: &str) -> Result<u32, CliError> {
    params
        .get(key)
        .and_then(Value::as_u64)
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| CliError::new(format!("missing or invalid integer parameter '{key}'")))
}
