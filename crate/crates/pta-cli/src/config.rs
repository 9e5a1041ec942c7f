//! Scenario configuration: a single JSON document, with every field
//! overridable by repeated `--set key=value` flags (dotted paths); flags win
//! over the file.

use pta_core::sim::IntegratorConfig;
use pta_core::systems::{catalog_get, LtvSystem};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::CliError;

fn default_grid_points() -> usize {
    1000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Catalog system name.
    pub system: String,
    /// Named reals for the system: tau always, alpha / k where applicable.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Initial state; required for simulation and envelope analysis.
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    /// Switching threshold; presence selects the switched simulation.
    #[serde(default)]
    pub sigma: Option<f64>,
    /// Final time; defaults to tau·(1−1e-3) for plain singular runs and 2tau
    /// for switched runs.
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub integrator: IntegratorOverrides,
    #[serde(default)]
    pub analysis: AnalysisFlags,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Seed for randomized scenario draws (envelope probes without x0).
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorOverrides {
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub abs_tol: Option<f64>,
    #[serde(default)]
    pub max_step: Option<f64>,
    #[serde(default)]
    pub min_step: Option<f64>,
    #[serde(default)]
    pub terminal_gap: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisFlags {
    pub pta: bool,
    pub singularity: bool,
    pub eigtrace: bool,
    pub window: bool,
    pub envelopes: bool,
}

/// A parsed config together with the catalog system and merged integrator
/// settings it resolves to.
#[derive(Debug)]
pub struct Resolved {
    pub config: ScenarioConfig,
    pub system: LtvSystem,
    pub integrator: IntegratorConfig,
}

/// Named CLI flags that override config fields (flags win).
#[derive(Debug, Default, Clone)]
pub struct FlagOverrides {
    pub output_dir: Option<PathBuf>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub sets: Vec<String>,
}

pub fn load(path: Option<&Path>, flags: &FlagOverrides) -> Result<Resolved, CliError> {
    let mut doc: serde_json::Value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", p.display()))
            })?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::Config(format!(
                    "config {}: JSON syntax error at line {}, column {}: {e}",
                    p.display(),
                    e.line(),
                    e.column()
                ))
            })?
        }
        None => serde_json::json!({}),
    };
    for pair in &flags.sets {
        apply_set(&mut doc, pair)?;
    }
    if let Some(dir) = &flags.output_dir {
        doc["output_dir"] = serde_json::json!(dir);
    }
    if let Some(grid) = flags.grid {
        doc["grid_points"] = serde_json::json!(grid);
    }
    if let Some(seed) = flags.seed {
        doc["seed"] = serde_json::json!(seed);
    }
    resolve_value(doc)
}

pub fn resolve_value(doc: serde_json::Value) -> Result<Resolved, CliError> {
    let config: ScenarioConfig = serde_json::from_value(doc)
        .map_err(|e| CliError::Config(format!("config field error: {e}")))?;
    let system = catalog_get(&config.system, &config.params)
        .map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(x0) = &config.x0 {
        if x0.len() != system.dim() {
            return Err(CliError::Config(format!(
                "x0 has length {}, but system '{}' has dimension {}",
                x0.len(),
                config.system,
                system.dim()
            )));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Config("x0 entries must be finite".into()));
        }
    }
    if let Some(sigma) = config.sigma {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(CliError::Config(format!("sigma must be positive, got {sigma}")));
        }
    }
    if config.grid_points < 2 {
        return Err(CliError::Config("grid_points must be at least 2".into()));
    }
    let o = &config.integrator;
    let mut integrator = IntegratorConfig::for_tau(system.tau());
    if let Some(v) = o.rel_tol {
        integrator.rel_tol = v;
    }
    if let Some(v) = o.abs_tol {
        integrator.abs_tol = v;
    }
    if let Some(v) = o.max_step {
        integrator.max_step = v;
    }
    if let Some(v) = o.min_step {
        integrator.min_step = v;
    }
    if let Some(v) = o.terminal_gap {
        integrator.terminal_gap = v;
    }
    Ok(Resolved { config, system, integrator })
}

/// Apply one `key=value` override; dotted keys descend into objects and the
/// value is parsed as JSON, falling back to a string.
fn apply_set(doc: &mut serde_json::Value, pair: &str) -> Result<(), CliError> {
    let Some((key, raw)) = pair.split_once('=') else {
        return Err(CliError::Config(format!("--set expects key=value, got '{pair}'")));
    };
    let value: serde_json::Value =
        serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(CliError::Config(format!("--set key '{key}' has an empty segment")));
        }
        if !node.is_object() {
            *node = serde_json::json!({});
        }
        let map = node.as_object_mut().expect("object ensured above");
        if i + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map.entry(part.to_string()).or_insert(serde_json::json!({}));
    }
    Ok(())
}
