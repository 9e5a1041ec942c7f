//! Library backing the `pta` binary: scenario configuration, command
//! implementations, and the deterministic CSV/SVG writers. Kept as a library
//! so integration tests can reuse the parsers and report types.

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the
// out-of-range values, which `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod csvio;
pub mod svg;

use serde::{Deserialize, Serialize};

/// Exit-code contract: 0 success, 2 config error, 3 numeric error.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric { kind: String, message: String },
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Numeric { kind, message } => write!(f, "numeric error ({kind}): {message}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric { .. } => 3,
        }
    }

    /// Serialized error verdict printed to stderr on numeric failures.
    pub fn verdict_json(&self) -> serde_json::Value {
        match self {
            CliError::Config(msg) => serde_json::json!({"error": {"kind": "config", "message": msg}}),
            CliError::Numeric { kind, message } => {
                serde_json::json!({"error": {"kind": kind, "message": message}})
            }
        }
    }

    pub fn numeric(kind: &str, err: impl std::fmt::Display) -> Self {
        CliError::Numeric { kind: kind.into(), message: err.to_string() }
    }

    pub fn io(context: &str, err: std::io::Error) -> Self {
        CliError::Numeric { kind: "io".into(), message: format!("{context}: {err}") }
    }
}

/// Outcome summary of a switched run, embedded in report.json.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SwitchSummary {
    pub sigma: f64,
    pub switched: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frozen_gain: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frozen_max_real: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub post_switch_max_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pre_switch_max_input: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_input: Option<f64>,
    /// Smallest norm reached when no crossing occurred.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Top-level report.json document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub analysis: pta_core::AnalysisReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub switching: Option<SwitchSummary>,
}
