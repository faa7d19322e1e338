//! The `consult` command line tool and the HTTP session service.
//!
//! Commands load a model from a file path or a shipped model id, rebuild a
//! consultation state from `--answer question=label` flags, and print text
//! or JSON. `serve` exposes the same states over HTTP with an append-only
//! event log per session.

pub mod commands;
pub mod models;
pub mod script;
pub mod service;
pub mod store;

use consult_core::Error;
use serde::Serialize;

/// Stable machine name of an error, used in JSON error records and HTTP bodies.
pub fn error_kind(e: &anyhow::Error) -> &'static str {
    match e.downcast_ref::<Error>() {
        Some(e) => core_kind(e),
        None if e.downcast_ref::<std::io::Error>().is_some() => "io",
        None => "usage",
    }
}

pub fn core_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::Lookup(_) => "lookup",
        Error::Schema(_) => "schema",
        Error::State(_) => "state",
        Error::TooLarge { .. } => "too_large",
        Error::UndefinedDivergence => "undefined_divergence",
        Error::Parse { .. } => "parse",
        Error::Invalid(_) => "invalid",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub findings: Vec<String>,
}

/// `{"error": {...}}`
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ErrorRecord {
    pub error: ErrorBody,
}

impl ErrorRecord {
    pub fn new(e: &anyhow::Error) -> Self {
        let findings = match e.downcast_ref::<Error>() {
            Some(Error::Invalid(report)) => report
                .errors
                .iter()
                .map(|f| format!("{}: {}", f.code, f.message))
                .collect(),
            _ => Vec::new(),
        };
        Self {
            error: ErrorBody {
                kind: error_kind(e).into(),
                message: format!("{e:#}"),
                findings,
            },
        }
    }
}

/// Fixed-point text with negative zero printed as zero.
pub fn fixed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_owned(),
        _ => s,
    }
}
