use fpindex_core::carrier::CarrierError;
use fpindex_core::index::IndexError;
use fpindex_core::Simplex;
use serde_json::{json, Value};

use crate::json;

/// Errors with their exit codes.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    /// Unreadable or inconsistent input.
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Parse(String),
    #[error("not admissible: {} suspicious simplices", .suspicious.len())]
    Inadmissible { suspicious: Vec<Simplex> },
    #[error("{message}")]
    Acyclicity { message: String, simplex: Option<Simplex> },
    #[error("no admissible level up to {0}")]
    ResolutionExhausted(usize),
    /// A check ran and did not hold.
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Inadmissible { .. } => 3,
            CliError::Acyclicity { .. } => 4,
            CliError::ResolutionExhausted(_) => 5,
            CliError::Verification(_) => 6,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Parse(_) => "parse",
            CliError::Inadmissible { .. } => "inadmissible",
            CliError::Acyclicity { .. } => "acyclicity",
            CliError::ResolutionExhausted(_) => "resolution-exhausted",
            CliError::Verification(_) => "verification",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "code": self.code(),
            "kind": self.kind(),
            "message": self.to_string(),
        });
        match self {
            CliError::Inadmissible { suspicious } => v["suspicious"] = json::simplices(suspicious),
            CliError::Acyclicity { simplex: Some(s), .. } => v["simplex"] = json::simplex(s),
            CliError::ResolutionExhausted(cap) => v["level_cap"] = json!(cap),
            _ => {}
        }
        json!({ "error": v })
    }
}

impl From<CarrierError> for CliError {
    fn from(e: CarrierError) -> Self {
        match e {
            CarrierError::Obstruction { ref simplex, .. } => CliError::Acyclicity {
                message: e.to_string(),
                simplex: Some(simplex.clone()),
            },
            CarrierError::Unverified(_) => CliError::Verification(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<IndexError> for CliError {
    fn from(e: IndexError) -> Self {
        match e {
            IndexError::Carrier(c) => c.into(),
            IndexError::Inadmissible(r) => CliError::Inadmissible {
                suspicious: r.suspicious,
            },
            IndexError::ResolutionExhausted(cap) => CliError::ResolutionExhausted(cap),
            IndexError::Unverified(_) => CliError::Verification(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<fpindex_core::complex::ComplexError> for CliError {
    fn from(e: fpindex_core::complex::ComplexError) -> Self {
        CliError::Input(e.to_string())
    }
}
