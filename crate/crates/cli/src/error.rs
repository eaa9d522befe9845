use serde_json::json;
use spd_core::SpdError;
use thiserror::Error;

use crate::config::SchemaIssue;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error: {}", summarize(.0))]
    Schema(Vec<SchemaIssue>),
    #[error("{0}")]
    Core(#[from] SpdError),
    #[error("io error: {0}")]
    Io(String),
}

fn summarize(issues: &[SchemaIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("{}: {}", i.path, i.reason))
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                SpdError::InvalidParameter { .. } | SpdError::GridError(_) => 2,
                SpdError::HypothesisViolation(_)
                | SpdError::OutOfTimeRange { .. }
                | SpdError::BoundedVariation
                | SpdError::NonIntegrable(_) => 4,
                _ => 3,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "schema",
            CliError::Io(_) => "io",
            CliError::Core(_) => match self.exit_code() {
                2 => "schema",
                4 => "hypothesis",
                _ => "numerical",
            },
        }
    }

    /// Machine-readable form written to standard error.
    pub fn to_json(&self) -> String {
        let issues = match self {
            CliError::Schema(v) => serde_json::to_value(v).unwrap_or_default(),
            CliError::Core(SpdError::InvalidParameter { path, reason }) => json!([{ "path": path, "reason": reason }]),
            _ => json!([]),
        };
        json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
            "issues": issues,
        })
        .to_string()
    }
}
