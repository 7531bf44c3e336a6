use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] lommel_zeros::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed input: {0}")]
    Format(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// One-line JSON record written to stderr on failure.
    pub fn record(&self) -> serde_json::Value {
        let (kind, op) = match self {
            CliError::Usage(_) => ("usage", None),
            CliError::Core(e) => (e.kind(), Some(e.op())),
            CliError::Io(_) => ("io", None),
            CliError::Csv(_) => ("csv", None),
            CliError::Json(_) => ("json", None),
            CliError::Format(_) => ("format", None),
        };
        json!({
            "schema_version": crate::table::SCHEMA_VERSION,
            "error": { "kind": kind, "op": op, "message": self.to_string() },
        })
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
