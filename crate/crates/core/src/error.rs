use std::path::PathBuf;

use crate::model::ValidationIssue;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid system configuration:\n{}", format_issues(.0))]
    Validation(Vec<ValidationIssue>),

    #[error("area index {index} out of range for a {areas}-area system")]
    AreaIndex { index: usize, areas: usize },

    #[error("decision vector has {got} entries, expected {expected}")]
    DecisionShape { expected: usize, got: usize },

    #[error("invalid {what}: {reason}")]
    InvalidParams { what: &'static str, reason: String },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("runs do not share a scenario: {0}")]
    ScenarioMismatch(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

fn format_issues(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  {}: {}", i.path, i.message))
        .collect::<Vec<_>>()
        .join("\n")
}
