use thiserror::Error;
use weylscope_core::GeometryError;

use crate::expr::ExprError;

/// Everything that makes a command exit with status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("in {entry}: {source}")]
    Expr {
        entry: String,
        #[source]
        source: ExprError,
    },
    #[error("invalid metric spec: {0}")]
    Spec(String),
    #[error("invalid points: {0}")]
    Points(String),
    #[error("invalid arguments: {0}")]
    Args(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
