//! CLI-level errors: parse failures with positions, format violations, IO
//! context, and pass-through audit errors.

use tempaudit_core::AuditError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A file failed to parse; `line` is 1-based.
    #[error("{file}:{line}: parse error: {detail}")]
    Parse {
        file: String,
        line: u64,
        detail: String,
    },

    /// A file parsed but does not follow the expected layout.
    #[error("{file}: {detail}")]
    Format { file: String, detail: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Audit(#[from] AuditError),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}
