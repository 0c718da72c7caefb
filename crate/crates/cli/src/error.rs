use thiserror::Error;

/// Everything that stops a run before a report is produced. All of these
/// map to exit status 2; verification failures are reported, not raised.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error ({invariant}): {detail}")]
    Validation { invariant: String, detail: String },
    #[error("dimension {dim} exceeds the cap of {cap} (raise it with --max-dim, unsupported)")]
    Cap { dim: usize, cap: usize },
    #[error("computation failed: {0}")]
    Compute(#[from] sideinfo_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
