use thiserror::Error;

/// Errors raised by state construction, layout manipulation and the optimizers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("layout error: {0}")]
    Layout(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    /// A matrix failed one of the density-operator invariants. `invariant` is
    /// one of `"hermitian"`, `"trace"`, `"positivity"`, `"dimension"`.
    #[error("invalid state ({invariant}): {detail}")]
    InvalidState {
        invariant: &'static str,
        detail: String,
    },

    #[error("eigenvalue {min_eigenvalue:e} is below the positivity tolerance")]
    Positivity { min_eigenvalue: f64 },

    #[error("decomposition error: {0}")]
    Decomposition(String),

    #[error("maximally correlated state error: {0}")]
    Mcs(String),
}

pub type Result<T> = std::result::Result<T, Error>;
