use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("scenario mismatch: {left:?} vs {right:?}")]
    ScenarioMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid setting map: {0}")]
    InvalidMap(String),

    #[error("enumeration cap exceeded: {requested} > {cap}")]
    CapExceeded { requested: u128, cap: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid measurement settings: {0}")]
    InvalidSettings(String),

    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("document error: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
