use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid network parameters: {0}")]
    InvalidParams(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    Dimension {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("structural error: {0}")]
    Structure(String),

    #[error("distance must be positive, got {0} m")]
    Domain(f64),

    #[error("cannot associate {stas} STAs to {aps} APs with at least one STA each")]
    InfeasibleAssociation { aps: usize, stas: usize },

    #[error("throughput gain is undefined for a zero-throughput baseline")]
    UndefinedGain,

    #[error("instance exceeds solver limits: {0}")]
    SizeLimit(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
