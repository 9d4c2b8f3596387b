use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("qubit count {0} exceeds the supported maximum of {max}", max = crate::pauli::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("labels {0} and {1} anticommute")]
    Anticommuting(String, String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid cnc set: {0}")]
    InvalidCnc(String),

    #[error("label {0} is not a member of the cnc set")]
    NotMember(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("linear program: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
