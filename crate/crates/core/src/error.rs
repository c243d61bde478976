use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("qubit index {0} out of range")]
    QubitOutOfRange(usize),
    #[error("repeated target qubit {0}")]
    RepeatedTarget(usize),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("channel is not trace preserving (deviation {0:e})")]
    NotTracePreserving(f64),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("unsupported gate `{0}`")]
    UnsupportedGate(String),
    #[error("qubits {0} and {1} are not connected")]
    Disconnected(usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("insufficient statistics: {0}")]
    InsufficientStatistics(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of a numerical routine rather than of its inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::InsufficientStatistics(_))
    }
}
