use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong inside the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("payoff entry {value} at ({row}, {col}) lies outside [0, 1]")]
    PayoffOutOfRange { row: usize, col: usize, value: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("conditioning set carries zero probability mass")]
    EmptyConditioning,

    #[error("epsilon must be non-negative, got {0}")]
    NegativeEpsilon(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("search budget exceeded: {required} candidates needed, cap is {cap}")]
    BudgetExceeded { required: u128, cap: u128 },

    #[error("precondition violated: {bound} (measured {measured:.6}, required {required:.6})")]
    PreconditionViolated {
        bound: &'static str,
        measured: f64,
        required: f64,
    },

    #[error("dense-subgraph extraction failed: {0}")]
    ExtractionFailed(String),

    #[error("clique reconstruction failed: {0}")]
    ReconstructionFailed(String),

    #[error("graph is not 4-regular: vertex {vertex} has degree {degree}")]
    NotFourRegular { vertex: usize, degree: usize },

    #[error("graph is not connected")]
    Disconnected,

    #[error("pure BNE search failed: {0}")]
    BneSearchFailed(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Format(err.to_string())
    }
}
