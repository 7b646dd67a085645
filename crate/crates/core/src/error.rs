use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, row {row} has {cols} entries")]
    NotSquare {
        rows: usize,
        row: usize,
        cols: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is not a power of two")]
    NotQubitDimension(usize),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected {expected}")]
    BadTrace { trace: f64, expected: f64 },

    #[error("Bloch vector has norm {norm} > 1")]
    OutsideBlochBall { norm: f64 },

    #[error("operation needs {expected} qubit(s), got {found}")]
    WrongQubitCount { expected: usize, found: usize },

    #[error("{what} = {value} is out of range {range}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        range: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("channel is not trace preserving (deviation {deviation:e})")]
    NotTracePreserving { deviation: f64 },

    #[error("Kraus list is empty")]
    EmptyKraus,

    #[error("channel {name} is not defined on {n} qubit(s)")]
    UnsupportedQubits { name: String, n: usize },

    #[error("table is not a bijection on {0}-bit strings")]
    NotBijective(usize),

    #[error("table is not Hamming-distance preserving")]
    NotHammingPreserving,

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("outcome {outcome} has vanishing probability but nonzero derivative")]
    SingularProbability { outcome: usize },

    #[error("vector is not normalized (norm {norm})")]
    Unnormalized { norm: f64 },

    #[error("conditions (C1)/(C2) not satisfied: {0}")]
    MergeConditions(String),

    #[error("merge completion is not positive (min eigenvalue {min_eigenvalue:e})")]
    CompletionNotPositive { min_eigenvalue: f64 },

    #[error("target lies outside the HDP cone of the source")]
    OutsideCone,

    #[error("conditional probabilities are not column-stochastic (column {column} sums to {sum})")]
    NotStochastic { column: usize, sum: f64 },

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
