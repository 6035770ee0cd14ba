use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("parameter `{name}` = {value} outside admissible range: {reason}")]
    BadParameter { name: String, value: f64, reason: String },
    #[error("missing parameter `{0}`")]
    MissingParameter(String),
    #[error("{what} is not available for `{entry}`")]
    Absent { entry: String, what: &'static str },
    #[error("only asymptotics are known for `{entry}` (tail exponent {tail_exponent:?})")]
    AsymptoticsOnly { entry: String, tail_exponent: Option<f64> },
    #[error("quadrature did not converge: value {value}, error estimate {error:e}")]
    QuadratureNotConverged { value: f64, error: f64 },
    #[error("non-finite {what} at {at}")]
    NonFinite { what: &'static str, at: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{nodes} nodes exceed the dense budget of {budget}; use the matrix-free path")]
    BudgetExceeded { nodes: usize, budget: usize },
    #[error("operator has negative spectrum (smallest eigenvalue {0:e}); supercritical")]
    Supercritical(f64),
    #[error("vector must be strictly positive (min entry {0:e})")]
    NotPositive(f64),
    #[error("h is not superharmonic: max violation {0:e}")]
    NotSuperharmonic(f64),
    #[error("iterative solver did not converge after {iterations} iterations (residual {residual:e})")]
    SolverNotConverged { iterations: usize, residual: f64 },
    #[error("sequence too short: need at least {need} sizes, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("trace too short: {0}")]
    TraceTooShort(String),
    #[error("transmutation tail not negligible: {0:e}")]
    TailNotNegligible(f64),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
