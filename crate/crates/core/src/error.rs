use thiserror::Error;

/// Errors raised by the numerical kernels, models, solvers and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("restricted submatrix is rank deficient")]
    RankDeficient,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("support variants do not match")]
    SupportMismatch,
    #[error("invalid objective: {0}")]
    InvalidObjective(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("matrix has complex eigenvalues (discriminant {0:e})")]
    ComplexEigenvalues(f64),
    #[error("subset enumeration of C({n}, {s}) exceeds the budget of {budget}")]
    EnumerationBudget { n: usize, s: usize, budget: u64 },
    #[error("zero search direction in the range of the design")]
    ZeroDirection,
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("missing ground truth for {0}")]
    MissingTruth(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
