use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Fock dimension {0} (need at least 2)")]
    InvalidDimension(usize),

    #[error("truncation too small: dimension {actual} < required {required}")]
    Truncation { required: usize, actual: usize },

    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("herald has vanishing likelihood (Tr[P†Pρ] = {weight:e})")]
    ZeroLikelihood { weight: f64 },

    #[error("Mandel Q undefined for near-vacuum state (<n> = {mean:e})")]
    UndefinedQ { mean: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("regime violation: {0}")]
    Regime(String),

    #[error("fixed point failed to converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("no measurement time reaches the target (modulus mismatch {mismatch:e})")]
    NoSolution { mismatch: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => 1,
            Error::Regime(_) => 3,
            _ => 2,
        }
    }
}
