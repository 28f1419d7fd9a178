use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid resolution {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("point {0} lies outside the domain")]
    OutOfDomain(String),
    #[error("point {0} is within the exclusion zone of a singular point")]
    SingularExclusion(String),
    #[error("circle or disk exits the admissible region: {0}")]
    RegionExit(String),
    #[error("truncation order {m} too large for grid of size {n}")]
    OrderTooLarge { m: usize, n: usize },
    #[error("Parseval inconsistency {0:.3e} above tolerance")]
    Parseval(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value produced by {0}")]
    NonFinite(String),
    #[error("iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("observed contraction ratio {0:.4} is not below 1")]
    NotContracting(f64),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("insufficient radii: {0} (need at least 4)")]
    InsufficientRadii(usize),
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("config error at line {line}, column {column}: {msg}")]
    Config { line: usize, column: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
