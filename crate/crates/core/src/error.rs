use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("sphere dimension d = {0} is not supported (need d >= 2)")]
    InvalidDimension(u32),
    #[error("argument {t} outside [-1, 1]")]
    OutsideInterval { t: f64 },
    #[error("cannot build a point on the sphere from {0:?}")]
    DegeneratePoint([f64; 3]),
    #[error("point set must not be empty")]
    EmptyPointSet,
    #[error("length mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("weight {index} is {value}, weights must be strictly positive")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("Wendland smoothness sigma = {0} not in 0..=4")]
    SigmaOutOfRange(u32),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("symmetric eigensolver did not converge on a {dim}x{dim} Gram matrix")]
    EigenSolver { dim: usize },
    #[error("reference rule is exact to degree {got}, need at least {required}")]
    InsufficientExactness { required: usize, got: usize },
    #[error(
        "Gram matrix is rank deficient at degree {n} (lambda_min = {lambda_min:.3e}, eta = {eta:.3e}); \
         the rule cannot support hyperinterpolation of this degree"
    )]
    RankDeficient { n: usize, lambda_min: f64, eta: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
