use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Variants are split into input validation problems (bad parameters, mismatched
/// grids, malformed files) and numerical failures (rank deficiency, non-convergence),
/// which callers such as the CLI map to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field contains non-finite values")]
    NonFinite,
    #[error("source is not mean-zero (mean = {mean:e})")]
    NotMeanZero { mean: f64 },
    #[error("coincident points in Green function evaluation")]
    CoincidentPoints,
    #[error("interfaces collide: {0}")]
    Collision(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("mesh too coarse: {0}")]
    MeshTooCoarse(String),
    #[error("rank-deficient constraints: {0}")]
    RankDeficient(String),
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence(_) | Error::RankDeficient(_) | Error::NonFinite
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
