/// Error type shared by every module of the crate.
///
/// Construction errors (bad bounds, mismatched lengths) are reported through
/// this enum; plain arithmetic on already-validated objects does not fail.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("region dimension must be at least 1")]
    EmptyRegion,

    #[error("axis {axis}: lower bound {lo} is not below upper bound {hi}")]
    InvalidBounds { axis: usize, lo: f64, hi: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("component count mismatch: expected {expected}, got {got}")]
    ComponentCount { expected: usize, got: usize },

    #[error("form degree {degree} is invalid here (dimension {dim})")]
    BadDegree { degree: usize, dim: usize },

    #[error("jet order {requested} exceeds stored order {available}")]
    OrderMismatch { requested: usize, available: usize },

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("quadrature order must be at least 1")]
    BadQuadratureOrder,

    #[error("{0}")]
    Unsupported(String),

    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
