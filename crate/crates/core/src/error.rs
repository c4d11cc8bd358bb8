use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("action mismatch: {0}")]
    ActionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Values near the edge of the line grid are not negligible, so the
    /// truncation to `[-L, L)` is no longer faithful.
    #[error("domain truncation: edge/max ratio {ratio:.3e} exceeds {tolerance:.1e} ({context})")]
    DomainTruncation {
        context: String,
        ratio: f64,
        tolerance: f64,
    },

    #[error("total mass {mass:.3e} is not zero (relative tolerance {tolerance:.1e})")]
    MeanNotZero { mass: f64, tolerance: f64 },

    #[error("function does not vanish on the diagonal: {ratio:.3e} > {tolerance:.1e}")]
    NotInIdeal { ratio: f64, tolerance: f64 },

    #[error("tempered bound violated at x = {x}, order {order}: ratio {ratio:.6e} > bound {bound:.6e}")]
    BoundViolation {
        x: f64,
        order: usize,
        ratio: f64,
        bound: f64,
    },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}
