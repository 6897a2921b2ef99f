use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs have inconsistent or unsupported shapes.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An input contains NaN or infinite entries.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// A scalar argument lies outside the admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative kernel failed to converge or produced garbage.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Spectra that must be disjoint (nearly) collide.
    #[error("eigenvalue collision: gap {gap:.3e} below threshold {threshold:.3e} ({context})")]
    EigenvalueCollision {
        gap: f64,
        threshold: f64,
        context: String,
    },

    /// A sampling strategy cannot be prepared for this problem.
    #[error("strategy unavailable: {0}")]
    StrategyUnavailable(String),

    /// A requested a-priori bound does not apply.
    #[error("bound unavailable: {0}")]
    BoundUnavailable(String),

    /// A documented precondition of the operation is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
