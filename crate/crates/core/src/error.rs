use thiserror::Error;

/// Errors raised anywhere in the modulus pipeline.
///
/// Numeric payloads are widened to `f64` so the type stays independent of the
/// scalar the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms (partial sum {partial_sum})")]
    Evaluation { terms: usize, partial_sum: f64 },

    #[error("root find failed: {0}")]
    RootFind(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("conjugate gradient stalled after {iterations} iterations (relative residual {residual:e})")]
    Solver { iterations: usize, residual: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
