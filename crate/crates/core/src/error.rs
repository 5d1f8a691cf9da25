use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid vector: {0}")]
    InvalidVector(&'static str),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(&'static str),
    #[error("matrix is singular to working precision (pivot {pivot:e} in column {column})")]
    SingularMatrix { column: usize, pivot: f64 },
    #[error("mu = {mu} is numerically in the spectrum")]
    MuInSpectrum { mu: f64 },
    #[error("inverse iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("eigenvalue near {shift} is not simple (|cos| = {cosine:.6})")]
    DegenerateEigenvalue { shift: f64, cosine: f64 },
    #[error("symbol is not conjugate symmetric at frequency {frequency}")]
    SymbolNotConjugateSymmetric { frequency: i64 },
    #[error("norm {norm:e} of t*A exceeds the supported range")]
    NormTooLarge { norm: f64 },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("edge {edge} has nonpositive length {length}")]
    NonPositiveLength { edge: usize, length: f64 },
    #[error("mu = {mu} violates the direction constraint relative to mu0 = {mu0}")]
    DirectionViolated { mu: f64, mu0: f64 },
    #[error("operator is not symmetric under the weighted inner product (defect {defect:e})")]
    NotSymmetric { defect: f64 },
    #[error("resolvent is not positive definite (eigenvalue {eigenvalue:e})")]
    NotPositiveDefinite { eigenvalue: f64 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("point ({x}, {y}) lies outside the domain")]
    OutOfDomain { x: f64, y: f64 },
    #[error("mu must be nonzero")]
    MuZero,
}
