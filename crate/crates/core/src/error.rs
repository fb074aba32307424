use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Each variant maps onto one of the CLI exit-code classes through
/// [`Error::class`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("linear system has no solution")]
    NoSolution,
    #[error("cone generators are linearly dependent")]
    DependentGenerators,
    #[error("zero vector where a nonzero lattice vector is required")]
    ZeroVector,
    #[error("basis is not unimodular (index {0})")]
    NotUnimodular(String),
    #[error("ambient dimension {dim} exceeds the configured maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("cone is not simplicial")]
    NotSimplicial,
    #[error("cone is not pointed")]
    NotPointed,
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("cone is not generic for the complement map at {locus}")]
    NotGeneric { locus: String },
    #[error("ray {0} is not in the complement-map table")]
    UnknownRay(String),
    #[error("vector is not in the complement subspace")]
    VectorNotInPsi,
    #[error("point {0} is not integral")]
    NotIntegral(String),
    #[error("point {0} is not a vertex of the polytope")]
    NonExtremeVertex(String),
    #[error("cone is not full-dimensional")]
    NotFullDim,
    #[error("polytope is not full-dimensional in its ambient space")]
    PolytopeNotFullDim,
    #[error("direction is degenerate: {0}")]
    DirectionDegenerate(String),
    #[error("denominator linear form is zero")]
    ZeroDenominatorForm,
    #[error("explicit formula inconsistent: {0}")]
    InconsistentExplicitFormula(String),
    #[error("pipelines disagree: {0}")]
    PipelineMismatch(String),
    #[error("local formula produced a non-integer count {0}")]
    NonIntegerResult(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid complement map: {0}")]
    InvalidMap(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Coarse error classes, used for exit codes and C status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    NotGeneric,
    Internal,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NotGeneric { .. }
            | Error::UnknownRay(_)
            | Error::NotIntegral(_)
            | Error::VectorNotInPsi => ErrorClass::NotGeneric,
            Error::InconsistentExplicitFormula(_)
            | Error::PipelineMismatch(_)
            | Error::NonIntegerResult(_) => ErrorClass::Internal,
            _ => ErrorClass::Usage,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
