use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("algebra is abelian (commutator is zero)")]
    AlgebraAbelian,

    #[error("numerical rank ambiguous in {context}: smallest retained relative singular value {retained:.3e} is within the gap threshold {threshold:.3e}")]
    NumericalRankFailure {
        context: String,
        retained: f64,
        threshold: f64,
    },

    #[error("decomposition ambiguous: {0}")]
    DecompositionAmbiguous(String),

    #[error("degree overflow: {left} + {right} exceeds dimension {dim}")]
    DegreeOverflow {
        left: usize,
        right: usize,
        dim: usize,
    },

    #[error("endomorphism is not skew-symmetric (|f + f^T| = {0:.3e})")]
    NotSkew(f64),

    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),

    #[error("direct sum of an empty list")]
    EmptySum,

    #[error("not a bi-invariant complex structure: {0}")]
    NotComplexStructure(String),

    #[error("representation has a trivial sub-representation (common kernel of dimension {0})")]
    TrivialSubrepresentation(usize),

    #[error("metric on the center is not ad-invariant (residual {0:.3e})")]
    NotAdInvariant(f64),

    #[error("matrices do not represent the given bracket (residual {0:.3e})")]
    NotRepresentation(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid algebra: {}", .0.join("; "))]
    InvalidAlgebra(Vec<String>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
