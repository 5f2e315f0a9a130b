use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ring model mismatch: {left} vs {right}")]
    ModelMismatch { left: String, right: String },

    #[error("coordinate arity mismatch: model expects {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("torsion order {0} is invalid (must be >= 2)")]
    InvalidTorsionOrder(i64),

    #[error("operation `{op}` is not supported on ring model {model}")]
    UnsupportedModel { op: &'static str, model: String },

    #[error("duplicate cell id `{0}`")]
    DuplicateId(String),

    #[error("unknown cell id `{0}`")]
    UnknownCell(String),

    #[error("non-graded cover `{lower}` < `{upper}`: dims {lower_dim} -> {upper_dim}")]
    NonGradedCover {
        lower: String,
        upper: String,
        lower_dim: usize,
        upper_dim: usize,
    },

    #[error("regularity failure at `{cell}`: signed closure sum is {sum}, expected 1")]
    RegularityFailure { cell: String, sum: i64 },

    #[error("non-Eulerian interval [`{lower}`, `{upper}`]: signed sum is {sum}, expected 0")]
    NonEulerianInterval {
        lower: String,
        upper: String,
        sum: i64,
    },

    #[error("cell set is not locally closed: `{witness}` lies between two members")]
    NotLocallyClosed { witness: String },

    #[error("subset is not relatively open in the support: `{witness}`")]
    NotRelativelyOpen { witness: String },

    #[error("cell set is not contained in the support: `{witness}`")]
    NotASubset { witness: String },

    #[error("objects live on different cell complexes")]
    ComplexMismatch,

    #[error("cellular map is not monotone at cover `{lower}` < `{upper}`")]
    NotMonotone { lower: String, upper: String },

    #[error("cellular map raises dimension at `{cell}`")]
    DimensionIncrease { cell: String },

    #[error("cellular map assignment is incomplete or has the wrong length")]
    BadAssignment,

    #[error("kernel factor mismatch: {0}")]
    FactorMismatch(&'static str),

    #[error("malformed incidence geometry: {0}")]
    MalformedGeometry(String),

    #[error("{0}")]
    Document(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
