use thiserror::Error;

/// Failures of the exact linear algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("{0} is not a prime that fits in a machine word")]
    NotPrime(u64),
    #[error("entry {value} is not reducible modulo {p}")]
    NotReducible { value: String, p: u64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("subspace is not contained in the ambient space")]
    NotContained,
    #[error("duplicate matrix entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
}

/// Failures while reading or validating a poset.
#[derive(Debug, Error)]
pub enum PosetError {
    #[error("malformed poset document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("poset has no elements")]
    Empty,
    #[error("duplicate element label {0:?}")]
    Duplicate(String),
    #[error("cover mentions unknown element {0:?}")]
    UnknownElement(String),
    #[error("cover relation contains a cycle through {0:?}")]
    Cycle(String),
    #[error("interval [{lower}, {upper}] is not graded: maximal chains of lengths {short} and {long}")]
    NonGraded {
        lower: String,
        upper: String,
        short: usize,
        long: usize,
    },
}

/// Errors of the algebraic layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("base rings differ")]
    BaseMismatch,
    #[error("label collision: {0}")]
    LabelCollision(String),
    #[error("label {label} is not a basis vector of block ({s}, {t})")]
    MissingLabel { label: String, s: u32, t: u32 },
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("not strongly graded: failure in degree {degree}")]
    NotStronglyGraded { degree: usize },
    #[error("representatives missing for degree {degree}, weight {weight}")]
    MissingRepresentatives { degree: usize, weight: usize },
    #[error("Koszulity criteria disagree: {0}")]
    CriteriaDisagreement(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
