use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("denominator is not contained in the numerator")]
    NotContained,
    #[error("coordinate list has length {found}, the page has {expected} generators")]
    Arity { expected: usize, found: usize },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(i32, i32),
    #[error("the object {0} is locally-effective")]
    LocallyEffective(String),
    #[error("{0} needs effective homology")]
    NeedsEffectiveHomology(String),
    #[error("generator {0} does not belong to {1}")]
    ForeignGenerator(String, String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("filtration of {origin} is unbounded in degree {degree}")]
    Unbounded { origin: String, degree: i32 },
    #[error("perturbation is not locally nilpotent (iteration cap {0} exceeded)")]
    NotNilpotent(usize),
    #[error("middle complexes differ: {0} vs {1}")]
    MiddleMismatch(String, String),
    #[error("unknown scenario {0}")]
    UnknownScenario(String),
    #[error("malformed complex file: {0}")]
    Malformed(String),
    #[error("internal invariant failure: {0}")]
    Internal(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
