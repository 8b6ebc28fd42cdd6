use std::time::Duration;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why an enumeration or a ladder stopped early.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LimitExceeded {
    #[error("coset limit of {max_cosets} exceeded")]
    Cosets { max_cosets: usize },
    #[error("time limit of {limit:?} exceeded")]
    Time { limit: Duration },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("duplicate generator name {0:?}")]
    DuplicateGenerator(String),
    #[error("invalid generator name {0:?}")]
    InvalidName(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("relator {index} reduces to the empty word")]
    EmptyRelator { index: usize },
    #[error("letter refers to generator {generator} but the alphabet has {ngens}")]
    AlphabetMismatch { generator: usize, ngens: usize },
    #[error("presentation has no generators")]
    EmptyAlphabet,
    #[error(transparent)]
    Limit(#[from] LimitExceeded),
    #[error("relator {index} has non-zero image {image:?} under the homomorphism")]
    InconsistentHomomorphism { index: usize, image: Vec<u32> },
    #[error("word is not in the subgroup (it maps coset 0 to coset {coset})")]
    NotInSubgroup { coset: usize },
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("reports use different primes ({0} and {1})")]
    PrimeMismatch(u32, u32),
    #[error("coset table failed validation: {0}")]
    InvalidTable(String),
    #[error("schedule error: {0}")]
    Schedule(String),
    #[error("step refused: {0}")]
    StepRefused(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}
