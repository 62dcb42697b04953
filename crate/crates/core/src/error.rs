use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mismatched operands: {0}")]
    Mismatch(String),
    #[error("ghost congruence fails at index {index}")]
    Congruence { index: usize },
    #[error("precision p^{have} is too small, need at least p^{need}")]
    Precision { have: u32, need: u32 },
    #[error("{what} would exceed the size guard ({size} > {limit})")]
    TooLarge { what: String, size: usize, limit: usize },
    #[error("relation violated: {0}")]
    Relation(String),
    #[error("pairing exponent e={e} is too small, retry with e >= {hint}")]
    ExponentTooSmall { e: u32, hint: u32 },
    #[error("not solvable: {0}")]
    Unsolvable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
