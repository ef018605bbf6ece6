use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FqError {
    #[error("{0} is negative")]
    Negative(i64),
    #[error("{0} is not prime")]
    NotPrime(i64),
    #[error("{0} is composite")]
    Composite(i64),
    #[error("2 is the even prime; an odd prime is required")]
    EvenPrime,
    #[error("{0} is too large (modulus must be below 2^31)")]
    TooLarge(i64),
    #[error("{n} is divisible by the modulus {p}")]
    DivisibleByModulus { n: u64, p: u64 },
    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: i64,
        lo: i64,
        hi: i64,
    },
    #[error("a displacement pattern needs at least one vector")]
    EmptyPattern,
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("dimension {n} exceeds the limit {max}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("origin ({a}, {b}) is outside the admissible region")]
    OriginOutsideRegion { a: i64, b: i64 },
    #[error("the line slope must be nonzero")]
    ZeroSlope,
    #[error("grid of {cells} cells exceeds the cap {cap}")]
    TooManyCells { cells: u128, cap: u128 },
    #[error("integer overflow computing {0}")]
    Overflow(&'static str),
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, FqError>;
