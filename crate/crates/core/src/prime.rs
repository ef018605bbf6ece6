use std::fmt;

use serde::{Serialize, Serializer};

use crate::arith::is_prime;
use crate::error::{FqError, Result};

/// Exclusive upper bound on the modulus; keeps `p^2` and all products of two
/// residues mod `p^2` inside 128-bit intermediates.
pub const MAX_PRIME_EXCLUSIVE: i64 = 1 << 31;

/// A validated odd prime `3 <= p < 2^31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OddPrime(u64);

impl OddPrime {
    pub fn new(n: i64) -> Result<Self> {
        validate_prime(n)
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn square(self) -> u64 {
        self.0 * self.0
    }
}

impl fmt::Display for OddPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for OddPrime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.0)
    }
}

pub fn validate_prime(n: i64) -> Result<OddPrime> {
    if n < 0 {
        return Err(FqError::Negative(n));
    }
    if n >= MAX_PRIME_EXCLUSIVE {
        return Err(FqError::TooLarge(n));
    }
    if n == 2 {
        return Err(FqError::EvenPrime);
    }
    if n < 2 {
        return Err(FqError::NotPrime(n));
    }
    if !is_prime(n as u64) {
        return Err(FqError::Composite(n));
    }
    Ok(OddPrime(n as u64))
}
