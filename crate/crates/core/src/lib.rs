//! Fermat quotient matrices and the statistics built on them.
//!
//! The Fermat quotient `q_p(n) = ((n^(p-1) - 1) / p) mod p` is arranged into
//! the `p x (p-1)` matrix `A[a][b] = q_p(a p + b)`. This crate provides
//! O(p)-space access to that matrix, exact counts of order patterns spanned
//! by fixed displacement vectors, the mean distance of the first row to a
//! line mod 1, discrepancy estimates and exponential sums, plus the `fq`
//! command-line harness that reproduces reference tables.

pub mod arith;
pub mod cli;
pub mod discrepancy;
pub mod error;
pub mod expsum;
pub mod fixtures;
pub mod identities;
pub mod line;
pub mod output;
pub mod parallel;
pub mod pattern;
pub mod prime;
pub mod repro;
pub mod table;

pub use error::{FqError, Result};
pub use prime::{validate_prime, OddPrime};
pub use table::{fermat_quotient_oracle, inverse_mod, FermatQuotientTable, MatrixIndex};
