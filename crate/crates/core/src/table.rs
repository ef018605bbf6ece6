//! Fermat quotients and O(p)-space access to the Fermat quotient matrix.
//!
//! The matrix `A[a][b] = q_p(a*p + b)` (`0 <= a < p`, `1 <= b < p`) is never
//! stored. Every entry is recovered from the base row `q_p(b)` and the
//! inverse table through `A[a][b] = q_p(b) - a * b^{-1} (mod p)`.

use serde::Serialize;

use crate::arith::{inv_mod, mul_mod, pow_mod};
use crate::error::{FqError, Result};
use crate::prime::OddPrime;

/// `((n^(p-1) - 1) / p) mod p`, by exponentiation modulo `p^2`.
///
/// This is the reference evaluation every fast path is tested against.
pub fn fermat_quotient_oracle(n: u64, p: OddPrime) -> Result<u64> {
    let pv = p.get();
    let p2 = p.square();
    if n == 0 || n >= p2 {
        return Err(FqError::OutOfRange {
            what: "n",
            value: n as i64,
            lo: 1,
            hi: p2 as i64 - 1,
        });
    }
    if n.is_multiple_of(pv) {
        return Err(FqError::DivisibleByModulus { n, p: pv });
    }
    let r = pow_mod(n, pv - 1, p2);
    // r == 1 (mod p), so (r - 1) is an exact multiple of p below p^2
    Ok((r - 1) / pv)
}

pub fn inverse_mod(b: u64, p: OddPrime) -> Result<u64> {
    let pv = p.get();
    if b.is_multiple_of(pv) {
        return Err(FqError::DivisibleByModulus { n: b, p: pv });
    }
    Ok(inv_mod(b % pv, pv).expect("nonzero residue modulo a prime is invertible"))
}

/// Position `(a, b)` in the Fermat quotient matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MatrixIndex {
    pub a: u64,
    pub b: u64,
}

impl MatrixIndex {
    pub fn new(a: i64, b: i64, p: OddPrime) -> Result<Self> {
        let hi = p.get() as i64 - 1;
        if !(0..=hi).contains(&a) {
            return Err(FqError::OutOfRange {
                what: "a",
                value: a,
                lo: 0,
                hi,
            });
        }
        if !(1..=hi).contains(&b) {
            return Err(FqError::OutOfRange {
                what: "b",
                value: b,
                lo: 1,
                hi,
            });
        }
        Ok(MatrixIndex {
            a: a as u64,
            b: b as u64,
        })
    }
}

/// Base row and inverse table for one prime. Immutable once built.
#[derive(Debug, Clone)]
pub struct FermatQuotientTable {
    p: OddPrime,
    // index 0 is a placeholder so that slot b holds the value for b
    base_row: Vec<u32>,
    inverses: Vec<u32>,
}

impl FermatQuotientTable {
    /// Builds the base row with a linear smallest-prime-factor sieve.
    ///
    /// Only prime `b` pay for an exponentiation; a composite `b = u*v < p`
    /// takes `q_p(u) + q_p(v)`, the logarithm law with no reduction needed.
    pub fn build(p: OddPrime) -> Self {
        let n = p.get() as usize;
        let pv = p.get();
        let mut base_row = vec![0u32; n];
        let mut is_composite = vec![false; n];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..n {
            if !is_composite[i] {
                primes.push(i as u32);
                base_row[i] = fermat_quotient_oracle(i as u64, p).expect("1 < i < p is a unit below p^2") as u32;
            }
            let qi = base_row[i] as u64;
            for &pr in &primes {
                let m = i * pr as usize;
                if m >= n {
                    break;
                }
                is_composite[m] = true;
                base_row[m] = ((qi + base_row[pr as usize] as u64) % pv) as u32;
                if i % pr as usize == 0 {
                    break;
                }
            }
        }

        let mut inverses = vec![0u32; n];
        if n > 1 {
            inverses[1] = 1;
        }
        for i in 2..n {
            let k = pv / i as u64;
            let r = inverses[(pv % i as u64) as usize] as u64;
            inverses[i] = ((pv - mul_mod(k, r, pv)) % pv) as u32;
        }

        FermatQuotientTable { p, base_row, inverses }
    }

    #[inline]
    pub fn prime(&self) -> OddPrime {
        self.p
    }

    /// `q_p(b)` for `b = 1..p-1`; element `i` is `q_p(i + 1)`.
    pub fn base_row(&self) -> &[u32] {
        &self.base_row[1..]
    }

    /// `b^{-1} mod p` for `b = 1..p-1`; element `i` is the inverse of `i + 1`.
    pub fn inverses(&self) -> &[u32] {
        &self.inverses[1..]
    }

    #[inline]
    pub fn quotient(&self, b: u64) -> u64 {
        self.base_row[b as usize] as u64
    }

    #[inline]
    pub fn inverse(&self, b: u64) -> u64 {
        self.inverses[b as usize] as u64
    }

    pub fn entry(&self, idx: MatrixIndex) -> u64 {
        self.entry_raw(idx.a, idx.b)
    }

    /// Entry at `(a, b)` for `a` any nonnegative integer and `1 <= b < p`.
    /// Rows are periodic in `a` with period `p`.
    #[inline]
    pub(crate) fn entry_raw(&self, a: u64, b: u64) -> u64 {
        let pv = self.p.get();
        let shift = mul_mod(a % pv, self.inverses[b as usize] as u64, pv);
        let q = self.base_row[b as usize] as u64;
        if q >= shift {
            q - shift
        } else {
            q + pv - shift
        }
    }

    /// `q_p(n)` for any `1 <= n < p^2` coprime to `p`, read off the matrix.
    pub fn quotient_of(&self, n: u64) -> Result<u64> {
        let pv = self.p.get();
        if n == 0 || n >= self.p.square() {
            return Err(FqError::OutOfRange {
                what: "n",
                value: n as i64,
                lo: 1,
                hi: self.p.square() as i64 - 1,
            });
        }
        if n.is_multiple_of(pv) {
            return Err(FqError::DivisibleByModulus { n, p: pv });
        }
        Ok(self.entry_raw(n / pv, n % pv))
    }

    /// The unique row `a` with `A[a][b] = 0`, namely `b * q_p(b) mod p`.
    pub fn zero_row_of_column(&self, b: u64) -> Result<u64> {
        let pv = self.p.get();
        if b == 0 || b >= pv {
            return Err(FqError::OutOfRange {
                what: "b",
                value: b as i64,
                lo: 1,
                hi: pv as i64 - 1,
            });
        }
        Ok(mul_mod(b, self.quotient(b), pv))
    }

    /// Full row `a` as `A[a][1..p-1]`.
    pub fn row(&self, a: u64) -> Vec<u64> {
        (1..self.p.get()).map(|b| self.entry_raw(a, b)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: i64) -> OddPrime {
        OddPrime::new(n).unwrap()
    }

    const FQM11: [[u64; 10]; 11] = [
        [0, 5, 0, 10, 7, 5, 2, 4, 0, 1],
        [10, 10, 7, 7, 9, 3, 5, 8, 6, 2],
        [9, 4, 3, 4, 0, 1, 8, 1, 1, 3],
        [8, 9, 10, 1, 2, 10, 0, 5, 7, 4],
        [7, 3, 6, 9, 4, 8, 3, 9, 2, 5],
        [6, 8, 2, 6, 6, 6, 6, 2, 8, 6],
        [5, 2, 9, 3, 8, 4, 9, 6, 3, 7],
        [4, 7, 5, 0, 10, 2, 1, 10, 9, 8],
        [3, 1, 1, 8, 1, 0, 4, 3, 4, 9],
        [2, 6, 8, 5, 3, 9, 7, 7, 10, 10],
        [1, 0, 4, 2, 5, 7, 10, 0, 5, 0],
    ];

    #[test]
    fn oracle_examples() {
        assert_eq!(fermat_quotient_oracle(2, p(11)).unwrap(), 5);
        assert_eq!(fermat_quotient_oracle(1, p(11)).unwrap(), 0);
        assert_eq!(fermat_quotient_oracle(12, p(11)).unwrap(), 10);
        assert_eq!(fermat_quotient_oracle(2, p(1093)).unwrap(), 0);
        assert_eq!(fermat_quotient_oracle(2, p(3511)).unwrap(), 0);
    }

    #[test]
    fn oracle_rejects_bad_input() {
        assert_eq!(
            fermat_quotient_oracle(22, p(11)),
            Err(FqError::DivisibleByModulus { n: 22, p: 11 })
        );
        assert!(matches!(
            fermat_quotient_oracle(121, p(11)),
            Err(FqError::OutOfRange { .. })
        ));
        assert!(matches!(
            fermat_quotient_oracle(0, p(11)),
            Err(FqError::OutOfRange { .. })
        ));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse_mod(2, p(11)).unwrap(), 6);
        assert_eq!(inverse_mod(9, p(11)).unwrap(), 5);
        assert_eq!(inverse_mod(1, p(601)).unwrap(), 1);
        assert!(inverse_mod(11, p(11)).is_err());
    }

    #[test]
    fn base_rows() {
        let t = FermatQuotientTable::build(p(11));
        assert_eq!(t.base_row(), &[0, 5, 0, 10, 7, 5, 2, 4, 0, 1]);
        assert_eq!(t.inverses(), &[1, 6, 4, 3, 9, 2, 8, 7, 5, 10]);
        let t3 = FermatQuotientTable::build(p(3));
        assert_eq!(t3.base_row(), &[0, 1]);
    }

    #[test]
    fn full_fqm11() {
        let t = FermatQuotientTable::build(p(11));
        for (a, row) in FQM11.iter().enumerate() {
            assert_eq!(t.row(a as u64), row.to_vec(), "row {a}");
        }
        let at = |a, b| t.entry(MatrixIndex::new(a, b, p(11)).unwrap());
        assert_eq!(at(5, 5), 6);
        assert_eq!(at(10, 10), 0);
        assert_eq!(at(0, 7), t.quotient(7));
    }

    #[test]
    fn zero_rows() {
        let t = FermatQuotientTable::build(p(11));
        assert_eq!(t.zero_row_of_column(2).unwrap(), 10);
        assert_eq!(t.zero_row_of_column(1).unwrap(), 0);
        assert_eq!(t.zero_row_of_column(4).unwrap(), 7);
        assert!(t.zero_row_of_column(11).is_err());
    }

    #[test]
    fn matrix_index_bounds() {
        assert!(MatrixIndex::new(11, 1, p(11)).is_err());
        assert!(MatrixIndex::new(0, 0, p(11)).is_err());
        assert!(MatrixIndex::new(-1, 3, p(11)).is_err());
        assert!(MatrixIndex::new(10, 10, p(11)).is_ok());
    }

    #[test]
    fn quotient_of_reads_matrix() {
        let t = FermatQuotientTable::build(p(101));
        for n in (1..101u64 * 101).filter(|n| n % 101 != 0).step_by(7) {
            assert_eq!(t.quotient_of(n).unwrap(), fermat_quotient_oracle(n, p(101)).unwrap());
        }
    }
}
