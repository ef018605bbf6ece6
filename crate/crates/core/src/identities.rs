//! Algebraic relations between Fermat quotient matrix entries.
//!
//! Each function evaluates one identity at a single instance and reports
//! whether it holds. Indices are reduced modulo `p` where the identity says so.

use crate::arith::mul_mod;
use crate::table::FermatQuotientTable;

fn sub_mod(x: u64, y: u64, p: u64) -> u64 {
    (x + p - y % p) % p
}

/// `A[a][b] == A[p-1-a][p-b]`.
pub fn reflection_holds(t: &FermatQuotientTable, a: u64, b: u64) -> bool {
    let p = t.prime().get();
    t.entry_raw(a, b) == t.entry_raw(p - 1 - a, p - b)
}

/// `A[a][b] == q_p(b) - a*b^{-1}`, with the left side evaluated by the oracle
/// on `a*p + b`.
pub fn row_formula_holds(t: &FermatQuotientTable, a: u64, b: u64) -> bool {
    let p = t.prime();
    let direct = crate::table::fermat_quotient_oracle(a * p.get() + b, p).expect("a*p + b is a unit below p^2");
    let formula = sub_mod(t.quotient(b), mul_mod(a, t.inverse(b), p.get()), p.get());
    direct == formula
}

/// `A[a+s][b] == A[a][b] - s*b^{-1}`, row index taken mod `p`.
pub fn row_shift_holds(t: &FermatQuotientTable, a: u64, s: u64, b: u64) -> bool {
    let p = t.prime().get();
    let lhs = t.entry_raw((a + s) % p, b);
    let rhs = sub_mod(t.entry_raw(a, b), mul_mod(s % p, t.inverse(b), p), p);
    lhs == rhs
}

/// `q_p(b1*b2) == q_p(b1) + q_p(b2)` for integers with `b1*b2 < p^2` coprime
/// to `p`, all three evaluated by the oracle.
pub fn logarithm_law_holds(t: &FermatQuotientTable, b1: u64, b2: u64) -> bool {
    let p = t.prime();
    let q = |n| crate::table::fermat_quotient_oracle(n, p).expect("unit below p^2");
    q(b1 * b2) == (q(b1) + q(b2)) % p.get()
}

/// `q_p(b+kp) == q_p(b) - k*b^{-1}`.
pub fn translation_holds(t: &FermatQuotientTable, b: u64, k: u64) -> bool {
    let p = t.prime();
    let lhs = crate::table::fermat_quotient_oracle(b + k * p.get(), p).expect("unit below p^2");
    lhs == sub_mod(t.quotient(b), mul_mod(k, t.inverse(b), p.get()), p.get())
}

/// Additive multiplicativity of a row, with `b1*b2` the integer product
/// (`1 <= b1, b2 < p`, so `b1*b2 < p^2`):
///
/// `q_p(b1 b2) - a (b1 b2)^{-1} == A[a][b1] + A[a][b2] + a (b1 + b2 - 1) b1^{-1} b2^{-1}`.
pub fn product_law_holds(t: &FermatQuotientTable, a: u64, b1: u64, b2: u64) -> bool {
    let p = t.prime().get();
    let n = b1 * b2;
    let inv_n = mul_mod(t.inverse(b1), t.inverse(b2), p);
    let lhs = sub_mod(
        t.quotient_of(n).expect("product of units is a unit below p^2"),
        mul_mod(a, inv_n, p),
        p,
    );
    let cross = mul_mod(mul_mod(a % p, (b1 + b2 - 1) % p, p), inv_n, p);
    let rhs = (t.entry_raw(a, b1) + t.entry_raw(a, b2) + cross) % p;
    lhs == rhs
}

/// The same relation with the column reduced mod `p`. Writing
/// `b1*b2 = k*p + r`, the reduced entry picks up `+ k * r^{-1}`:
///
/// `A[a][r] == A[a][b1] + A[a][b2] + a (b1 + b2 - 1) b1^{-1} b2^{-1} + k r^{-1}`.
pub fn reduced_product_law_holds(t: &FermatQuotientTable, a: u64, b1: u64, b2: u64) -> bool {
    let p = t.prime().get();
    let n = b1 * b2;
    let (k, r) = (n / p, n % p);
    let inv_r = t.inverse(r);
    let cross = mul_mod(mul_mod(a % p, (b1 + b2 - 1) % p, p), inv_r, p);
    let rhs = (t.entry_raw(a, b1) + t.entry_raw(a, b2) + cross + mul_mod(k, inv_r, p)) % p;
    t.entry_raw(a, r) == rhs
}

/// The multiplicative statement in its literal form, with the
/// factor `e_p(A[a][b1])` appearing twice and the column reduced mod `p`.
/// Exposed for comparison only; it does not hold in general.
pub fn literal_product_law_holds(t: &FermatQuotientTable, a: u64, b1: u64, b2: u64) -> bool {
    let p = t.prime().get();
    let r = (b1 * b2) % p;
    let inv = mul_mod(t.inverse(b1), t.inverse(b2), p);
    let cross = mul_mod(mul_mod(a % p, (b1 + b2 - 1) % p, p), inv, p);
    let rhs = (2 * t.entry_raw(a, b1) + cross) % p;
    t.entry_raw(a, r) == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prime::OddPrime;

    #[test]
    fn all_identities_p11() {
        let t = FermatQuotientTable::build(OddPrime::new(11).unwrap());
        for a in 0..11 {
            for b in 1..11 {
                assert!(reflection_holds(&t, a, b));
                assert!(row_formula_holds(&t, a, b));
                for s in 0..11 {
                    assert!(row_shift_holds(&t, a, s, b));
                }
                for b2 in 1..11 {
                    assert!(product_law_holds(&t, a, b, b2));
                    assert!(reduced_product_law_holds(&t, a, b, b2));
                }
            }
        }
    }

    #[test]
    fn literal_form_fails_somewhere() {
        let t = FermatQuotientTable::build(OddPrime::new(11).unwrap());
        let failures = (0..11)
            .flat_map(|a| (1..11).flat_map(move |b1| (1..11).map(move |b2| (a, b1, b2))))
            .filter(|&(a, b1, b2)| !literal_product_law_holds(&t, a, b1, b2))
            .count();
        assert!(failures > 0);
    }
}
