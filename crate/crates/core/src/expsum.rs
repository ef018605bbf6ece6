//! Exponential sums of Fermat quotients.
//!
//! Every sum here has the form `sum e(k/p)` with an integer phase `k`. The
//! phases are first tallied into an exact histogram over `0..p`, then the
//! histogram is paired with a fixed table of roots of unity. The complex
//! value therefore depends only on the histogram, not on how the sweep was
//! split across threads.

use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::arith::mul_mod;
use crate::discrepancy::RootsOfUnity;
use crate::error::{FqError, Result};
use crate::parallel::map_blocks;
use crate::pattern::{admissible_region, DisplacementPattern};
use crate::table::FermatQuotientTable;

/// An integer frequency vector with its sup-norm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrequencyVector {
    pub h: Vec<i64>,
    pub sup_norm: u64,
}

impl FrequencyVector {
    pub fn new(h: Vec<i64>) -> Self {
        let sup_norm = h.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
        FrequencyVector { h, sup_norm }
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Self::new)
            .map_err(|_| FqError::InvalidArgument(format!("cannot parse frequency {text:?}")))
    }

    pub fn is_zero(&self) -> bool {
        self.sup_norm == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpSumResult {
    pub re: f64,
    pub im: f64,
    pub norm: f64,
    /// The applicable cap: the structural bound when its hypotheses hold,
    /// otherwise the trivial bound `terms`.
    pub bound: f64,
    pub terms: u64,
    pub bound_applies: bool,
}

impl ExpSumResult {
    fn from_histogram(roots: &RootsOfUnity, hist: &[u64], terms: u64, bound: Option<f64>) -> Self {
        let value = roots.weighted_sum(hist);
        ExpSumResult {
            re: value.re,
            im: value.im,
            norm: value.norm(),
            bound: bound.unwrap_or(terms as f64),
            terms,
            bound_applies: bound.is_some(),
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn ratio(&self) -> f64 {
        self.norm / self.bound
    }
}

fn merge(parts: Vec<Vec<u64>>, p: usize) -> Vec<u64> {
    let mut hist = vec![0u64; p];
    for part in parts {
        for (x, y) in hist.iter_mut().zip(part) {
            *x += y;
        }
    }
    hist
}

fn block_for(len: u64) -> u64 {
    (len / 32).max(16)
}

/// `sum_{X < n <= X+Y, p !| n} e(m q_p(n) / p)`, with the short-interval cap
/// `Y^(1/2) p^(3/8)` (unit constant) as the bound.
pub fn heath_brown_sum(t: &FermatQuotientTable, m: i64, x: u64, y: u64) -> Result<ExpSumResult> {
    let p = t.prime().get();
    let m = m.rem_euclid(p as i64) as u64;
    if m == 0 {
        return Err(FqError::DivisibleByModulus { n: 0, p });
    }
    if y == 0 {
        return Err(FqError::InvalidArgument("Y must be at least 1".into()));
    }
    let top = x.checked_add(y).ok_or(FqError::Overflow("X + Y"))?;
    if top > t.prime().square() - 1 {
        return Err(FqError::OutOfRange {
            what: "X + Y",
            value: top as i64,
            lo: 1,
            hi: t.prime().square() as i64 - 1,
        });
    }
    let parts = map_blocks(x + 1..top + 1, block_for(y), |r| {
        let mut hist = vec![0u64; p as usize];
        for n in r.filter(|n| n % p != 0) {
            let q = t.entry_raw(n / p, n % p);
            hist[mul_mod(m, q, p) as usize] += 1;
        }
        hist
    });
    let hist = merge(parts, p as usize);
    let terms = hist.iter().sum();
    let bound = (y as f64).sqrt() * (p as f64).powf(0.375);
    Ok(ExpSumResult::from_histogram(
        &RootsOfUnity::new(p),
        &hist,
        terms,
        Some(bound),
    ))
}

fn check_frequency(pattern: &DisplacementPattern, h: &FrequencyVector) -> Result<()> {
    if h.h.len() != pattern.dim() {
        return Err(FqError::InvalidArgument(format!(
            "frequency has {} components, pattern has {} vectors",
            h.h.len(),
            pattern.dim()
        )));
    }
    Ok(())
}

/// Some `J` with `h_J != 0` whose `t_J` differs from every other `t_j`.
pub fn has_isolated_frequency(pattern: &DisplacementPattern, h: &FrequencyVector) -> bool {
    let v = pattern.vectors();
    (0..v.len()).any(|j| h.h[j] != 0 && v.iter().enumerate().all(|(i, w)| i == j || w.1 != v[j].1))
}

struct Reduced {
    shifts: Vec<(u64, u64)>,
    freqs: Vec<u64>,
}

fn reduce(pattern: &DisplacementPattern, h: &FrequencyVector, p: u64) -> Reduced {
    let pi = p as i64;
    Reduced {
        shifts: pattern
            .vectors()
            .iter()
            .map(|&(s, t)| (s.rem_euclid(pi) as u64, t.rem_euclid(pi) as u64))
            .collect(),
        freqs: h.h.iter().map(|x| x.rem_euclid(pi) as u64).collect(),
    }
}

/// Histogram of `<h, A[(a,b)+v_j]> mod p` over the full grid
/// `0 <= a < p`, `1 <= b < p`, indices reduced mod `p`. Origins for which
/// some `b + t_j = 0 (mod p)` have no defined entry and are skipped.
pub fn complete_phase_histogram(
    t: &FermatQuotientTable,
    pattern: &DisplacementPattern,
    h: &FrequencyVector,
) -> Result<Vec<u64>> {
    check_frequency(pattern, h)?;
    let p = t.prime().get();
    let red = reduce(pattern, h, p);
    let parts = map_blocks(0..p, block_for(p), |rows| {
        let mut hist = vec![0u64; p as usize];
        for a in rows {
            'col: for b in 1..p {
                let mut phase = 0u64;
                for (&(s, tt), &hj) in red.shifts.iter().zip(&red.freqs) {
                    let col = (b + tt) % p;
                    if col == 0 {
                        continue 'col;
                    }
                    phase += mul_mod(hj, t.entry_raw((a + s) % p, col), p);
                }
                hist[(phase % p) as usize] += 1;
            }
        }
        hist
    });
    Ok(merge(parts, p as usize))
}

/// The same histogram obtained by summing over `a` first. With
/// `b_j = b + t_j` the phase is `sum h_j (q(b_j) - s_j/b_j) - a R(b)` where
/// `R(b) = sum h_j / b_j`; the sum over `a` is `p` when `R(b) = 0` and zero
/// otherwise, so only those columns contribute, each with weight `p`.
pub fn collapsed_phase_histogram(
    t: &FermatQuotientTable,
    pattern: &DisplacementPattern,
    h: &FrequencyVector,
) -> Result<Vec<u64>> {
    check_frequency(pattern, h)?;
    let p = t.prime().get();
    let red = reduce(pattern, h, p);
    let mut hist = vec![0u64; p as usize];
    'col: for b in 1..p {
        let (mut slope, mut phase) = (0u64, 0u64);
        for (&(s, tt), &hj) in red.shifts.iter().zip(&red.freqs) {
            let col = (b + tt) % p;
            if col == 0 {
                continue 'col;
            }
            let inv = t.inverse(col);
            slope = (slope + mul_mod(hj, inv, p)) % p;
            let entry = (t.quotient(col) + p - mul_mod(s, inv, p)) % p;
            phase = (phase + mul_mod(hj, entry, p)) % p;
        }
        if slope == 0 {
            hist[phase as usize] += p;
        }
    }
    Ok(hist)
}

/// Two phase histograms give the same exponential sum exactly when their
/// difference is constant across all `p` phases (a constant histogram sums
/// to zero). Checked in integers.
pub fn same_exponential_sum(x: &[u64], y: &[u64]) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let diff = |k: usize| x[k] as i128 - y[k] as i128;
    (0..x.len()).all(|k| diff(k) == diff(0))
}

/// Number of origins of the complete sum that have every entry defined.
fn complete_terms(pattern: &DisplacementPattern, p: u64) -> u64 {
    let pi = p as i64;
    let valid_cols = (1..p)
        .filter(|&b| {
            pattern
                .vectors()
                .iter()
                .all(|&(_, t)| (b as i64 + t).rem_euclid(pi) != 0)
        })
        .count() as u64;
    valid_cols * p
}

/// The complete sum `S_0`. When some `h_J != 0` sits on an isolated `t_J`
/// the bound is `N p`.
pub fn complete_exp_sum(
    t: &FermatQuotientTable,
    pattern: &DisplacementPattern,
    h: &FrequencyVector,
) -> Result<ExpSumResult> {
    let hist = complete_phase_histogram(t, pattern, h)?;
    let p = t.prime().get();
    let bound = has_isolated_frequency(pattern, h).then(|| (pattern.dim() as u64 * p) as f64);
    let terms = hist.iter().sum();
    Ok(ExpSumResult::from_histogram(&RootsOfUnity::new(p), &hist, terms, bound))
}

/// `S_0` evaluated through the collapsed histogram.
pub fn complete_exp_sum_collapsed(
    t: &FermatQuotientTable,
    pattern: &DisplacementPattern,
    h: &FrequencyVector,
) -> Result<ExpSumResult> {
    let hist = collapsed_phase_histogram(t, pattern, h)?;
    let p = t.prime().get();
    let bound = has_isolated_frequency(pattern, h).then(|| (pattern.dim() as u64 * p) as f64);
    Ok(ExpSumResult::from_histogram(
        &RootsOfUnity::new(p),
        &hist,
        complete_terms(pattern, p),
        bound,
    ))
}

/// Histogram of the phases over the admissible region only.
pub fn pattern_phase_histogram(
    t: &FermatQuotientTable,
    pattern: &DisplacementPattern,
    h: &FrequencyVector,
) -> Result<Vec<u64>> {
    check_frequency(pattern, h)?;
    let p = t.prime().get();
    let region = admissible_region(t.prime(), pattern);
    let freqs = reduce(pattern, h, p).freqs;
    let v = pattern.vectors();
    let rows = if region.is_empty() {
        0..0
    } else {
        region.a_lo as u64..region.a_hi as u64 + 1
    };
    let parts = map_blocks(rows, block_for(p), |rows| {
        let mut hist = vec![0u64; p as usize];
        for a in rows {
            for b in region.b_lo as u64..=region.b_hi as u64 {
                let mut phase = 0u64;
                for (&(s, tt), &hj) in v.iter().zip(&freqs) {
                    let e = t.entry_raw((a as i64 + s) as u64, (b as i64 + tt) as u64);
                    phase += mul_mod(hj, e, p);
                }
                hist[(phase % p) as usize] += 1;
            }
        }
        hist
    });
    Ok(merge(parts, p as usize))
}

/// The restricted sum `S` over the admissible region. Its bound is the
/// complete-sum bound plus the `4 M p` boundary allowance.
pub fn pattern_exp_sum(
    t: &FermatQuotientTable,
    pattern: &DisplacementPattern,
    h: &FrequencyVector,
) -> Result<ExpSumResult> {
    let hist = pattern_phase_histogram(t, pattern, h)?;
    let p = t.prime().get();
    let bound =
        has_isolated_frequency(pattern, h).then(|| ((pattern.dim() as u64 + 4 * pattern.max_norm() as u64) * p) as f64);
    let terms = hist.iter().sum();
    Ok(ExpSumResult::from_histogram(&RootsOfUnity::new(p), &hist, terms, bound))
}

/// `|S - S_0|` can be at most the number of summands on which the two
/// sums differ, `4 M p`.
pub fn boundary_allowance(pattern: &DisplacementPattern, p: u64) -> f64 {
    (4 * pattern.max_norm() as u64 * p) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prime::OddPrime;

    fn table(p: i64) -> FermatQuotientTable {
        FermatQuotientTable::build(OddPrime::new(p).unwrap())
    }

    fn pat(v: &[(i64, i64)]) -> DisplacementPattern {
        DisplacementPattern::new(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_frequency_counts_terms() {
        let t = table(11);
        let r = complete_exp_sum(&t, &pat(&[(0, 0)]), &FrequencyVector::new(vec![0])).unwrap();
        assert_eq!(r.terms, 110);
        assert!((r.re - 110.0).abs() < 1e-9 && r.im.abs() < 1e-9);
        let s = pattern_exp_sum(&t, &pat(&[(1, 2), (0, -1)]), &FrequencyVector::new(vec![0, 0])).unwrap();
        let region = admissible_region(t.prime(), &pat(&[(1, 2), (0, -1)]));
        assert_eq!(s.terms, region.cardinality);
        assert!((s.re - region.cardinality as f64).abs() < 1e-9);
    }

    #[test]
    fn single_vector_sum_vanishes() {
        let t = table(11);
        let r = complete_exp_sum(&t, &pat(&[(0, 0)]), &FrequencyVector::new(vec![1])).unwrap();
        assert!(r.norm < 1e-9, "{}", r.norm);
        let hist = collapsed_phase_histogram(&t, &pat(&[(0, 0)]), &FrequencyVector::new(vec![1])).unwrap();
        assert!(hist.iter().all(|&c| c == 0));
    }

    #[test]
    fn restricted_equals_complete_for_trivial_pattern() {
        let t = table(101);
        let v = pat(&[(0, 0)]);
        let h = FrequencyVector::new(vec![3]);
        assert_eq!(
            complete_phase_histogram(&t, &v, &h).unwrap(),
            pattern_phase_histogram(&t, &v, &h).unwrap()
        );
    }

    #[test]
    fn collapsed_matches_direct() {
        let t = table(31);
        let v = pat(&[(2, 0), (-3, 5), (7, -4)]);
        for h in [vec![1, 0, 0], vec![1, 2, 3], vec![0, -5, 4], vec![2, 2, 0]] {
            let h = FrequencyVector::new(h);
            let direct = complete_phase_histogram(&t, &v, &h).unwrap();
            let collapsed = collapsed_phase_histogram(&t, &v, &h).unwrap();
            assert!(same_exponential_sum(&direct, &collapsed), "h = {:?}", h.h);
            let x = complete_exp_sum(&t, &v, &h).unwrap();
            let y = complete_exp_sum_collapsed(&t, &v, &h).unwrap();
            assert!((x.value() - y.value()).norm() < 1e-9);
            assert_eq!(x.terms, y.terms);
        }
        let mut skewed = complete_phase_histogram(&t, &v, &FrequencyVector::new(vec![1, 2, 3])).unwrap();
        skewed[0] += 1;
        let collapsed = collapsed_phase_histogram(&t, &v, &FrequencyVector::new(vec![1, 2, 3])).unwrap();
        assert!(!same_exponential_sum(&skewed, &collapsed));
    }

    #[test]
    fn heath_brown() {
        let t = table(101);
        let r = heath_brown_sum(&t, 1, 0, 100).unwrap();
        assert_eq!(r.terms, 100);
        assert!(r.norm <= r.terms as f64);
        assert!(matches!(
            heath_brown_sum(&t, 101, 0, 100),
            Err(FqError::DivisibleByModulus { .. })
        ));
        assert!(heath_brown_sum(&t, 1, 10_000, 200).is_ok());
        assert!(heath_brown_sum(&t, 1, 10_001, 200).is_err());
        // a full row block skips the multiples of p
        let r = heath_brown_sum(&t, 3, 0, 101 * 101 - 1).unwrap();
        assert_eq!(r.terms, 101 * 100);
    }

    #[test]
    fn isolated_frequency() {
        let v = pat(&[(0, 6), (1, 6), (2, 7)]);
        assert!(!has_isolated_frequency(&v, &FrequencyVector::new(vec![1, 1, 0])));
        assert!(has_isolated_frequency(&v, &FrequencyVector::new(vec![1, 1, 1])));
    }

    #[test]
    fn frequency_length_checked() {
        let t = table(11);
        assert!(complete_exp_sum(&t, &pat(&[(0, 0)]), &FrequencyVector::new(vec![1, 2])).is_err());
    }
}
