//! Displacement patterns, spanned points and exact order-pattern counts.
//!
//! A pattern of `N` vectors `(s_j, t_j)` is slid over every origin `(a, b)`
//! that keeps all translates inside the matrix. Each origin yields the tuple
//! `(A[a+s_1][b+t_1], ..., A[a+s_N][b+t_N])`, and the counts record which
//! strict ordering that tuple follows. Comparisons are made on the integer
//! residues, so counts are exact.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{FqError, Result};
use crate::parallel::map_blocks;
use crate::prime::OddPrime;
use crate::table::{FermatQuotientTable, MatrixIndex};

/// Largest `N` accepted by single-permutation counts.
pub const MAX_DIM_SINGLE: usize = 16;
/// Largest `N` accepted by the all-permutations sweep.
pub const MAX_DIM_SWEEP: usize = 8;

const ROW_BLOCK: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisplacementPattern {
    vectors: Vec<(i64, i64)>,
    max_norm: i64,
    distinct_t: bool,
}

impl DisplacementPattern {
    pub fn new(vectors: Vec<(i64, i64)>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(FqError::EmptyPattern);
        }
        let max_norm = vectors.iter().map(|&(s, t)| s.abs().max(t.abs())).max().unwrap_or(0);
        let mut ts: Vec<i64> = vectors.iter().map(|v| v.1).collect();
        ts.sort_unstable();
        ts.dedup();
        let distinct_t = ts.len() == vectors.len();
        Ok(DisplacementPattern {
            vectors,
            max_norm,
            distinct_t,
        })
    }

    pub fn vectors(&self) -> &[(i64, i64)] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// `M = max_j max(|s_j|, |t_j|)`.
    pub fn max_norm(&self) -> i64 {
        self.max_norm
    }

    pub fn distinct_t(&self) -> bool {
        self.distinct_t
    }

    /// Set when some second components coincide; counts are still exact but
    /// the points need not be equidistributed.
    pub fn has_warning(&self) -> bool {
        !self.distinct_t
    }

    /// `(-s_j, -t_j)` for every vector.
    pub fn reflected(&self) -> Self {
        DisplacementPattern::new(self.vectors.iter().map(|&(s, t)| (-s, -t)).collect())
            .expect("reflection keeps the pattern nonempty")
    }

    /// Parses `"s1,t1;s2,t2;..."`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || FqError::InvalidArgument(format!("cannot parse vectors {text:?}"));
        let vectors = text
            .split(';')
            .filter(|chunk| !chunk.trim().is_empty())
            .map(|chunk| {
                let mut it = chunk.split(',').map(|x| x.trim().parse::<i64>());
                match (it.next(), it.next(), it.next()) {
                    (Some(Ok(s)), Some(Ok(t)), None) => Ok((s, t)),
                    _ => Err(bad()),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(vectors)
    }
}

impl fmt::Display for DisplacementPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vectors.iter().map(|(s, t)| format!("{s},{t}")).collect();
        f.write_str(&parts.join(";"))
    }
}

/// A permutation of `{1..N}`, stored zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// From one-based images `sigma(1), ..., sigma(N)`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(FqError::InvalidPermutation("empty".into()));
        }
        let mut seen = vec![false; n];
        for &k in images {
            if k == 0 || k > n || seen[k - 1] {
                return Err(FqError::InvalidPermutation(format!("{images:?}")));
            }
            seen[k - 1] = true;
        }
        Ok(Permutation(images.iter().map(|k| k - 1).collect()))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let images = text
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| FqError::InvalidPermutation(text.to_string()))?;
        Self::from_one_based(&images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Zero-based images.
    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|k| k + 1).collect()
    }

    /// `k -> N + 1 - sigma(k)` in one-based terms.
    pub fn complemented(&self) -> Self {
        let n = self.0.len();
        Permutation(self.0.iter().map(|&k| n - 1 - k).collect())
    }

    /// Lexicographic rank among all permutations of the same length.
    pub fn rank(&self) -> usize {
        lehmer_rank(&self.0)
    }

    /// All permutations of `{1..n}` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut cur: Vec<usize> = (0..n).collect();
        let mut out = vec![Permutation(cur.clone())];
        while next_permutation(&mut cur) {
            out.push(Permutation(cur.clone()));
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| (k + 1).to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn lehmer_rank(perm: &[usize]) -> usize {
    let n = perm.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller = perm[i + 1..].iter().filter(|&&x| x < perm[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Origins whose translates by every vector stay inside the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AdmissibleRegion {
    pub a_lo: i64,
    pub a_hi: i64,
    pub b_lo: i64,
    pub b_hi: i64,
    pub cardinality: u64,
}

impl AdmissibleRegion {
    pub fn contains(&self, a: i64, b: i64) -> bool {
        self.cardinality > 0 && (self.a_lo..=self.a_hi).contains(&a) && (self.b_lo..=self.b_hi).contains(&b)
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality == 0
    }

    fn rows(&self) -> std::ops::Range<u64> {
        if self.is_empty() {
            0..0
        } else {
            self.a_lo as u64..self.a_hi as u64 + 1
        }
    }
}

pub fn admissible_region(p: OddPrime, pattern: &DisplacementPattern) -> AdmissibleRegion {
    let pm1 = p.get() as i64 - 1;
    let v = pattern.vectors();
    let s_min = v.iter().map(|x| x.0).min().unwrap();
    let s_max = v.iter().map(|x| x.0).max().unwrap();
    let t_min = v.iter().map(|x| x.1).min().unwrap();
    let t_max = v.iter().map(|x| x.1).max().unwrap();
    let a_lo = 0.max(-s_min);
    let a_hi = pm1.min(pm1 - s_max);
    let b_lo = 1.max(1 - t_min);
    let b_hi = pm1.min(pm1 - t_max);
    let rows = (a_hi - a_lo + 1).max(0) as u64;
    let cols = (b_hi - b_lo + 1).max(0) as u64;
    AdmissibleRegion {
        a_lo,
        a_hi,
        b_lo,
        b_hi,
        cardinality: rows * cols,
    }
}

/// A spanned tuple attached to its origin. Coordinates are kept as residues
/// `k` in `0..p`; the point in the unit cube is `k / p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpannedPoint {
    pub origin: MatrixIndex,
    pub p: OddPrime,
    pub residues: Vec<u64>,
}

impl SpannedPoint {
    pub fn coords(&self) -> Vec<f64> {
        let pf = self.p.get() as f64;
        self.residues.iter().map(|&k| k as f64 / pf).collect()
    }
}

#[inline]
fn fill_residues(t: &FermatQuotientTable, v: &[(i64, i64)], a: u64, b: u64, out: &mut [u64]) {
    for (slot, &(s, tt)) in out.iter_mut().zip(v) {
        *slot = t.entry_raw((a as i64 + s) as u64, (b as i64 + tt) as u64);
    }
}

pub fn span_point(t: &FermatQuotientTable, origin: MatrixIndex, pattern: &DisplacementPattern) -> Result<SpannedPoint> {
    let region = admissible_region(t.prime(), pattern);
    if !region.contains(origin.a as i64, origin.b as i64) {
        return Err(FqError::OriginOutsideRegion {
            a: origin.a as i64,
            b: origin.b as i64,
        });
    }
    let mut residues = vec![0; pattern.dim()];
    fill_residues(t, pattern.vectors(), origin.a, origin.b, &mut residues);
    Ok(SpannedPoint {
        origin,
        p: t.prime(),
        residues,
    })
}

/// `x[sigma(1)] < x[sigma(2)] < ... < x[sigma(N)]`, all strict.
pub fn in_polyhedron<T: PartialOrd>(coords: &[T], sigma: &Permutation) -> bool {
    debug_assert_eq!(coords.len(), sigma.len());
    sigma.images().windows(2).all(|w| coords[w[0]] < coords[w[1]])
}

fn has_tie(values: &[u64]) -> bool {
    (0..values.len()).any(|i| values[i + 1..].contains(&values[i]))
}

#[derive(Debug, Clone, Serialize)]
pub struct PatternCountReport {
    pub p: OddPrime,
    pub pattern: DisplacementPattern,
    pub sigma: Permutation,
    pub region_card: u64,
    pub count: u64,
    pub tie_count: u64,
    /// `p^2 / N!`
    pub main_term: f64,
    /// `main_term / count`; infinite when the count is zero.
    pub ratio: f64,
}

impl PatternCountReport {
    fn new(
        p: OddPrime,
        pattern: &DisplacementPattern,
        sigma: Permutation,
        region_card: u64,
        count: u64,
        tie_count: u64,
    ) -> Self {
        let main_term = p.square() as f64 / factorial(pattern.dim()) as f64;
        PatternCountReport {
            p,
            pattern: pattern.clone(),
            sigma,
            region_card,
            count,
            tie_count,
            main_term,
            ratio: main_term / count as f64,
        }
    }

    /// `floor(1000 * p^2 / (N! * count))` in exact integer arithmetic.
    pub fn ratio_milli_truncated(&self) -> Option<u128> {
        if self.count == 0 {
            return None;
        }
        let num = 1000u128 * self.p.square() as u128;
        Some(num / (factorial(self.pattern.dim()) * self.count as u128))
    }
}

fn check_dims(pattern: &DisplacementPattern, sigma: &Permutation) -> Result<()> {
    if pattern.dim() != sigma.len() {
        return Err(FqError::InvalidPermutation(format!(
            "{sigma} has length {} but the pattern has {} vectors",
            sigma.len(),
            pattern.dim()
        )));
    }
    if pattern.dim() > MAX_DIM_SINGLE {
        return Err(FqError::DimensionTooLarge {
            n: pattern.dim(),
            max: MAX_DIM_SINGLE,
        });
    }
    Ok(())
}

/// Exact number of origins whose spanned tuple is strictly ordered by `sigma`,
/// together with the number of origins whose tuple has a repeated value.
pub fn count_pattern(
    t: &FermatQuotientTable,
    pattern: &DisplacementPattern,
    sigma: &Permutation,
) -> Result<PatternCountReport> {
    check_dims(pattern, sigma)?;
    let region = admissible_region(t.prime(), pattern);
    let v = pattern.vectors();
    let partials = map_blocks(region.rows(), ROW_BLOCK, |rows| {
        let mut buf = vec![0u64; v.len()];
        let (mut hit, mut ties) = (0u64, 0u64);
        for a in rows {
            for b in region.b_lo as u64..=region.b_hi as u64 {
                fill_residues(t, v, a, b, &mut buf);
                if in_polyhedron(&buf, sigma) {
                    hit += 1;
                } else if has_tie(&buf) {
                    ties += 1;
                }
            }
        }
        (hit, ties)
    });
    let (count, ties) = partials.iter().fold((0, 0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    Ok(PatternCountReport::new(
        t.prime(),
        pattern,
        sigma.clone(),
        region.cardinality,
        count,
        ties,
    ))
}

/// Counts for every permutation from one sweep; reports are in lexicographic
/// order of `sigma`.
pub fn count_all_permutations(
    t: &FermatQuotientTable,
    pattern: &DisplacementPattern,
) -> Result<Vec<PatternCountReport>> {
    let n = pattern.dim();
    if n > MAX_DIM_SWEEP {
        return Err(FqError::DimensionTooLarge { n, max: MAX_DIM_SWEEP });
    }
    let slots = factorial(n) as usize;
    let region = admissible_region(t.prime(), pattern);
    let v = pattern.vectors();
    let partials = map_blocks(region.rows(), ROW_BLOCK, |rows| {
        // one slot per permutation rank, then ties
        let mut acc = vec![0u64; slots + 1];
        let mut buf = vec![0u64; n];
        let mut order: Vec<usize> = (0..n).collect();
        for a in rows {
            for b in region.b_lo as u64..=region.b_hi as u64 {
                fill_residues(t, v, a, b, &mut buf);
                order.sort_unstable_by_key(|&i| buf[i]);
                if order.windows(2).any(|w| buf[w[0]] == buf[w[1]]) {
                    acc[slots] += 1;
                } else {
                    acc[lehmer_rank(&order)] += 1;
                }
            }
        }
        acc
    });
    let mut totals = vec![0u64; slots + 1];
    for part in partials {
        for (x, y) in totals.iter_mut().zip(part) {
            *x += y;
        }
    }
    let ties = totals[slots];
    Ok(Permutation::all(n)
        .into_iter()
        .enumerate()
        .map(|(rank, sigma)| PatternCountReport::new(t.prime(), pattern, sigma, region.cardinality, totals[rank], ties))
        .collect())
}

/// The origins in the order set and their spanned residues, row-major.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PointSets {
    pub origins: Vec<(u64, u64)>,
    pub residues: Vec<Vec<u64>>,
}

pub fn emit_point_sets(
    t: &FermatQuotientTable,
    pattern: &DisplacementPattern,
    sigma: &Permutation,
) -> Result<PointSets> {
    check_dims(pattern, sigma)?;
    let region = admissible_region(t.prime(), pattern);
    let v = pattern.vectors();
    let blocks = map_blocks(region.rows(), ROW_BLOCK, |rows| {
        let mut part = PointSets::default();
        let mut buf = vec![0u64; v.len()];
        for a in rows {
            for b in region.b_lo as u64..=region.b_hi as u64 {
                fill_residues(t, v, a, b, &mut buf);
                if in_polyhedron(&buf, sigma) {
                    part.origins.push((a, b));
                    part.residues.push(buf.clone());
                }
            }
        }
        part
    });
    let mut out = PointSets::default();
    for part in blocks {
        out.origins.extend(part.origins);
        out.residues.extend(part.residues);
    }
    Ok(out)
}

/// Every spanned tuple of the admissible region, row-major.
pub fn spanned_residues(t: &FermatQuotientTable, pattern: &DisplacementPattern) -> Vec<Vec<u64>> {
    let region = admissible_region(t.prime(), pattern);
    let v = pattern.vectors();
    map_blocks(region.rows(), ROW_BLOCK, |rows| {
        let mut part = Vec::new();
        for a in rows {
            for b in region.b_lo as u64..=region.b_hi as u64 {
                let mut buf = vec![0u64; v.len()];
                fill_residues(t, v, a, b, &mut buf);
                part.push(buf);
            }
        }
        part
    })
    .into_iter()
    .flatten()
    .collect()
}
