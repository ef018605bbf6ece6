//! One-dimensional discrepancy, the Erdos-Turan and Koksma-Szusz bounds,
//! grid-box discrepancy and the ordered-box counts.

use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{FqError, Result};
use crate::parallel::KahanSum;

/// Cap on `L^N` for box grids and on `p^N` for residue histograms.
pub const MAX_CELLS: u128 = 100_000_000;

/// A finite sequence in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitSequence1D(Vec<f64>);

impl UnitSequence1D {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(FqError::InvalidArgument("empty sequence".into()));
        }
        if let Some(x) = values.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(FqError::InvalidArgument(format!("{x} is outside [0, 1]")));
        }
        Ok(UnitSequence1D(values))
    }

    /// `k / p` for each residue.
    pub fn from_residues(residues: &[u64], p: u64) -> Result<Self> {
        Self::new(residues.iter().map(|&k| k as f64 / p as f64).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `(1/n) sup_{0<=a<=b<=1} |#(S in [a,b]) - n (b - a)|`.
///
/// The excess side is attained on closed intervals between two sample values;
/// the deficit side on open gaps between sample values or the ends of `[0,1]`.
/// Both are scanned over distinct sorted values with prefix counts.
pub fn uniform_discrepancy(s: &UnitSequence1D) -> f64 {
    let n = s.len() as f64;
    let mut sorted = s.values().to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut vals: Vec<f64> = Vec::new();
    let mut below: Vec<usize> = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        if vals.last() != Some(&x) {
            vals.push(x);
            below.push(i);
        }
    }
    below.push(sorted.len());
    let m = vals.len();

    let mut best = 0.0f64;
    for i in 0..m {
        for j in i..m {
            let inside = (below[j + 1] - below[i]) as f64;
            best = best.max(inside / n - (vals[j] - vals[i]));
        }
    }
    // open gaps: endpoints from {0} + values, values + {1}
    for i in 0..=m {
        let (lo, strictly_after) = if i == 0 { (0.0, 0) } else { (vals[i - 1], below[i]) };
        for j in i..=m {
            let (hi, strictly_before) = if j == m {
                (1.0, sorted.len())
            } else {
                (vals[j], below[j])
            };
            if hi < lo {
                continue;
            }
            let inside = strictly_before.saturating_sub(strictly_after) as f64;
            best = best.max((hi - lo) - inside / n);
        }
    }
    best
}

/// `sup_b |#(S in [0, b)) / n - b|` in `O(n log n)`.
pub fn star_discrepancy(s: &UnitSequence1D) -> f64 {
    let n = s.len();
    let mut sorted = s.values().to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let nf = n as f64;
    let mut best = 0.0f64;
    let mut i = 0;
    while i < n {
        let x = sorted[i];
        let mut j = i;
        while j < n && sorted[j] == x {
            j += 1;
        }
        // just below x the count is i, at x (closed) it reaches j
        best = best.max(x - i as f64 / nf).max(j as f64 / nf - x);
        i = j;
    }
    best
}

#[inline]
fn unit_phase(x: f64) -> Complex64 {
    let f = x - x.floor();
    Complex64::from_polar(1.0, TAU * f)
}

/// `|S| / K + 3 sum_{m=1}^K (1/m) |sum_s e(m s)|`, a bound on the
/// unnormalised quantity `n * uniform_discrepancy`.
pub fn erdos_turan_bound(s: &UnitSequence1D, k: u64) -> Result<f64> {
    if k < 2 {
        return Err(FqError::InvalidArgument(format!("K = {k} must exceed 1")));
    }
    let mut total = KahanSum::default();
    total.add(s.len() as f64 / k as f64);
    for m in 1..=k {
        let mut sum = Complex64::new(0.0, 0.0);
        for &x in s.values() {
            sum += unit_phase(frac_product(m, x));
        }
        total.add(3.0 * sum.norm() / m as f64);
    }
    Ok(total.value())
}

#[inline]
fn frac_product(m: u64, x: f64) -> f64 {
    let y = m as f64 * x;
    y - y.floor()
}

/// Erdos-Turan bound for the sequence `k_i / p`, with phases reduced exactly.
pub fn erdos_turan_bound_residues(residues: &[u64], p: u64, k: u64) -> Result<f64> {
    if k < 2 {
        return Err(FqError::InvalidArgument(format!("K = {k} must exceed 1")));
    }
    let table = RootsOfUnity::new(p);
    let mut total = KahanSum::default();
    total.add(residues.len() as f64 / k as f64);
    for m in 1..=k {
        let mut sum = Complex64::new(0.0, 0.0);
        for &r in residues {
            sum += table.get(((m % p) as u128 * r as u128 % p as u128) as u64);
        }
        total.add(3.0 * sum.norm() / m as f64);
    }
    Ok(total.value())
}

/// `e(k / p)` for `k` in `0..p`.
pub struct RootsOfUnity {
    roots: Vec<Complex64>,
}

impl RootsOfUnity {
    pub fn new(p: u64) -> Self {
        let pf = p as f64;
        RootsOfUnity {
            roots: (0..p)
                .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / pf))
                .collect(),
        }
    }

    #[inline]
    pub fn get(&self, k: u64) -> Complex64 {
        self.roots[k as usize]
    }

    /// `sum_k counts[k] e(k/p)`, summed in index order.
    pub fn weighted_sum(&self, counts: &[u64]) -> Complex64 {
        let (mut re, mut im) = (KahanSum::default(), KahanSum::default());
        for (k, &c) in counts.iter().enumerate() {
            if c != 0 {
                let z = self.roots[k] * c as f64;
                re.add(z.re);
                im.add(z.im);
            }
        }
        Complex64::new(re.value(), im.value())
    }
}

/// `r(h) = prod max(1, |h_i|)`.
pub fn r_of_h(h: &[i64]) -> u128 {
    h.iter().map(|x| x.unsigned_abs().max(1) as u128).product()
}

/// `sum_{0 < |h|_inf <= H} 1 / r(h)` over `h` in `Z^N`, via the product
/// `(1 + 2 sum_{k<=H} 1/k)^N - 1`.
pub fn sum_inverse_r(n: u32, h: u64) -> f64 {
    let mut harmonic = KahanSum::default();
    for k in 1..=h {
        harmonic.add(1.0 / k as f64);
    }
    (1.0 + 2.0 * harmonic.value()).powi(n as i32) - 1.0
}

/// Every `h` in `[-H, H]^N` except the origin, in lexicographic order.
fn for_each_frequency(n: usize, bound: i64, mut f: impl FnMut(&[i64])) {
    let mut h = vec![-bound; n];
    loop {
        if h.iter().any(|&x| x != 0) {
            f(&h);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if h[i] < bound {
                h[i] += 1;
                break;
            }
            h[i] = -bound;
        }
    }
}

fn check_points(points: &[Vec<f64>]) -> Result<usize> {
    let n = points
        .first()
        .map(|x| x.len())
        .ok_or_else(|| FqError::InvalidArgument("no points".into()))?;
    if n == 0 || points.iter().any(|x| x.len() != n) {
        return Err(FqError::InvalidArgument(
            "points must share a positive dimension".into(),
        ));
    }
    Ok(n)
}

/// `C_N * (2/(H+1) + sum_{0<|h|<=H} (1/r(h)) |(1/R) sum_j e(<h, x_j>)|)` by
/// direct summation. `O((2H+1)^N R)`.
pub fn koksma_szusz_bound(points: &[Vec<f64>], h_bound: u64, c_n: f64) -> Result<f64> {
    if h_bound < 2 {
        return Err(FqError::InvalidArgument(format!("H = {h_bound} must exceed 1")));
    }
    let n = check_points(points)?;
    let r = points.len() as f64;
    let mut total = KahanSum::default();
    for_each_frequency(n, h_bound as i64, |h| {
        let mut sum = Complex64::new(0.0, 0.0);
        for x in points {
            let phase: f64 = h.iter().zip(x).map(|(&hi, &xi)| frac_signed(hi, xi)).sum();
            sum += unit_phase(phase);
        }
        total.add(sum.norm() / r / r_of_h(h) as f64);
    });
    Ok(c_n * (2.0 / (h_bound as f64 + 1.0) + total.value()))
}

#[inline]
fn frac_signed(h: i64, x: f64) -> f64 {
    let y = h as f64 * x;
    y - y.floor()
}

/// The same bound for points `k / p` with residue coordinates. The sums
/// `sum_j e(<h, k_j>/p)` depend only on `h mod p`, so all of them come from
/// one `N`-dimensional FFT of the residue histogram.
pub fn koksma_szusz_bound_residues(points: &[Vec<u64>], p: u64, h_bound: u64, c_n: f64) -> Result<f64> {
    if h_bound < 2 {
        return Err(FqError::InvalidArgument(format!("H = {h_bound} must exceed 1")));
    }
    let n = points
        .first()
        .map(|x| x.len())
        .ok_or_else(|| FqError::InvalidArgument("no points".into()))?;
    let cells = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if cells > MAX_CELLS {
        return Err(FqError::TooManyCells { cells, cap: MAX_CELLS });
    }
    let spectrum = residue_spectrum(points, p, n);
    let r = points.len() as f64;
    let pi = p as i64;
    let mut total = KahanSum::default();
    for_each_frequency(n, h_bound as i64, |h| {
        let idx = h
            .iter()
            .fold(0usize, |acc, &hi| acc * p as usize + hi.rem_euclid(pi) as usize);
        total.add(spectrum[idx].norm() / r / r_of_h(h) as f64);
    });
    Ok(c_n * (2.0 / (h_bound as f64 + 1.0) + total.value()))
}

/// `F(h) = sum_j e(-<h, k_j>/p)` on the full grid `Z_p^N`, row-major.
fn residue_spectrum(points: &[Vec<u64>], p: u64, n: usize) -> Vec<Complex64> {
    let len = (p as usize).pow(n as u32);
    let mut data = vec![Complex64::new(0.0, 0.0); len];
    for x in points {
        let idx = x.iter().fold(0usize, |acc, &k| acc * p as usize + k as usize);
        data[idx] += 1.0;
    }
    let fft = FftPlanner::new().plan_fft_forward(p as usize);
    let pu = p as usize;
    let mut line = vec![Complex64::new(0.0, 0.0); pu];
    for axis in 0..n {
        let stride = pu.pow((n - 1 - axis) as u32);
        for base in 0..len {
            // visit each line once, from its first element
            if !(base / stride).is_multiple_of(pu) {
                continue;
            }
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = data[base + i * stride];
            }
            fft.process(&mut line);
            for (i, v) in line.iter().enumerate() {
                data[base + i * stride] = *v;
            }
        }
    }
    data
}

fn grid_cells(n: usize, l: u64) -> Result<u128> {
    if l < 2 {
        return Err(FqError::InvalidArgument(format!("L = {l} must be at least 2")));
    }
    let cells = (l as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if cells > MAX_CELLS {
        return Err(FqError::TooManyCells { cells, cap: MAX_CELLS });
    }
    Ok(cells)
}

fn max_box_deviation(counts: &[u64], total: usize, cells: u128) -> f64 {
    let expected = 1.0 / cells as f64;
    counts
        .iter()
        .map(|&c| (c as f64 / total as f64 - expected).abs())
        .fold(0.0, f64::max)
}

/// `max |count/R - L^{-N}|` over the `L^N` grid boxes; a lower bound on the
/// extreme discrepancy.
pub fn box_count_discrepancy(points: &[Vec<f64>], l: u64) -> Result<f64> {
    let n = check_points(points)?;
    let cells = grid_cells(n, l)?;
    let mut counts = vec![0u64; cells as usize];
    for x in points {
        let idx = x.iter().fold(0usize, |acc, &xi| {
            let c = ((xi * l as f64).floor() as i64).clamp(0, l as i64 - 1) as usize;
            acc * l as usize + c
        });
        counts[idx] += 1;
    }
    Ok(max_box_deviation(&counts, points.len(), cells))
}

/// Box discrepancy for points `k / p`, with cells `floor(k L / p)` exact.
pub fn box_count_discrepancy_residues(points: &[Vec<u64>], p: u64, l: u64) -> Result<f64> {
    let n = points
        .first()
        .map(|x| x.len())
        .ok_or_else(|| FqError::InvalidArgument("no points".into()))?;
    let cells = grid_cells(n, l)?;
    let mut counts = vec![0u64; cells as usize];
    for x in points {
        let idx = x.iter().fold(0usize, |acc, &k| acc * l as usize + (k * l / p) as usize);
        counts[idx] += 1;
    }
    Ok(max_box_deviation(&counts, points.len(), cells))
}

fn binomial(n: u64, k: u64) -> Result<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul((n - i) as u128).ok_or(FqError::Overflow("binomial"))? / (i as u128 + 1);
    }
    Ok(acc)
}

/// `(B*, B) = (C(L, N), C(L+N-1, N))`: the number of strictly increasing and
/// of nondecreasing index tuples in `{1..L}^N`.
pub fn ordered_box_counts(n: u64, l: u64) -> Result<(u128, u128)> {
    if n < 1 || n > l {
        return Err(FqError::InvalidArgument(format!(
            "need 1 <= N <= L, got N = {n}, L = {l}"
        )));
    }
    let strict = binomial(l, n)?;
    let weak = binomial(l + n - 1, n)?;
    Ok((strict, weak))
}
