//! C ABI over `fqm-core`.
//!
//! Tables and patterns cross the boundary as opaque heap handles created by
//! `*_new` and released by the matching `*_free`. Every other call returns an
//! `FqmStatus` and writes its result through an out-pointer; out-pointers
//! are left untouched on failure. Panics are caught and reported as
//! `FQM_STATUS_INTERNAL`.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use fqm_core::discrepancy::ordered_box_counts;
use fqm_core::expsum::{complete_exp_sum, pattern_exp_sum, ExpSumResult, FrequencyVector};
use fqm_core::line::{mean_line_distance, LineSpec};
use fqm_core::pattern::{
    count_all_permutations, count_pattern, factorial, DisplacementPattern, Permutation, MAX_DIM_SWEEP,
};
use fqm_core::{fermat_quotient_oracle, inverse_mod, FermatQuotientTable, FqError, MatrixIndex, OddPrime};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FqmStatus {
    Ok = 0,
    NullPointer = 1,
    Negative = 2,
    NotPrime = 3,
    Composite = 4,
    EvenPrime = 5,
    TooLarge = 6,
    DivisibleByModulus = 7,
    OutOfRange = 8,
    EmptyPattern = 9,
    InvalidPermutation = 10,
    DimensionTooLarge = 11,
    OriginOutsideRegion = 12,
    ZeroSlope = 13,
    TooManyCells = 14,
    Overflow = 15,
    InvalidArgument = 16,
    BufferTooSmall = 17,
    Internal = 99,
}

impl From<&FqError> for FqmStatus {
    fn from(e: &FqError) -> Self {
        match e {
            FqError::Negative(_) => FqmStatus::Negative,
            FqError::NotPrime(_) => FqmStatus::NotPrime,
            FqError::Composite(_) => FqmStatus::Composite,
            FqError::EvenPrime => FqmStatus::EvenPrime,
            FqError::TooLarge(_) => FqmStatus::TooLarge,
            FqError::DivisibleByModulus { .. } => FqmStatus::DivisibleByModulus,
            FqError::OutOfRange { .. } => FqmStatus::OutOfRange,
            FqError::EmptyPattern => FqmStatus::EmptyPattern,
            FqError::InvalidPermutation(_) => FqmStatus::InvalidPermutation,
            FqError::DimensionTooLarge { .. } => FqmStatus::DimensionTooLarge,
            FqError::OriginOutsideRegion { .. } => FqmStatus::OriginOutsideRegion,
            FqError::ZeroSlope => FqmStatus::ZeroSlope,
            FqError::TooManyCells { .. } => FqmStatus::TooManyCells,
            FqError::Overflow(_) => FqmStatus::Overflow,
            FqError::InvalidArgument(_) => FqmStatus::InvalidArgument,
        }
    }
}

/// Opaque Fermat quotient table for one prime.
pub struct FqmTable(FermatQuotientTable);

/// Opaque displacement pattern.
pub struct FqmPattern(DisplacementPattern);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FqmCountReport {
    pub region_card: u64,
    pub count: u64,
    pub tie_count: u64,
    pub main_term: f64,
    pub ratio: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FqmMeanDistance {
    pub mean: f64,
    pub deviation: f64,
    pub error_scale: f64,
    /// Nonzero when the slope and intercept were integers and the mean is
    /// `exact_numerator / p^2` exactly.
    pub exact: u8,
    pub exact_numerator: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FqmExpSum {
    pub re: f64,
    pub im: f64,
    pub norm: f64,
    pub bound: f64,
    pub terms: u64,
    pub bound_applies: u8,
}

impl From<ExpSumResult> for FqmExpSum {
    fn from(r: ExpSumResult) -> Self {
        FqmExpSum {
            re: r.re,
            im: r.im,
            norm: r.norm,
            bound: r.bound,
            terms: r.terms,
            bound_applies: r.bound_applies as u8,
        }
    }
}

fn guard(f: impl FnOnce() -> Result<(), FqmStatus>) -> FqmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FqmStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => FqmStatus::Internal,
    }
}

fn lift<T>(r: Result<T, FqError>) -> Result<T, FqmStatus> {
    r.map_err(|e| FqmStatus::from(&e))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, FqmStatus> {
    p.as_ref().ok_or(FqmStatus::NullPointer)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), FqmStatus> {
    if out.is_null() {
        return Err(FqmStatus::NullPointer);
    }
    out.write(value);
    Ok(())
}

unsafe fn read_slice<'a, T>(data: *const T, len: usize) -> Result<&'a [T], FqmStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(FqmStatus::NullPointer);
    }
    Ok(slice::from_raw_parts(data, len))
}

/// Static description of a status code. Never NULL; do not free.
#[no_mangle]
pub extern "C" fn fqm_status_message(status: FqmStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        FqmStatus::Ok => b"ok\0",
        FqmStatus::NullPointer => b"null pointer argument\0",
        FqmStatus::Negative => b"negative modulus\0",
        FqmStatus::NotPrime => b"modulus is not prime\0",
        FqmStatus::Composite => b"modulus is composite\0",
        FqmStatus::EvenPrime => b"modulus must be an odd prime\0",
        FqmStatus::TooLarge => b"modulus must be below 2^31\0",
        FqmStatus::DivisibleByModulus => b"argument divisible by the modulus\0",
        FqmStatus::OutOfRange => b"argument out of range\0",
        FqmStatus::EmptyPattern => b"pattern needs at least one vector\0",
        FqmStatus::InvalidPermutation => b"invalid permutation\0",
        FqmStatus::DimensionTooLarge => b"pattern dimension too large\0",
        FqmStatus::OriginOutsideRegion => b"origin outside the admissible region\0",
        FqmStatus::ZeroSlope => b"line slope must be nonzero\0",
        FqmStatus::TooManyCells => b"grid too large\0",
        FqmStatus::Overflow => b"integer overflow\0",
        FqmStatus::InvalidArgument => b"invalid argument\0",
        FqmStatus::BufferTooSmall => b"output buffer too small\0",
        FqmStatus::Internal => b"internal error\0",
    };
    s.as_ptr() as *const c_char
}

/// Builds the table for the odd prime `p` and stores a new handle in `*out`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn fqm_table_new(p: i64, out: *mut *mut FqmTable) -> FqmStatus {
    guard(|| {
        if out.is_null() {
            return Err(FqmStatus::NullPointer);
        }
        let prime = lift(OddPrime::new(p))?;
        let handle = Box::into_raw(Box::new(FqmTable(FermatQuotientTable::build(prime))));
        write(out, handle)
    })
}

/// # Safety
/// `table` must be NULL or a handle from `fqm_table_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fqm_table_free(table: *mut FqmTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// The prime of a table, or 0 for NULL.
///
/// # Safety
/// `table` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fqm_table_prime(table: *const FqmTable) -> u64 {
    table.as_ref().map_or(0, |t| t.0.prime().get())
}

/// `A[a][b]` for `0 <= a < p`, `1 <= b < p`.
///
/// # Safety
/// `table` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fqm_table_entry(table: *const FqmTable, a: i64, b: i64, out: *mut u64) -> FqmStatus {
    guard(|| {
        let t = &deref(table)?.0;
        let idx = lift(MatrixIndex::new(a, b, t.prime()))?;
        write(out, t.entry(idx))
    })
}

/// The row with a zero in column `b`.
///
/// # Safety
/// `table` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fqm_table_zero_row(table: *const FqmTable, b: u64, out: *mut u64) -> FqmStatus {
    guard(|| {
        let t = &deref(table)?.0;
        write(out, lift(t.zero_row_of_column(b))?)
    })
}

/// `q_p(n)` by exponentiation modulo `p^2`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fqm_fermat_quotient(n: u64, p: i64, out: *mut u64) -> FqmStatus {
    guard(|| {
        let prime = lift(OddPrime::new(p))?;
        write(out, lift(fermat_quotient_oracle(n, prime))?)
    })
}

/// `b^{-1} mod p`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fqm_inverse_mod(b: u64, p: i64, out: *mut u64) -> FqmStatus {
    guard(|| {
        let prime = lift(OddPrime::new(p))?;
        write(out, lift(inverse_mod(b, prime))?)
    })
}

/// Builds a pattern from `len` vectors `(s[i], t[i])`.
///
/// # Safety
/// `s` and `t` must point to `len` readable values; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fqm_pattern_new(
    s: *const i64,
    t: *const i64,
    len: usize,
    out: *mut *mut FqmPattern,
) -> FqmStatus {
    guard(|| {
        if out.is_null() {
            return Err(FqmStatus::NullPointer);
        }
        let s = read_slice(s, len)?;
        let t = read_slice(t, len)?;
        let pattern = lift(DisplacementPattern::new(
            s.iter().copied().zip(t.iter().copied()).collect(),
        ))?;
        write(out, Box::into_raw(Box::new(FqmPattern(pattern))))
    })
}

/// # Safety
/// `pattern` must be NULL or a handle from `fqm_pattern_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fqm_pattern_free(pattern: *mut FqmPattern) {
    if !pattern.is_null() {
        drop(Box::from_raw(pattern));
    }
}

/// Number of vectors in a pattern, or 0 for NULL.
///
/// # Safety
/// `pattern` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fqm_pattern_dim(pattern: *const FqmPattern) -> usize {
    pattern.as_ref().map_or(0, |p| p.0.dim())
}

/// Exact count for the one-based permutation `sigma[0..len]`.
///
/// # Safety
/// Handles must be live; `sigma` must point to `len` values; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fqm_count_pattern(
    table: *const FqmTable,
    pattern: *const FqmPattern,
    sigma: *const u32,
    len: usize,
    out: *mut FqmCountReport,
) -> FqmStatus {
    guard(|| {
        let t = &deref(table)?.0;
        let v = &deref(pattern)?.0;
        let images: Vec<usize> = read_slice(sigma, len)?.iter().map(|&k| k as usize).collect();
        let sigma = lift(Permutation::from_one_based(&images))?;
        let r = lift(count_pattern(t, v, &sigma))?;
        write(
            out,
            FqmCountReport {
                region_card: r.region_card,
                count: r.count,
                tie_count: r.tie_count,
                main_term: r.main_term,
                ratio: r.ratio,
            },
        )
    })
}

/// Counts for all `N!` permutations, written to `counts` in lexicographic
/// order of the permutation; `capacity` must be at least `N!`. The tie count
/// goes to `*ties`.
///
/// # Safety
/// Handles must be live; `counts` writable for `capacity` values; `ties` valid.
#[no_mangle]
pub unsafe extern "C" fn fqm_count_all_permutations(
    table: *const FqmTable,
    pattern: *const FqmPattern,
    counts: *mut u64,
    capacity: usize,
    ties: *mut u64,
) -> FqmStatus {
    guard(|| {
        let t = &deref(table)?.0;
        let v = &deref(pattern)?.0;
        if v.dim() > MAX_DIM_SWEEP {
            return Err(FqmStatus::DimensionTooLarge);
        }
        let needed = factorial(v.dim()) as usize;
        if capacity < needed {
            return Err(FqmStatus::BufferTooSmall);
        }
        if counts.is_null() || ties.is_null() {
            return Err(FqmStatus::NullPointer);
        }
        let reports = lift(count_all_permutations(t, v))?;
        let dst = slice::from_raw_parts_mut(counts, needed);
        for (slot, r) in dst.iter_mut().zip(&reports) {
            *slot = r.count;
        }
        write(ties, reports.first().map_or(0, |r| r.tie_count))
    })
}

/// Mean distance from the base row to `x -> {c x + d}`.
///
/// # Safety
/// `table` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fqm_mean_line_distance(
    table: *const FqmTable,
    c: f64,
    d: f64,
    out: *mut FqmMeanDistance,
) -> FqmStatus {
    guard(|| {
        let t = &deref(table)?.0;
        let line = lift(LineSpec::new(c, d))?;
        let r = mean_line_distance(t, &line);
        let numerator = match r.exact_numerator {
            Some(n) => Some(u64::try_from(n).map_err(|_| FqmStatus::Overflow)?),
            None => None,
        };
        write(
            out,
            FqmMeanDistance {
                mean: r.mean,
                deviation: r.deviation,
                error_scale: r.error_scale,
                exact: numerator.is_some() as u8,
                exact_numerator: numerator.unwrap_or(0),
            },
        )
    })
}

unsafe fn exp_sum_with(
    table: *const FqmTable,
    pattern: *const FqmPattern,
    h: *const i64,
    len: usize,
    out: *mut FqmExpSum,
    f: fn(&FermatQuotientTable, &DisplacementPattern, &FrequencyVector) -> Result<ExpSumResult, FqError>,
) -> FqmStatus {
    guard(|| {
        let t = &deref(table)?.0;
        let v = &deref(pattern)?.0;
        let h = FrequencyVector::new(read_slice(h, len)?.to_vec());
        write(out, FqmExpSum::from(lift(f(t, v, &h))?))
    })
}

/// Complete sum over the full grid, indices reduced mod `p`.
///
/// # Safety
/// Handles must be live; `h` must point to `len` values; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fqm_complete_exp_sum(
    table: *const FqmTable,
    pattern: *const FqmPattern,
    h: *const i64,
    len: usize,
    out: *mut FqmExpSum,
) -> FqmStatus {
    exp_sum_with(table, pattern, h, len, out, complete_exp_sum)
}

/// Sum restricted to the admissible region.
///
/// # Safety
/// Handles must be live; `h` must point to `len` values; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fqm_pattern_exp_sum(
    table: *const FqmTable,
    pattern: *const FqmPattern,
    h: *const i64,
    len: usize,
    out: *mut FqmExpSum,
) -> FqmStatus {
    exp_sum_with(table, pattern, h, len, out, pattern_exp_sum)
}

/// `C(L, N)` and `C(L+N-1, N)`; fails with `FQM_STATUS_OVERFLOW` past 64 bits.
///
/// # Safety
/// `strict` and `weak` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fqm_ordered_box_counts(n: u64, l: u64, strict: *mut u64, weak: *mut u64) -> FqmStatus {
    guard(|| {
        if strict.is_null() || weak.is_null() {
            return Err(FqmStatus::NullPointer);
        }
        let (s, w) = lift(ordered_box_counts(n, l))?;
        let s = u64::try_from(s).map_err(|_| FqmStatus::Overflow)?;
        let w = u64::try_from(w).map_err(|_| FqmStatus::Overflow)?;
        write(strict, s)?;
        write(weak, w)
    })
}
