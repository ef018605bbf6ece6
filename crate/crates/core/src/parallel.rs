//! Fixed-plan work partitioning.
//!
//! Ranges are cut into blocks whose size depends only on the input, never on
//! the worker count. Per-block results come back in block order, so any
//! reduction over them is the same under every thread pool.

use std::ops::Range;

use rayon::prelude::*;

pub fn split(range: Range<u64>, block: u64) -> Vec<Range<u64>> {
    assert!(block > 0);
    let mut out = Vec::new();
    let mut lo = range.start;
    while lo < range.end {
        let hi = (lo + block).min(range.end);
        out.push(lo..hi);
        lo = hi;
    }
    out
}

/// Applies `f` to each block in parallel and returns the results in order.
pub fn map_blocks<T, F>(range: Range<u64>, block: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    split(range, block).into_par_iter().map(f).collect()
}

/// Kahan-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
