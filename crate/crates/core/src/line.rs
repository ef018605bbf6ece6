//! Mean distance from the base row of the matrix to a line taken mod 1.

use serde::Serialize;

use crate::error::{FqError, Result};
use crate::parallel::{map_blocks, KahanSum};
use crate::prime::OddPrime;
use crate::table::FermatQuotientTable;

const BLOCK: u64 = 1 << 14;
// beyond this an f64 slope no longer represents every integer exactly
const EXACT_INT_LIMIT: f64 = 9_007_199_254_740_992.0;

/// The line `x -> {C x + D}` on the unit torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineSpec {
    pub c: f64,
    pub d: f64,
}

impl LineSpec {
    pub fn new(c: f64, d: f64) -> Result<Self> {
        if !c.is_finite() || !d.is_finite() {
            return Err(FqError::InvalidArgument(format!("non-finite line ({c}, {d})")));
        }
        if c == 0.0 {
            return Err(FqError::ZeroSlope);
        }
        Ok(LineSpec { c, d })
    }

    pub fn is_integral(&self) -> bool {
        self.c.fract() == 0.0
            && self.d.fract() == 0.0
            && self.c.abs() < EXACT_INT_LIMIT
            && self.d.abs() < EXACT_INT_LIMIT
    }

    /// `|C| <= p^(1/12) log^(-2/3) p`, a finite-p stand-in for the slope
    /// growth allowed by the asymptotic estimate. Informational only.
    pub fn within_asymptotic_regime(&self, p: OddPrime) -> bool {
        let pf = p.get() as f64;
        self.c.abs() <= pf.powf(1.0 / 12.0) * pf.ln().powf(-2.0 / 3.0)
    }

    /// The limit 1/3 is established for `C, D > 0`; `D` matters only mod 1,
    /// so only the sign of `C` can leave that setting.
    pub fn positive_slope(&self) -> bool {
        self.c > 0.0
    }
}

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

pub fn line_value(line: &LineSpec, x: f64) -> f64 {
    frac(line.c * x + line.d)
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanDistanceResult {
    pub p: OddPrime,
    pub line: LineSpec,
    pub mean: f64,
    pub deviation: f64,
    pub error_scale: f64,
    /// `sum_b |q_p(b) - (C b mod p)|` when `C` and `D` are integers; the mean
    /// is this over `p^2`.
    pub exact_numerator: Option<u128>,
    pub within_asymptotic_regime: bool,
    pub positive_slope: bool,
}

/// `(1/p) * sum_{b=1}^{p-1} |q_p(b)/p - {C b/p + D}|`.
pub fn mean_line_distance(t: &FermatQuotientTable, line: &LineSpec) -> MeanDistanceResult {
    let p = t.prime();
    let pv = p.get();
    let pf = pv as f64;
    let (mean, exact) = if line.is_integral() {
        let c = line.c as i128;
        let partials = map_blocks(1..pv, BLOCK, |r| {
            r.map(|b| {
                let on_line = (c * b as i128).rem_euclid(pv as i128);
                (t.quotient(b) as i128 - on_line).unsigned_abs()
            })
            .sum::<u128>()
        });
        let num: u128 = partials.iter().sum();
        (num as f64 / (pf * pf), Some(num))
    } else {
        let partials = map_blocks(1..pv, BLOCK, |r| {
            let mut acc = KahanSum::default();
            for b in r {
                let g = frac(line.c * (b as f64) / pf + line.d);
                acc.add((t.quotient(b) as f64 - pf * g).abs());
            }
            acc.value()
        });
        let mut total = KahanSum::default();
        for s in partials {
            total.add(s);
        }
        (total.value() / (pf * pf), None)
    };
    let lp = pf.ln();
    MeanDistanceResult {
        p,
        line: *line,
        mean,
        deviation: (mean - 1.0 / 3.0).abs(),
        error_scale: line.c.abs().powf(0.6) * pf.powf(-0.05) * lp.powf(0.4),
        exact_numerator: exact,
        within_asymptotic_regime: line.within_asymptotic_regime(p),
        positive_slope: line.positive_slope(),
    }
}

/// `int_0^1 |y - g| dy` for `g` in `[0, 1]`.
#[inline]
fn inner_integral(g: f64) -> f64 {
    g * g - g + 0.5
}

/// Points in the open interval `(x0, x1)` where `C x + D` is an integer.
fn jumps_inside(c: f64, d: f64, x0: f64, x1: f64) -> Vec<f64> {
    if c == 0.0 {
        return Vec::new();
    }
    let (u0, u1) = (c * x0 + d, c * x1 + d);
    let (lo, hi) = if u0 < u1 { (u0, u1) } else { (u1, u0) };
    let first = lo.floor() as i64 + 1;
    let last = hi.ceil() as i64 - 1;
    let mut xs: Vec<f64> = (first..=last)
        .map(|k| (k as f64 - d) / c)
        .filter(|&x| x > x0 && x < x1)
        .collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    xs
}

/// Midpoint quadrature in `x` of `int_0^1 int_0^1 |y - {C x + D}| dy dx`,
/// with the inner integral in closed form. Cells containing a jump of the
/// sawtooth are split at the jump. Any `C`, including 0, is accepted.
pub fn distance_integral(c: f64, d: f64, steps: usize) -> Result<f64> {
    if steps < 10 {
        return Err(FqError::InvalidArgument(format!("steps = {steps} < 10")));
    }
    let h = 1.0 / steps as f64;
    let mut acc = KahanSum::default();
    for i in 0..steps {
        let x0 = i as f64 * h;
        let x1 = if i + 1 == steps { 1.0 } else { (i + 1) as f64 * h };
        let mut left = x0;
        for x in jumps_inside(c, d, x0, x1).into_iter().chain(std::iter::once(x1)) {
            let mid = 0.5 * (left + x);
            acc.add((x - left) * inner_integral(frac(c * mid + d)));
            left = x;
        }
    }
    Ok(acc.value())
}

/// The same quadrature for a line with nonzero slope, which is the setting
/// in which the value tends to 1/3.
pub fn integral_i(line: &LineSpec, steps: usize) -> Result<f64> {
    distance_integral(line.c, line.d, steps)
}

/// Exact value of the double integral, integrating the quadratic
/// `g^2 - g + 1/2` over each linear piece of the sawtooth.
pub fn integral_i_exact(line: &LineSpec) -> f64 {
    let (c, d) = (line.c, line.d);
    let mut acc = KahanSum::default();
    let mut left = 0.0;
    for x in jumps_inside(c, d, 0.0, 1.0).into_iter().chain(std::iter::once(1.0)) {
        let len = x - left;
        if len > 0.0 {
            let mid = 0.5 * (left + x);
            let gm = frac(c * mid + d);
            let g0 = gm - c * 0.5 * len;
            let g1 = gm + c * 0.5 * len;
            let mean_sq = (g0 * g0 + g0 * g1 + g1 * g1) / 3.0;
            acc.add(len * (mean_sq - 0.5 * (g0 + g1) + 0.5));
        }
        left = x;
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(p: i64) -> FermatQuotientTable {
        FermatQuotientTable::build(OddPrime::new(p).unwrap())
    }

    #[test]
    fn line_values() {
        let l = LineSpec::new(1.0, 0.0).unwrap();
        assert_eq!(line_value(&l, 0.5), 0.5);
        assert_eq!(line_value(&l, 1.0), 0.0);
        let l = LineSpec::new(2.5, 0.3).unwrap();
        assert!((line_value(&l, 0.8) - 0.3).abs() < 1e-12);
        assert!((line_value(&l, 0.8 + 1.0 / 2.5) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn zero_slope_rejected() {
        assert_eq!(LineSpec::new(0.0, 0.5), Err(FqError::ZeroSlope));
        assert!(distance_integral(0.0, 0.5, 100).is_ok());
    }

    #[test]
    fn mean_for_p11_is_43_over_121() {
        let t = table(11);
        let r = mean_line_distance(&t, &LineSpec::new(1.0, 0.0).unwrap());
        assert_eq!(r.exact_numerator, Some(43));
        assert_eq!(r.mean, 43.0 / 121.0);
    }

    #[test]
    fn integer_shift_of_intercept_changes_nothing() {
        let t = table(1009);
        let base = mean_line_distance(&t, &LineSpec::new(3.0, 0.0).unwrap());
        let shifted = mean_line_distance(&t, &LineSpec::new(3.0, 5.0).unwrap());
        assert_eq!(base.exact_numerator, shifted.exact_numerator);
        let r1 = mean_line_distance(&t, &LineSpec::new(0.7, 0.25).unwrap());
        let r2 = mean_line_distance(&t, &LineSpec::new(0.7, 2.25).unwrap());
        assert!((r1.mean - r2.mean).abs() < 1e-12);
    }

    #[test]
    fn float_path_agrees_with_integer_path() {
        let t = table(1009);
        let int = mean_line_distance(&t, &LineSpec::new(2.0, 0.0).unwrap());
        // nudge the intercept off the integers so the float path is taken
        let flt = mean_line_distance(&t, &LineSpec::new(2.0, 1e-13).unwrap());
        assert!(flt.exact_numerator.is_none());
        assert!((int.mean - flt.mean).abs() < 1e-9);
    }

    #[test]
    fn negative_slope_flagged() {
        let t = table(101);
        let r = mean_line_distance(&t, &LineSpec::new(-1.0, 0.0).unwrap());
        assert!(!r.positive_slope);
        assert!((0.0..1.0).contains(&r.mean));
    }

    #[test]
    fn exact_integral() {
        let i = integral_i_exact(&LineSpec::new(1.0, 0.0).unwrap());
        assert!((i - 1.0 / 3.0).abs() < 1e-15);
        // integer slopes cover whole periods, so every intercept gives 1/3
        for (c, d) in [(2.0, 0.3), (3.0, 0.71), (-4.0, 0.2)] {
            let i = integral_i_exact(&LineSpec::new(c, d).unwrap());
            assert!((i - 1.0 / 3.0).abs() < 1e-14, "C = {c}: {i}");
        }
    }

    #[test]
    fn fractional_slope_leaves_a_partial_period() {
        // {2.5x + 0.3} on [0,1]: two full periods (0.8 of the interval, mean 1/3)
        // plus g running over [0.3, 0.8) on the last 0.2. There the mean of
        // g^2 - g + 1/2 is ((0.8^3 - 0.3^3)/3 - (0.8^2 - 0.3^2)/2)/0.5 + 1/2.
        let tail = ((0.512 - 0.027) / 3.0 - (0.64 - 0.09) / 2.0) / 0.5 + 0.5;
        let expected = 0.8 / 3.0 + 0.2 * tail;
        let line = LineSpec::new(2.5, 0.3).unwrap();
        assert!((integral_i_exact(&line) - expected).abs() < 1e-14);
        assert!((integral_i(&line, 1_000).unwrap() - expected).abs() < 1e-6);
    }

    #[test]
    fn constant_line_integral() {
        // g = 0.5 everywhere: int |y - 1/2| dy = 1/4
        let v = distance_integral(0.0, 0.5, 100).unwrap();
        assert!((v - 0.25).abs() < 1e-14);
    }
}
