//! Plain-text renderings shared by the CSV and JSON writers.

/// `k / p` rendered with 17 significant decimal digits, computed exactly
/// from the rational (no floating point involved). Zero renders as `0`.
pub fn rational_decimal(k: u64, p: u64) -> String {
    assert!(p > 0 && k < p, "expected 0 <= k < p");
    if k == 0 {
        return "0".to_string();
    }
    const DIGITS: u32 = 17;
    // leading zeros after the decimal point
    let mut zeros = 0u32;
    while (k as u128) * 10u128.pow(zeros + 1) < p as u128 {
        zeros += 1;
    }
    let scale = 10u128.pow(zeros + DIGITS);
    let num = k as u128 * scale;
    let (mut q, r) = (num / p as u128, num % p as u128);
    if 2 * r >= p as u128 {
        q += 1;
    }
    let mut digits = q.to_string();
    if digits.len() as u32 > DIGITS {
        // rounding carried into a new leading digit
        digits.truncate(DIGITS as usize);
        zeros -= 1;
    }
    format!("0.{}{}", "0".repeat(zeros as usize), digits)
}

/// Shortest round-trip decimal for an `f64`.
pub fn real(x: f64) -> String {
    format!("{x}")
}
