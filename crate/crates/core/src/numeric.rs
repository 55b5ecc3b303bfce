//! Small numeric helpers: deterministic reductions, log-domain sums and line fits.

use num_complex::Complex64;

const PAIRWISE_LEAF: usize = 32;

/// Pairwise summation in a fixed tree order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise summation of complex values in a fixed tree order.
pub fn pairwise_sum_c(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= PAIRWISE_LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_c(&xs[..mid]) + pairwise_sum_c(&xs[mid..])
}

/// `log2(2^a + 2^b + ...)` without overflow.
pub fn log2_sum_exp2(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    let s: f64 = terms.iter().map(|t| (t - m).exp2()).sum();
    m + s.log2()
}

/// `log2 floor(2^x)` for real `x`; `-inf` when the floor is zero.
pub fn log2_floor_exp2(x: f64) -> f64 {
    if x < 0.0 {
        return f64::NEG_INFINITY;
    }
    if x >= 52.0 {
        // floor changes the value by less than one part in 2^52
        return x;
    }
    (x.exp2().floor()).log2()
}

/// `log⁺ x`: 1 below e, natural log above.
pub fn log_plus(x: f64) -> f64 {
    if x < std::f64::consts::E {
        1.0
    } else {
        x.ln()
    }
}

/// Distance to the nearest integer.
pub fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Ordinary least squares slope and intercept of `y` against `x`.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = pairwise_sum(x) / n;
    let my = pairwise_sum(y) / n;
    let sxy: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let sxx: Vec<f64> = x.iter().map(|a| (a - mx) * (a - mx)).collect();
    let slope = pairwise_sum(&sxy) / pairwise_sum(&sxx);
    (slope, my - slope * mx)
}

/// `(-1)^k` as an integer.
#[inline]
pub fn parity_sign(k: u64) -> i64 {
    1 - 2 * (k & 1) as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_matches_linear() {
        let v = log2_sum_exp2(&[3.0, 1.0]);
        assert!((v - 10f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn floor_exp2() {
        assert_eq!(log2_floor_exp2(0.5), 0.0);
        assert_eq!(log2_floor_exp2(-0.1), f64::NEG_INFINITY);
        assert!((log2_floor_exp2(3.5) - 11f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn ols_exact_line() {
        let (s, c) = ols(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((s - 2.0).abs() < 1e-12 && (c - 1.0).abs() < 1e-12);
    }
}
