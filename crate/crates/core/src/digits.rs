//! Base-q digits, truncated binary digit sums and the Thue–Morse sequence.
//!
//! Values below 2^128 are handled with shifts and masks on machine words;
//! [`BigUint`] covers everything larger.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Half-open window `[lo, hi)` of binary digit indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DigitWindow {
    pub lo: u64,
    pub hi: u64,
}

impl DigitWindow {
    /// Sentinel upper end standing for an unbounded window.
    pub const INFINITY: u64 = u64::MAX;

    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidRange(format!("window [{lo},{hi}) has lo > hi")));
        }
        Ok(DigitWindow { lo, hi })
    }

    /// The window `[0, ∞)`.
    pub fn full() -> Self {
        DigitWindow { lo: 0, hi: Self::INFINITY }
    }

    /// The window `[0, n)`.
    pub fn below(n: u64) -> Self {
        DigitWindow { lo: 0, hi: n }
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn len(&self) -> u64 {
        self.hi.saturating_sub(self.lo)
    }
}

/// A nonnegative integer whose digits can be inspected.
pub trait Natural {
    /// Number of ones among binary digits with index in `w`.
    fn window_popcount(&self, w: DigitWindow) -> u64;
    /// Sum of base-`q` digits; `q ≥ 2` is checked by the caller.
    fn base_digit_sum(&self, q: u64) -> u64;
    fn to_biguint(&self) -> BigUint;
}

#[inline]
fn mask128(n: u128, w: DigitWindow) -> u128 {
    if w.lo >= 128 || w.is_empty() {
        return 0;
    }
    let shifted = n >> w.lo;
    let width = w.hi - w.lo;
    if width >= 128 {
        shifted
    } else {
        shifted & ((1u128 << width) - 1)
    }
}

/// Popcount of binary digits of `n` with index in `w`.
#[inline]
pub fn window_popcount_u128(n: u128, w: DigitWindow) -> u64 {
    mask128(n, w).count_ones() as u64
}

impl Natural for u128 {
    fn window_popcount(&self, w: DigitWindow) -> u64 {
        window_popcount_u128(*self, w)
    }

    fn base_digit_sum(&self, q: u64) -> u64 {
        if q == 2 {
            return self.count_ones() as u64;
        }
        let q = q as u128;
        let (mut n, mut s) = (*self, 0u64);
        while n > 0 {
            s += (n % q) as u64;
            n /= q;
        }
        s
    }

    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Natural for u64 {
    fn window_popcount(&self, w: DigitWindow) -> u64 {
        window_popcount_u128(*self as u128, w)
    }

    fn base_digit_sum(&self, q: u64) -> u64 {
        (*self as u128).base_digit_sum(q)
    }

    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Natural for BigUint {
    fn window_popcount(&self, w: DigitWindow) -> u64 {
        if w.is_empty() {
            return 0;
        }
        let bits = self.bits();
        let hi = w.hi.min(bits);
        if w.lo >= hi {
            return 0;
        }
        let words = self.to_u64_digits();
        let mut total = 0u64;
        let (first, last) = (w.lo / 64, (hi - 1) / 64);
        for k in first..=last {
            let mut word = words[k as usize];
            let base = k * 64;
            if w.lo > base {
                word >>= w.lo - base;
                word <<= w.lo - base;
            }
            if hi < base + 64 {
                word &= (1u64 << (hi - base)) - 1;
            }
            total += word.count_ones() as u64;
        }
        total
    }

    fn base_digit_sum(&self, q: u64) -> u64 {
        if q == 2 {
            return self.count_ones();
        }
        if let Some(small) = self.to_u128() {
            return small.base_digit_sum(q);
        }
        let qb = BigUint::from(q);
        let mut n = self.clone();
        let mut s = 0u64;
        while !n.is_zero() {
            let r = &n % &qb;
            s += r.to_u64().unwrap_or(0);
            n /= &qb;
        }
        s
    }

    fn to_biguint(&self) -> BigUint {
        self.clone()
    }
}

/// Sum of base-`q` digits `s_q(n)`.
pub fn digit_sum<N: Natural + ?Sized>(n: &N, q: u64) -> Result<u64> {
    if q < 2 {
        return Err(Error::InvalidBase(q));
    }
    Ok(n.base_digit_sum(q))
}

/// Truncated binary digit sum `s^{[lo,hi)}(n)`.
pub fn windowed_digit_sum<N: Natural + ?Sized>(n: &N, w: DigitWindow) -> u64 {
    n.window_popcount(w)
}

/// `t(n) = s_2(n) mod 2`.
pub fn thue_morse<N: Natural + ?Sized>(n: &N) -> u8 {
    (n.window_popcount(DigitWindow::full()) & 1) as u8
}

/// Polynomial along which the Thue–Morse sequence is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Poly {
    Identity,
    Square,
    Cube,
}

/// `n^3` exactly for `n < 2^42`.
#[inline]
pub fn cube_u128(n: u64) -> u128 {
    let n = n as u128;
    n * n * n
}

/// `t(P(n))`.
pub fn thue_morse_along(poly: Poly, n: u64) -> u8 {
    match poly {
        Poly::Identity => (n.count_ones() & 1) as u8,
        Poly::Square => {
            let v = n as u128 * n as u128;
            (v.count_ones() & 1) as u8
        }
        Poly::Cube if n < 1 << 42 => (cube_u128(n).count_ones() & 1) as u8,
        Poly::Cube => {
            let b = BigUint::from(n);
            thue_morse(&(&b * &b * &b))
        }
    }
}

/// Number of `n` in `[lo, hi)` with `t(n^3) = 0`.
pub fn count_tm_cube_zeros_range(lo: u64, hi: u64) -> u64 {
    const CHUNK: u64 = 1 << 16;
    if hi <= lo {
        return 0;
    }
    let chunks = (hi - lo).div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let a = lo + k * CHUNK;
            let b = (a + CHUNK).min(hi);
            (a..b).filter(|&n| thue_morse_along(Poly::Cube, n) == 0).count() as u64
        })
        .sum()
}

/// `#{n < x : t(n^3) = 0}`.
pub fn count_tm_cube_zeros(x: u64) -> u64 {
    count_tm_cube_zeros_range(0, x)
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `ν_p(n!) = (n − s_p(n)) / (p − 1)`.
pub fn legendre_valuation(n: u64, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::arg(format!("{p} is not prime")));
    }
    Ok((n - n.base_digit_sum(p)) / (p - 1))
}

/// Number of borrows in the base-`p` subtraction `n − t`.
pub fn kummer_carries(n: u64, t: u64, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::arg(format!("{p} is not prime")));
    }
    if t > n {
        return Err(Error::arg(format!("t = {t} exceeds n = {n}")));
    }
    let (mut a, mut b, mut borrow, mut count) = (n, t, 0u64, 0u64);
    while a > 0 || b > 0 {
        let (da, db) = (a % p, b % p + borrow);
        if da < db {
            borrow = 1;
            count += 1;
        } else {
            borrow = 0;
        }
        a /= p;
        b /= p;
    }
    Ok(count)
}

/// Result of the carry counting oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct CarryCount {
    pub count: u64,
    /// Bound as numerator/denominator; `None` when `A = 0`.
    pub bound: Option<(BigUint, BigUint)>,
    /// The same bound with `(B³−A³)` in place of `(B−A)B²`, as the counting argument gives.
    pub cubic_bound: Option<(BigUint, BigUint)>,
}

impl CarryCount {
    pub fn bound_f64(&self) -> Option<f64> {
        self.bound.as_ref().map(|(num, den)| ratio_f64(num, den))
    }

    /// Exact check `count ≤ bound`; `None` when the bound is undefined.
    pub fn within_bound(&self) -> Option<bool> {
        self.bound.as_ref().map(|(num, den)| BigUint::from(self.count) * den <= *num)
    }

    pub fn cubic_bound_f64(&self) -> Option<f64> {
        self.cubic_bound.as_ref().map(|(num, den)| ratio_f64(num, den))
    }

    /// Exact check `count ≤ cubic_bound`.
    pub fn within_cubic_bound(&self) -> Option<bool> {
        self.cubic_bound.as_ref().map(|(num, den)| BigUint::from(self.count) * den <= *num)
    }
}

pub(crate) fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    let shift = num.bits().max(den.bits()).saturating_sub(1000);
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

fn high_part(n: &BigUint, lambda: u32) -> BigUint {
    n >> lambda
}

/// Counts `n ∈ [A,B)` with `⌊n³/2^λ⌋ ≠ ⌊(n+r)³/2^λ⌋` and evaluates
/// `((B−A)B²/2^λ + 1)·((3B²r + 3Br² + r³)/(3A²) + 1)`, together with the variant
/// whose first factor is `(B³−A³)/2^λ + 1`.
pub fn carry_count(a: u64, b: u64, r: u64, lambda: u32) -> Result<CarryCount> {
    if a > b {
        return Err(Error::InvalidRange(format!("A = {a} > B = {b}")));
    }
    let count = if r == 0 {
        0
    } else if b.checked_add(r).is_some_and(|top| top < 1 << 42) {
        (a..b)
            .into_par_iter()
            .filter(|&n| {
                let (x, y) = (cube_u128(n), cube_u128(n + r));
                if lambda >= 128 {
                    false
                } else {
                    x >> lambda != y >> lambda
                }
            })
            .count() as u64
    } else {
        (a..b)
            .into_par_iter()
            .filter(|&n| {
                let x = BigUint::from(n);
                let y = BigUint::from(n) + r;
                high_part(&(&x * &x * &x), lambda) != high_part(&(&y * &y * &y), lambda)
            })
            .count() as u64
    };
    let (bound, cubic_bound) = if a == 0 {
        (None, None)
    } else {
        let (ab, bb, rb) = (BigUint::from(a), BigUint::from(b), BigUint::from(r));
        let p2 = BigUint::from(1u8) << lambda;
        let first_num = (&bb - &ab) * &bb * &bb + &p2;
        let cubic_num = &bb * &bb * &bb - &ab * &ab * &ab + &p2;
        let three_a2 = BigUint::from(3u8) * &ab * &ab;
        let second_num =
            BigUint::from(3u8) * &bb * &bb * &rb + BigUint::from(3u8) * &bb * &rb * &rb + &rb * &rb * &rb + &three_a2;
        let den = &p2 * &three_a2;
        (Some((first_num * &second_num, den.clone())), Some((cubic_num * second_num, den)))
    };
    Ok(CarryCount { count, bound, cubic_bound })
}
