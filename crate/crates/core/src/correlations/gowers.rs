//! Gowers uniformity norms of `n ↦ e(½ s^{[0,ρ)}(n))` on `ℤ/2^ρℤ`.
//!
//! Every path returns the normalised `2^Q`-th power `‖t‖_{U^Q}^{2^Q}`.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

const DIRECT_GUARD: u32 = 30;
const RECURSIVE_GUARD: u32 = 34;
const MAX_RHO: u32 = 24;

/// An `N`-bit set with `N = 2^ρ`, bit `n` holding `s(n) mod 2`.
#[derive(Clone)]
struct Bits {
    n: usize,
    words: Vec<u64>,
}

impl Bits {
    fn thue_morse(rho: u32) -> Self {
        let n = 1usize << rho;
        let mut words = vec![0u64; n.div_ceil(64)];
        for i in 0..n {
            if i.count_ones() & 1 == 1 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Bits { n, words }
    }

    fn get(&self, i: usize) -> u64 {
        self.words[i / 64] >> (i % 64) & 1
    }

    /// The set `n ↦ self[(n + k) mod N]`.
    fn rotate(&self, k: usize) -> Bits {
        let k = k % self.n;
        if self.n < 64 {
            let mask = (1u64 << self.n) - 1;
            let w = self.words[0];
            let r = if k == 0 { w } else { (w >> k | w << (self.n - k)) & mask };
            return Bits { n: self.n, words: vec![r] };
        }
        let len = self.words.len();
        let (q, s) = (k / 64, k % 64);
        let words = (0..len)
            .map(|i| {
                let lo = self.words[(i + q) % len];
                if s == 0 {
                    lo
                } else {
                    lo >> s | self.words[(i + q + 1) % len] << (64 - s)
                }
            })
            .collect();
        Bits { n: self.n, words }
    }

    fn xor(&self, other: &Bits) -> Bits {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        Bits { n: self.n, words }
    }

    fn ones(&self) -> i64 {
        self.words.iter().map(|w| w.count_ones() as i64).sum()
    }

    /// `Σ_n (−1)^{bit n}`.
    fn signed_sum(&self) -> i64 {
        self.n as i64 - 2 * self.ones()
    }

    /// `Δ_h`: the set of `bit(n) ⊕ bit(n + h)`.
    fn derivative(&self, h: usize) -> Bits {
        self.xor(&self.rotate(h))
    }
}

fn check_rho(rho: u32) -> Result<()> {
    if rho > MAX_RHO {
        return Err(Error::guard(format!("rho = {rho} exceeds {MAX_RHO}")));
    }
    Ok(())
}

/// Applies the derivatives indexed by the base-`N` digits of `idx`.
fn derive_along(base: &Bits, idx: u64, dims: u32, rho: u32) -> Bits {
    let mask = (1u64 << rho) - 1;
    (0..dims).fold(base.clone(), |g, j| g.derivative((idx >> (j * rho) & mask) as usize))
}

/// Direct summation over all `(r, n)` with bit-parallel parity.
pub fn gowers_norm_direct(rho: u32, q: u32) -> Result<f64> {
    check_rho(rho)?;
    if q == 0 {
        return Err(Error::arg("Q must be at least 1"));
    }
    if (q + 1) * rho > DIRECT_GUARD {
        return Err(Error::guard(format!("2^((Q+1)rho) = 2^{} exceeds 2^{DIRECT_GUARD}", (q + 1) * rho)));
    }
    let t = Bits::thue_morse(rho);
    let outer = 1u64 << ((q - 1) * rho);
    let total: i64 = (0..outer)
        .into_par_iter()
        .map(|idx| {
            let g = derive_along(&t, idx, q - 1, rho);
            (0..g.n).map(|h| g.derivative(h).signed_sum()).sum::<i64>()
        })
        .sum();
    Ok(total as f64 * (-(((q + 1) * rho) as f64)).exp2())
}

/// `Σ_a c(a)² / N³` with `c(a) = Σ_n f(n) f(n+a)` computed exactly; `Q = 2` only.
pub fn gowers_norm_autocorrelation(rho: u32) -> Result<f64> {
    check_rho(rho)?;
    if 3 * rho > RECURSIVE_GUARD + 2 {
        return Err(Error::guard("autocorrelation too large"));
    }
    let t = Bits::thue_morse(rho);
    let total: i128 = (0..t.n)
        .into_par_iter()
        .map(|a| {
            let c = t.derivative(a).signed_sum() as i128;
            c * c
        })
        .sum();
    Ok(total as f64 * (-(3.0 * rho as f64)).exp2())
}

/// `Σ_h |f̂(h)|⁴` with `f̂(h) = N^{-1} Σ_n f(n) e(−hn/N)`; `Q = 2` only.
pub fn gowers_norm_fourier(rho: u32) -> Result<f64> {
    check_rho(rho)?;
    let n = 1usize << rho;
    let mut buf: Vec<Complex64> =
        (0..n).map(|i| Complex64::new(if i.count_ones() & 1 == 1 { -1.0 } else { 1.0 }, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let quartics: Vec<f64> = buf.iter().map(|c| (c.norm_sqr() * scale * scale).powi(2)).collect();
    Ok(pairwise_sum(&quartics))
}

/// Exact autocorrelation energy `Σ_a c(a)²` of a ±1 bitset via FFT; entries are
/// rounded back to the integers they must be.
fn energy(g: &Bits, planner: &mut FftPlanner<f64>) -> i128 {
    let n = g.n;
    let mut buf: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 - 2.0 * g.get(i) as f64, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex64::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter()
        .map(|c| {
            let v = (c.re / n as f64).round() as i128;
            v * v
        })
        .sum()
}

/// `U^Q(f) = E_{h ∈ (ℤ/N)^{Q−2}} U²(Δ_{h} f)` with the inner `U²` evaluated by an exact
/// FFT autocorrelation; `Q ≥ 2`.
pub fn gowers_norm_recursive(rho: u32, q: u32) -> Result<f64> {
    check_rho(rho)?;
    if q < 2 {
        return Err(Error::arg("recursive path needs Q >= 2"));
    }
    if (q - 1) * rho > RECURSIVE_GUARD {
        return Err(Error::guard(format!("2^((Q-1)rho) = 2^{} exceeds 2^{RECURSIVE_GUARD}", (q - 1) * rho)));
    }
    let t = Bits::thue_morse(rho);
    let outer = 1u64 << ((q - 2) * rho);
    let chunk = 64u64;
    let total: i128 = (0..outer.div_ceil(chunk))
        .into_par_iter()
        .map(|k| {
            let mut planner = FftPlanner::new();
            (k * chunk..((k + 1) * chunk).min(outer))
                .map(|idx| energy(&derive_along(&t, idx, q - 2, rho), &mut planner))
                .sum::<i128>()
        })
        .sum();
    Ok(total as f64 * (-(((q + 1) * rho) as f64)).exp2())
}

/// `‖t‖_{U^Q(ℤ/2^ρℤ)}^{2^Q}`, dispatching to the cheapest exact path.
pub fn gowers_norm(rho: u32, q: u32) -> Result<f64> {
    if q == 0 {
        return Err(Error::arg("Q must be at least 1"));
    }
    check_rho(rho)?;
    if rho == 0 {
        return Ok(1.0);
    }
    match q {
        // Σ_n f(n) = 0 for ρ ≥ 1
        1 => Ok(0.0),
        2 => gowers_norm_fourier(rho),
        _ if (q + 1) * rho <= DIRECT_GUARD => gowers_norm_direct(rho, q),
        _ => gowers_norm_recursive(rho, q),
    }
}
