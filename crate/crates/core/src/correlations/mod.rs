//! Exponential and correlation sums built on the binary sum-of-digits function.
//!
//! Every factor of the form `e(k/2)` is evaluated as a parity sign, so the
//! ±1-valued sums below are exact integers before the final normalisation.

mod gowers;
mod s8;
mod vdc;

pub use gowers::{
    gowers_norm, gowers_norm_autocorrelation, gowers_norm_direct, gowers_norm_fourier, gowers_norm_recursive,
};
pub use s8::{
    admissible_specs, linearized_slopes, low_digits_cancel, random_specs, s8_defining, s8_full_window, s8_linearized,
    shifts_admissible, CorrelationSpec, LinearizedSlopes,
};
pub use vdc::{
    fit_iterated_constant, vdc_generalized_check, vdc_iterated_check, vdc_mr_check, IteratedCheck, VdcCheck,
};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::digits::{cube_u128, window_popcount_u128, DigitWindow};
use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum_c, parity_sign};
use crate::trig::{e_of, geometric_sum};

const S0_GUARD: u32 = 34;
const CHUNK: u64 = 1 << 14;

/// `frac(n·ξ)` with the rounding error of the product folded back in.
fn frac_mul(n: u64, xi: f64) -> f64 {
    let nf = n as f64;
    let p = nf * xi;
    let err = nf.mul_add(xi, -p);
    let f = (p - p.floor()) + err;
    f - f.floor()
}

#[inline]
fn cube_sign(n: u64) -> i64 {
    parity_sign(cube_u128(n).count_ones() as u64)
}

/// `S₀(ν, ξ) = 2^{-ν} Σ_{n<2^ν} e(½ s(n³) + nξ)`.
pub fn s0(nu: u32, xi: f64) -> Result<Complex64> {
    if nu > S0_GUARD {
        return Err(Error::guard(format!("nu = {nu} exceeds {S0_GUARD}")));
    }
    let total = 1u64 << nu;
    let scale = (-(nu as f64)).exp2();
    if xi == 0.0 {
        let sum: i64 = (0..total.div_ceil(CHUNK))
            .into_par_iter()
            .map(|k| (k * CHUNK..((k + 1) * CHUNK).min(total)).map(cube_sign).sum::<i64>())
            .sum();
        return Ok(Complex64::new(sum as f64 * scale, 0.0));
    }
    let parts: Vec<Complex64> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|k| {
            let terms: Vec<Complex64> = (k * CHUNK..((k + 1) * CHUNK).min(total))
                .map(|n| e_of(frac_mul(n, xi)) * cube_sign(n) as f64)
                .collect();
            pairwise_sum_c(&terms)
        })
        .collect();
    Ok(pairwise_sum_c(&parts) * scale)
}

/// `|S₀(ν, k/G)|` for all `k < G`, by folding the signs mod `G` and one FFT.
pub fn s0_grid_moduli(nu: u32, grid: usize) -> Result<Vec<f64>> {
    if nu > S0_GUARD {
        return Err(Error::guard(format!("nu = {nu} exceeds {S0_GUARD}")));
    }
    if grid == 0 || grid > 1 << 24 {
        return Err(Error::guard(format!("xi grid {grid} outside 1..=2^24")));
    }
    let total = 1u64 << nu;
    let g = grid as u64;
    let blocks = total.div_ceil(g);
    let folded: Vec<i64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![0i64; grid];
            let lo = b * g;
            for n in lo..(lo + g).min(total) {
                acc[(n - lo) as usize] += cube_sign(n);
            }
            acc
        })
        .reduce(
            || vec![0i64; grid],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let mut buf: Vec<Complex64> = folded.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect();
    // inverse transform carries the e(+nk/G) convention
    FftPlanner::new().plan_fft_inverse(grid).process(&mut buf);
    let scale = (-(nu as f64)).exp2();
    Ok(buf.iter().map(|c| c.norm() * scale).collect())
}

/// `F(λ, h, M) = Σ_{M≤n<2M} e(h n³ / 2^λ)`.
pub fn cube_weyl_sum(lambda: u32, h: i64, m: u64) -> Result<Complex64> {
    if m > 1 << 26 {
        return Err(Error::guard(format!("M = {m} exceeds 2^26")));
    }
    if lambda > 128 {
        return Err(Error::guard(format!("lambda = {lambda} exceeds 128")));
    }
    if lambda == 0 || h == 0 {
        return Ok(Complex64::new(m as f64, 0.0));
    }
    let mask = if lambda == 128 { u128::MAX } else { (1u128 << lambda) - 1 };
    let hm = (h as i128 as u128) & mask;
    let den = (lambda as f64).exp2();
    let parts: Vec<Complex64> = (0..m.div_ceil(CHUNK))
        .into_par_iter()
        .map(|k| {
            let lo = m + k * CHUNK;
            let terms: Vec<Complex64> = (lo..(lo + CHUNK).min(2 * m))
                .map(|n| {
                    let num = hm.wrapping_mul(cube_u128(n)) & mask;
                    e_of(num as f64 / den)
                })
                .collect();
            pairwise_sum_c(&terms)
        })
        .collect();
    Ok(pairwise_sum_c(&parts))
}

/// `K(μ,a,b,α,β) = 2^{-μ} Σ_{n<2^μ} Π_{j<4} e(½ s^{[a,b)}(nα_j + β_j))`.
pub fn fourfold_correlation(mu: u32, a: u64, b: u64, alpha: [u64; 4], beta: [u64; 4]) -> Result<f64> {
    if mu > 26 {
        return Err(Error::guard(format!("mu = {mu} exceeds 26")));
    }
    let w = DigitWindow::new(a, b)?;
    let total = 1u64 << mu;
    let sum: i64 = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|k| {
            (k * CHUNK..((k + 1) * CHUNK).min(total))
                .map(|n| {
                    let s: u64 =
                        (0..4).map(|j| window_popcount_u128(n as u128 * alpha[j] as u128 + beta[j] as u128, w)).sum();
                    parity_sign(s)
                })
                .sum::<i64>()
        })
        .sum();
    Ok(sum as f64 / total as f64)
}

/// `T = 2^{-ζ} Σ_{n₀₀<2^ζ} e(h (n₀₁2^ζ + n₀₀ + εr)² / 2^a)`.
pub fn quadratic_phase_sum(n_ol: u64, eps: u8, r: u64, a: u32, h: i64, zeta: u32) -> Result<Complex64> {
    if zeta > 24 {
        return Err(Error::guard(format!("zeta = {zeta} exceeds 24")));
    }
    if a > 128 {
        return Err(Error::guard(format!("a = {a} exceeds 128")));
    }
    if eps > 1 {
        return Err(Error::arg("epsilon must be 0 or 1"));
    }
    if a == 0 || h == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mask = if a == 128 { u128::MAX } else { (1u128 << a) - 1 };
    let hm = (h as i128 as u128) & mask;
    let base = ((n_ol as u128) << zeta).wrapping_add(eps as u128 * r as u128);
    let den = (a as f64).exp2();
    let terms: Vec<Complex64> = (0..1u128 << zeta)
        .map(|n| {
            let x = base.wrapping_add(n);
            let num = hm.wrapping_mul(x.wrapping_mul(x)) & mask;
            e_of(num as f64 / den)
        })
        .collect();
    Ok(pairwise_sum_c(&terms) * (-(zeta as f64)).exp2())
}

/// A dyadic rational `num / 2^exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Dyadic {
    num: i128,
    exp: u32,
}

impl Dyadic {
    fn value(self) -> f64 {
        self.num as f64 * (-(self.exp as f64)).exp2()
    }

    fn frac(self) -> f64 {
        if self.exp >= 127 {
            return self.value() - self.value().floor();
        }
        let m = 1i128 << self.exp;
        self.num.rem_euclid(m) as f64 / m as f64
    }

    fn add(self, o: Dyadic) -> Option<Dyadic> {
        let e = self.exp.max(o.exp);
        let a = self.num.checked_mul(1i128.checked_shl(e - self.exp)?)?;
        let b = o.num.checked_mul(1i128.checked_shl(e - o.exp)?)?;
        Some(Dyadic { num: a.checked_add(b)?, exp: e })
    }
}

/// The linear phases of the S₈ reduction and their geometric-sum moduli.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Phases {
    pub x: f64,
    pub f: f64,
    pub k: f64,
    pub k_prime: f64,
    /// `|φ_H(K)|`.
    pub phi_k: f64,
    /// `|φ_H(K′)|`.
    pub phi_k_prime: f64,
}

fn checked(v: Option<i128>) -> Result<i128> {
    v.ok_or_else(|| Error::guard("phase numerator exceeds 127 bits"))
}

/// `x = 6n₀(s₀−s₁)m/2^{λ−2τ}`, `f = (3n₀²(s₀−s₁)m + 3n₀(s₀²−s₁²)m²2^τ)/2^{λ−τ}`,
/// `K′ = f + n₁₀x` and `K = K′` at `n₀₀ = 0` written as its three-term sum.
pub fn linearized_phases(spec: &CorrelationSpec, lambda: u32, h: u64) -> Result<Phases> {
    spec.check_stack(lambda)?;
    let (tau, zeta) = (spec.tau, spec.zeta);
    let n0 = ((spec.n_ol as i128) << zeta) + spec.n_oo as i128;
    let (s0, s1, m) = (spec.s_o as i128, spec.s_l as i128, spec.m as i128);
    let ds = s0 - s1;
    let ds2 = s0 * s0 - s1 * s1;
    let nlo = spec.n_lo as i128;
    let nol = spec.n_ol as i128;
    let x = Dyadic { num: checked((6 * n0).checked_mul(ds * m))?, exp: lambda - 2 * tau };
    let f1 = checked((3 * n0).checked_mul(n0).and_then(|v| v.checked_mul(ds * m)))?;
    let f2 = checked(
        (3 * n0).checked_mul(ds2).and_then(|v| v.checked_mul(m * m)).and_then(|v| v.checked_mul(1i128 << tau)),
    )?;
    let f = Dyadic { num: checked(f1.checked_add(f2))?, exp: lambda - tau };
    let nx = Dyadic { num: checked(x.num.checked_mul(nlo))?, exp: x.exp };
    let kp = nx.add(f).ok_or_else(|| Error::guard("phase numerator exceeds 127 bits"))?;
    let k_terms = [
        Dyadic { num: checked((nlo * 6 * nol).checked_mul(ds * m))?, exp: lambda - 2 * tau - zeta },
        Dyadic { num: checked((3 * nol * nol).checked_mul(ds * m))?, exp: lambda - tau - 2 * zeta },
        Dyadic { num: checked((3 * nol).checked_mul(ds2 * m * m))?, exp: lambda - 2 * tau - zeta },
    ];
    let k = k_terms[0]
        .add(k_terms[1])
        .and_then(|v| v.add(k_terms[2]))
        .ok_or_else(|| Error::guard("phase numerator exceeds 127 bits"))?;
    Ok(Phases {
        x: x.value(),
        f: f.value(),
        k: k.value(),
        k_prime: kp.value(),
        phi_k: geometric_sum(h, k.frac()).norm(),
        phi_k_prime: geometric_sum(h, kp.frac()).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s0_small() {
        assert!((s0(0, 0.3).unwrap() - 1.0).norm() < 1e-15);
        assert_eq!(s0(3, 0.0).unwrap().re, 0.25);
        assert!(s0(35, 0.0).is_err());
    }

    #[test]
    fn fourfold_trivial() {
        assert_eq!(fourfold_correlation(4, 0, 3, [1; 4], [0; 4]).unwrap(), 1.0);
        assert_eq!(fourfold_correlation(5, 2, 2, [3, 5, 7, 9], [1; 4]).unwrap(), 1.0);
        assert_eq!(fourfold_correlation(5, 0, 9, [0; 4], [0; 4]).unwrap(), 1.0);
    }

    #[test]
    fn weyl_trivial() {
        assert_eq!(cube_weyl_sum(0, 5, 9).unwrap().re, 9.0);
        assert_eq!(cube_weyl_sum(7, 0, 9).unwrap().re, 9.0);
    }
}
