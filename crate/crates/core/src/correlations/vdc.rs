use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, pairwise_sum_c};

/// Both sides of a van der Corput type inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VdcCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Imaginary part of the correlation sum; zero up to rounding.
    pub rhs_imag: f64,
}

impl VdcCheck {
    pub fn holds(&self) -> bool {
        let scale = self.lhs.abs().max(self.rhs.abs()).max(1.0);
        self.rhs >= -1e-9 * scale
            && self.rhs_imag.abs() <= 1e-9 * scale
            && self.lhs <= self.rhs * (1.0 + 1e-9) + 1e-9 * scale
    }
}

/// `|Σ x_n|²` against
/// `(M + max S − min S)/|S|² · Σ_{s₀,s₁∈S} Σ_{n∈(I−s₀)∩(I−s₁)} x_{n+s₀} conj(x_{n+s₁})`
/// with `I = [0, M)`.
pub fn vdc_generalized_check(x: &[Complex64], s: &[i64]) -> Result<VdcCheck> {
    let mut set: Vec<i64> = s.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.is_empty() {
        return Err(Error::arg("empty shift set"));
    }
    let m = x.len() as i64;
    let lhs = pairwise_sum_c(x).norm_sqr();
    let mut terms = Vec::with_capacity(set.len() * set.len());
    for &s0 in &set {
        for &s1 in &set {
            // n + s0 and n + s1 both in [0, M)
            let lo = (-s0).max(-s1);
            let hi = (m - s0).min(m - s1);
            let inner: Vec<Complex64> = (lo..hi).map(|n| x[(n + s0) as usize] * x[(n + s1) as usize].conj()).collect();
            terms.push(pairwise_sum_c(&inner));
        }
    }
    let span = (m + set[set.len() - 1] - set[0]) as f64;
    let total = pairwise_sum_c(&terms) * (span / (set.len() * set.len()) as f64);
    Ok(VdcCheck { lhs, rhs: total.re, rhs_imag: total.im })
}

/// `|Σ z_n|²` against
/// `(N + M(R−1))/R · Σ_{|r|<R} (1 − |r|/R) Σ_{n∈I∩(I−Mr)} z_n conj(z_{n+Mr})`.
pub fn vdc_mr_check(z: &[Complex64], m: u64, r: u64) -> Result<VdcCheck> {
    if m == 0 || r == 0 {
        return Err(Error::arg("M and R must be at least 1"));
    }
    let n = z.len() as i64;
    let lhs = pairwise_sum_c(z).norm_sqr();
    let rr = r as i64;
    let terms: Vec<Complex64> = (-rr + 1..rr)
        .map(|k| {
            let shift = m as i64 * k;
            let lo = 0.max(-shift);
            let hi = n.min(n - shift);
            let inner: Vec<Complex64> = (lo..hi).map(|j| z[j as usize] * z[(j + shift) as usize].conj()).collect();
            pairwise_sum_c(&inner) * (1.0 - k.unsigned_abs() as f64 / r as f64)
        })
        .collect();
    let factor = (n as f64 + (m * (r - 1)) as f64) / r as f64;
    let total = pairwise_sum_c(&terms) * factor;
    Ok(VdcCheck { lhs, rhs: total.re, rhs_imag: total.im })
}

/// Terms of the iterated inequality `lhs ≪ main + err`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IteratedCheck {
    /// `|mean g|^{2^Q}`.
    pub lhs: f64,
    /// `R^{-Q} Σ_{r ∈ {1..R−1}^Q} |K(r₀M₀, …, r_{Q−1}M_{Q−1})|`.
    pub main: f64,
    /// `(Σ M_ℓ)R/|J| + 1/R`.
    pub err: f64,
}

impl IteratedCheck {
    /// Smallest `C` with `lhs ≤ main + C·err`.
    pub fn constant(&self) -> f64 {
        ((self.lhs - self.main) / self.err).max(0.0)
    }
}

/// Largest fitted constant over a corpus of trials.
pub fn fit_iterated_constant(checks: &[IteratedCheck]) -> f64 {
    checks.iter().map(IteratedCheck::constant).fold(0.0, f64::max)
}

const ITER_GUARD: u128 = 1 << 30;

/// Multiplicative correlation `K(m)`: the mean over those `n ∈ J` whose whole
/// cube `n + ε·m` lies in `J` of `Π_ε C^{|ε|} g(n + ε·m)`, with `C` complex conjugation.
fn correlation(g: &[Complex64], shifts: &[usize]) -> Complex64 {
    let q = shifts.len();
    let reach: usize = shifts.iter().sum();
    if reach >= g.len() {
        return Complex64::new(0.0, 0.0);
    }
    let valid = g.len() - reach;
    let terms: Vec<Complex64> = (0..valid)
        .map(|n| {
            let mut p = Complex64::new(1.0, 0.0);
            for eps in 0..(1usize << q) {
                let off: usize = (0..q).filter(|&l| eps >> l & 1 == 1).map(|l| shifts[l]).sum();
                let v = g[n + off];
                p *= if eps.count_ones() % 2 == 1 { v.conj() } else { v };
            }
            p
        })
        .collect();
    pairwise_sum_c(&terms) / valid as f64
}

/// Evaluates the iterated van der Corput quantities for a unit-modulus `g` on `J = [0, |J|)`.
pub fn vdc_iterated_check(g: &[Complex64], ms: &[u64], r: u64) -> Result<IteratedCheck> {
    let q = ms.len();
    if q == 0 || q > 4 {
        return Err(Error::guard(format!("Q = {q} outside 1..=4")));
    }
    if r == 0 || g.is_empty() {
        return Err(Error::arg("need R >= 1 and nonempty g"));
    }
    let cost = ((r - 1).max(1) as u128).pow(q as u32) * g.len() as u128 * (1u128 << q);
    if cost > ITER_GUARD {
        return Err(Error::guard("iterated correlation too large"));
    }
    let mean = pairwise_sum_c(g) / g.len() as f64;
    let lhs = mean.norm().powi(1 << q);
    let mut ks = Vec::new();
    let mut idx = vec![1u64; q];
    if r > 1 {
        loop {
            let shifts: Vec<usize> = idx.iter().zip(ms).map(|(&a, &m)| (a * m) as usize).collect();
            ks.push(correlation(g, &shifts).norm());
            let mut k = 0;
            while k < q {
                idx[k] += 1;
                if idx[k] < r {
                    break;
                }
                idx[k] = 1;
                k += 1;
            }
            if k == q {
                break;
            }
        }
    }
    let main = pairwise_sum(&ks) / (r as f64).powi(q as i32);
    let msum: u64 = ms.iter().sum();
    let err = (msum * r) as f64 / g.len() as f64 + 1.0 / r as f64;
    Ok(IteratedCheck { lhs, main, err })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(n: usize) -> Vec<Complex64> {
        vec![Complex64::new(1.0, 0.0); n]
    }

    #[test]
    fn generalized_singleton_is_cauchy_schwarz() {
        let x = vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.3), Complex64::new(0.1, 0.0)];
        let c = vdc_generalized_check(&x, &[0]).unwrap();
        let ms: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        assert!((c.rhs - 3.0 * ms).abs() < 1e-12);
        assert!(c.holds());
        assert!(vdc_generalized_check(&x, &[]).is_err());
    }

    #[test]
    fn generalized_constant_two_shifts() {
        // pairs (0,0),(1,1): M each; (0,1),(1,0): M−1 each; factor (M+1)/4
        let m = 6;
        let c = vdc_generalized_check(&ones(m), &[0, 1]).unwrap();
        assert_eq!(c.lhs, 36.0);
        assert!((c.rhs - (7.0 / 4.0) * 22.0).abs() < 1e-12);
    }

    #[test]
    fn mr_r_one() {
        let z = vec![Complex64::new(0.3, -1.0), Complex64::new(2.0, 0.5)];
        let c = vdc_mr_check(&z, 3, 1).unwrap();
        let ms: f64 = z.iter().map(|v| v.norm_sqr()).sum();
        assert!((c.rhs - 2.0 * ms).abs() < 1e-12);
    }

    #[test]
    fn iterated_constant_one() {
        let c = vdc_iterated_check(&ones(64), &[1, 2], 4).unwrap();
        assert_eq!(c.lhs, 1.0);
        assert!((c.main - (3.0f64 / 4.0).powi(2)).abs() < 1e-12);
    }
}
