//! Trigonometric primitives, Vaaler approximation and small inequality verifiers.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{dist_to_int, pairwise_sum, pairwise_sum_c};

/// `e(x) = exp(2πix)`, reduced mod 1 before evaluation.
pub fn e_of(x: f64) -> Complex64 {
    let f = x - x.floor();
    Complex64::from_polar(1.0, 2.0 * PI * f)
}

/// `e(k/q)` for integers, with the numerator reduced exactly.
pub fn e_frac(k: i128, q: u128) -> Complex64 {
    let r = k.rem_euclid(q as i128) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * r / q as f64)
}

/// Sawtooth `ψ(x) = x − ⌊x⌋ − 1/2`.
pub fn sawtooth(x: f64) -> f64 {
    x - x.floor() - 0.5
}

const GEOM_TOL: f64 = 1e-9;
const GEOM_DIRECT_MAX: u64 = 1 << 20;

/// `φ_H(t) = Σ_{0≤h<H} e(ht)`.
pub fn geometric_sum(h: u64, t: f64) -> Complex64 {
    let d = dist_to_int(t);
    if d > GEOM_TOL {
        let hf = h as f64;
        let ratio = (PI * hf * t).sin() / (PI * t).sin();
        return e_of((hf - 1.0) * t / 2.0) * ratio;
    }
    if h <= GEOM_DIRECT_MAX {
        let terms: Vec<Complex64> = (0..h).map(|k| e_of(k as f64 * t)).collect();
        return pairwise_sum_c(&terms);
    }
    // limit of the closed form as t → integer
    e_of((h as f64 - 1.0) * t / 2.0) * (h as f64)
}

/// Direct summation of `φ_H(t)`, used as a reference.
pub fn geometric_sum_direct(h: u64, t: f64) -> Complex64 {
    let terms: Vec<Complex64> = (0..h).map(|k| e_of(k as f64 * t)).collect();
    pairwise_sum_c(&terms)
}

/// `φ(t) = πt(1−|t|)cot(πt) + |t|` on `[−1,1]`, continuous at 0 and ±1.
pub fn vaaler_phi(t: f64) -> f64 {
    let a = t.abs();
    if a >= 1.0 {
        return 0.0;
    }
    let x = PI * t;
    let xcot = if a < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 3.0 - x2 * x2 / 45.0 - 2.0 * x2 * x2 * x2 / 945.0
    } else {
        x / x.tan()
    };
    xcot * (1.0 - a) + a
}

/// Values of the Vaaler polynomial, the Fejér envelope and the sawtooth at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VaalerValues {
    pub psi_h: f64,
    pub kappa_h: f64,
    pub psi: f64,
}

/// Fejér envelope `κ_H(t) = (1/2H) Σ_{|h|<H} (1 − |h|/H) e(ht)`.
pub fn fejer_kappa(h: u64, t: f64) -> f64 {
    let hf = h as f64;
    let mut terms = Vec::with_capacity(h as usize);
    terms.push(1.0);
    for k in 1..h {
        let kf = k as f64;
        terms.push(2.0 * (1.0 - kf / hf) * (2.0 * PI * kf * t).cos());
    }
    pairwise_sum(&terms) / (2.0 * hf)
}

/// Vaaler polynomial `ψ_H(t) = −Σ_{1≤|h|<H} (2πih)^{-1} φ(h/H) e(ht)`.
pub fn vaaler_psi_h(h: u64, t: f64) -> f64 {
    let hf = h as f64;
    let terms: Vec<f64> = (1..h)
        .map(|k| {
            let kf = k as f64;
            -vaaler_phi(kf / hf) * (2.0 * PI * kf * t).sin() / (PI * kf)
        })
        .collect();
    pairwise_sum(&terms)
}

pub fn vaaler_psi(h: u64, t: f64) -> Result<VaalerValues> {
    if h == 0 {
        return Err(Error::arg("H must be at least 1"));
    }
    Ok(VaalerValues { psi_h: vaaler_psi_h(h, t), kappa_h: fejer_kappa(h, t), psi: sawtooth(t) })
}

/// Fourier coefficients of the interval detector for `[α, β)` and its envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct VaalerCoefficients {
    pub h: u64,
    pub alpha: f64,
    pub beta: f64,
    /// `a_h(β−α, H)` for `h = −H+1 ..= H−1`.
    pub main: Vec<Complex64>,
    /// `b_h(α, β, H)` for `h = −H+1 ..= H−1`.
    pub kernel: Vec<Complex64>,
}

impl VaalerCoefficients {
    fn index(&self, k: i64) -> usize {
        (k + self.h as i64 - 1) as usize
    }

    pub fn a(&self, k: i64) -> Complex64 {
        self.main[self.index(k)]
    }

    pub fn b(&self, k: i64) -> Complex64 {
        self.kernel[self.index(k)]
    }

    fn freqs(&self) -> impl Iterator<Item = i64> {
        let hh = self.h as i64;
        -hh + 1..hh
    }

    /// `ψ_{α,β,H}(x) = Σ a_h e(h(x−α))`.
    pub fn detector(&self, x: f64) -> f64 {
        let terms: Vec<f64> = self.freqs().map(|k| (self.a(k) * e_of(k as f64 * (x - self.alpha))).re).collect();
        pairwise_sum(&terms)
    }

    /// `κ_{α,β,H}(x) = Σ b_h e(hx)`.
    pub fn envelope(&self, x: f64) -> f64 {
        let terms: Vec<f64> = self.freqs().map(|k| (self.b(k) * e_of(k as f64 * x)).re).collect();
        pairwise_sum(&terms)
    }
}

/// Indicator of `[α, β) + ℤ`.
pub fn interval_indicator(alpha: f64, beta: f64, x: f64) -> f64 {
    if beta - alpha >= 1.0 {
        return 1.0;
    }
    let y = (x - alpha) - (x - alpha).floor();
    if y < beta - alpha {
        1.0
    } else {
        0.0
    }
}

/// Coefficients `a_0 = δ`, `a_h = (2πih)^{-1} φ(h/H)(1 − e(−δh))` and
/// `b_h = (1/2H)(1 − |h|/H)(e(−hα) + e(−hβ))`.
///
/// The sign of `a_h` is the one for which
/// `δ + ψ_H(x−β) − ψ_H(x−α) = Σ a_h e(h(x−α))`.
pub fn interval_detector(alpha: f64, beta: f64, h: u64) -> Result<VaalerCoefficients> {
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) || alpha > beta {
        return Err(Error::arg(format!("need 0 <= alpha <= beta <= 1, got alpha = {alpha}, beta = {beta}")));
    }
    if h == 0 {
        return Err(Error::arg("H must be at least 1"));
    }
    let delta = beta - alpha;
    let hf = h as f64;
    let hh = h as i64;
    let mut main = Vec::with_capacity(2 * h as usize - 1);
    let mut kernel = Vec::with_capacity(2 * h as usize - 1);
    for k in -hh + 1..hh {
        let kf = k as f64;
        let a = if k == 0 {
            Complex64::new(delta, 0.0)
        } else {
            let factor = Complex64::new(0.0, 2.0 * PI * kf).inv() * vaaler_phi(kf / hf);
            factor * (Complex64::new(1.0, 0.0) - e_of(-delta * kf))
        };
        let weight = (1.0 - kf.abs() / hf) / (2.0 * hf);
        main.push(a);
        kernel.push((e_of(-kf * alpha) + e_of(-kf * beta)) * weight);
    }
    Ok(VaalerCoefficients { h, alpha, beta, main, kernel })
}

/// Both sides of `Σ_h |Σ_m a_m e(−hm/M)|² = M Σ |a_m|²`.
pub fn large_sieve_equality(a: &[Complex64]) -> Result<(f64, f64)> {
    if a.is_empty() {
        return Err(Error::arg("empty vector"));
    }
    let m = a.len();
    let lhs_terms: Vec<f64> = (0..m)
        .map(|h| {
            let terms: Vec<Complex64> =
                a.iter().enumerate().map(|(j, &x)| x * e_frac(-((h * j % m) as i128), m as u128)).collect();
            pairwise_sum_c(&terms).norm_sqr()
        })
        .collect();
    let sq: Vec<f64> = a.iter().map(|x| x.norm_sqr()).collect();
    Ok((pairwise_sum(&lhs_terms), m as f64 * pairwise_sum(&sq)))
}

/// `Σ a_m b_m` directly and via `b_0 Σ a_m + Σ_{ℓ≥1} (b_ℓ − b_{ℓ−1}) Σ_{m≥ℓ} a_m`.
pub fn summation_by_parts_check(a: &[Complex64], b: &[Complex64]) -> Result<(Complex64, Complex64)> {
    if a.len() != b.len() {
        return Err(Error::arg(format!("length mismatch: {} vs {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    let direct: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let mut tails = vec![Complex64::new(0.0, 0.0); a.len() + 1];
    for m in (0..a.len()).rev() {
        tails[m] = tails[m + 1] + a[m];
    }
    let mut terms = vec![b[0] * tails[0]];
    for l in 1..a.len() {
        terms.push((b[l] - b[l - 1]) * tails[l]);
    }
    Ok((pairwise_sum_c(&direct), pairwise_sum_c(&terms)))
}

/// Outcome of the summation-range extension check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeExtension {
    pub lhs: f64,
    pub rhs: f64,
    pub quad_error: f64,
}

impl RangeExtension {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + self.quad_error + 1e-9 * self.lhs.max(1.0)
    }
}

/// `|Σ_{x≤n<y} a_n|` against a trapezoid rule for
/// `∫₀¹ min(⌈y⌉−x, 1/(2‖ξ‖)) |Σ_{x≤n<z} a_n e(nξ)| dξ`, where `a` is indexed from `x`.
///
/// The reported error bound is `L/(4N)` with `L` a Lipschitz constant of the integrand.
pub fn range_extension_check(a: &[Complex64], x: i64, y: f64, quad_points: usize) -> Result<RangeExtension> {
    let z = x + a.len() as i64;
    if y < x as f64 || y > z as f64 {
        return Err(Error::arg(format!("y = {y} outside [{x}, {z}]")));
    }
    if quad_points < 1000 {
        return Err(Error::arg("need at least 1000 quadrature points"));
    }
    let head: Vec<Complex64> =
        a.iter().enumerate().filter(|(k, _)| ((x + *k as i64) as f64) < y).map(|(_, v)| *v).collect();
    let lhs = pairwise_sum_c(&head).norm();
    let cap = (y.ceil() - x as f64).max(0.0);
    let integrand = |xi: f64| {
        let d = dist_to_int(xi);
        let weight = if d == 0.0 { cap } else { cap.min(1.0 / (2.0 * d)) };
        if weight == 0.0 {
            return 0.0;
        }
        let terms: Vec<Complex64> = a.iter().enumerate().map(|(k, v)| v * e_of(k as f64 * xi)).collect();
        weight * pairwise_sum_c(&terms).norm()
    };
    let n = quad_points;
    let step = 1.0 / n as f64;
    let mut vals: Vec<f64> = (0..=n).map(|k| integrand(k as f64 * step)).collect();
    vals[0] *= 0.5;
    vals[n] *= 0.5;
    let rhs = pairwise_sum(&vals) * step;
    let a1: f64 = a.iter().map(|v| v.norm()).sum();
    let moment: f64 = a.iter().enumerate().map(|(k, v)| k as f64 * v.norm()).sum();
    let lipschitz = 2.0 * cap * cap * a1 + cap * 2.0 * PI * moment;
    Ok(RangeExtension { lhs, rhs, quad_error: lipschitz * step / 4.0 })
}

/// `|Σ f g|` against `Σ_P sup_P |f| · sup_P Σ_P |g|` for a partition of the index set.
pub fn holder_partition_check(f: &[Complex64], g: &[Complex64], partition: &[Vec<usize>]) -> Result<(f64, f64)> {
    if f.len() != g.len() {
        return Err(Error::arg("f and g differ in length"));
    }
    let mut seen = vec![false; f.len()];
    for part in partition {
        if part.is_empty() {
            return Err(Error::arg("empty block in partition"));
        }
        for &i in part {
            if i >= f.len() || seen[i] {
                return Err(Error::arg(format!("index {i} out of range or repeated")));
            }
            seen[i] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::arg("partition does not cover the index set"));
    }
    let prods: Vec<Complex64> = f.iter().zip(g).map(|(x, y)| x * y).collect();
    let lhs = pairwise_sum_c(&prods).norm();
    let sup_f: Vec<f64> = partition.iter().map(|p| p.iter().map(|&i| f[i].norm()).fold(0.0, f64::max)).collect();
    let sup_g = partition.iter().map(|p| p.iter().map(|&i| g[i].norm()).sum::<f64>()).fold(0.0, f64::max);
    Ok((lhs, pairwise_sum(&sup_f) * sup_g))
}
