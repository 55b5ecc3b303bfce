//! Discrepancy on the torus, the Erdős–Turán–Koksma right-hand side and related averages.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{log_plus, pairwise_sum, pairwise_sum_c};
use crate::trig::e_of;

/// Points on `𝕋^d`, stored row-major with every coordinate in `[0,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusSequence {
    dim: usize,
    coords: Vec<f64>,
}

fn reduce(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl TorusSequence {
    pub fn new(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("dimension must be at least 1"));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::arg(format!("point of length {} in dimension {dim}", p.len())));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::arg("non-finite coordinate"));
            }
            coords.extend(p.iter().map(|&x| reduce(x)));
        }
        Ok(TorusSequence { dim, coords })
    }

    pub fn from_1d(points: &[f64]) -> Result<Self> {
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::arg("non-finite coordinate"));
        }
        Ok(TorusSequence { dim: 1, coords: points.iter().map(|&x| reduce(x)).collect() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact1d,
    GridSupremum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    /// Exact value in dimension 1, a lower bound otherwise.
    pub value: f64,
    /// `value` plus the grid padding; equal to `value` for the exact method.
    pub upper_bound: f64,
    pub method: Method,
    pub grid_resolution: u64,
    pub dim: usize,
    pub n: usize,
    pub etk_rhs: Option<f64>,
    pub h_used: Option<u64>,
}

/// Exact interval discrepancy of sorted points in `[0,1)`:
/// `1/N + max(i/N − y_i) − min(i/N − y_i)`.
pub fn discrepancy_sorted(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for (i, &v) in y.iter().enumerate() {
        let g = (i + 1) as f64 / n - v;
        hi = hi.max(g);
        lo = lo.min(g);
    }
    (1.0 / n + (hi - lo)).clamp(0.0, 1.0)
}

/// Exact one-dimensional discrepancy by sorting.
pub fn discrepancy_1d(points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::arg("empty sequence"));
    }
    let mut y: Vec<f64> = points.iter().map(|&x| reduce(x)).collect();
    y.sort_by(f64::total_cmp);
    Ok(discrepancy_sorted(&y))
}

/// Exact discrepancy of integer points `k_i / 2^e`.
pub fn discrepancy_dyadic(mut numerators: Vec<u64>, log2_den: u32) -> f64 {
    numerators.sort_unstable();
    let scale = (-(log2_den as f64)).exp2();
    let y: Vec<f64> = numerators.iter().map(|&k| k as f64 * scale).collect();
    discrepancy_sorted(&y)
}

/// `D̃_U(α) = D_U(0, α, 2α, …, (U−1)α)`.
pub fn orbit_discrepancy(alpha: f64, u: u64) -> f64 {
    let a = reduce(alpha);
    let pts: Vec<f64> = (0..u).map(|m| reduce(m as f64 * a)).collect();
    discrepancy_1d(&pts).unwrap_or(1.0)
}

/// `D̃_U(num / 2^e)` with exact modular reduction of the orbit.
pub fn orbit_discrepancy_dyadic(num: i128, log2_den: u32, u: u64) -> f64 {
    if log2_den == 0 {
        return 1.0;
    }
    let modulus = 1i128 << log2_den;
    let a = num.rem_euclid(modulus);
    let pts: Vec<u64> = (0..u as i128).map(|m| ((m * a) % modulus) as u64).collect();
    discrepancy_dyadic(pts, log2_den)
}

const GRID_GUARD: u128 = 1 << 30;

/// Supremum of `|#(box)/N − vol(box)|` over wrapped boxes with corners on the grid `k/G`.
pub fn discrepancy_grid(seq: &TorusSequence, g: u64) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::arg("empty sequence"));
    }
    if g == 0 {
        return Err(Error::arg("grid resolution must be at least 1"));
    }
    let d = seq.dim();
    let boxes = (g as u128).checked_pow(2 * d as u32).unwrap_or(u128::MAX);
    let cells = (2 * g as u128 + 1).checked_pow(d as u32).unwrap_or(u128::MAX);
    if boxes.saturating_mul(1 << d) > GRID_GUARD || cells > GRID_GUARD {
        return Err(Error::guard(format!("grid {g}^{d} too fine for the box search")));
    }
    let side = 2 * g as usize + 1;
    let mut strides = vec![1usize; d];
    for k in (0..d.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * side;
    }
    // prefix[i] counts points in cells with doubled index < i, one extra slot per axis
    let mut prefix = vec![0i64; side.pow(d as u32)];
    for i in 0..seq.len() {
        let p = seq.point(i);
        let cell: Vec<usize> = p.iter().map(|&x| ((x * g as f64) as usize).min(g as usize - 1)).collect();
        for copy in 0..(1usize << d) {
            let mut idx = 0;
            for k in 0..d {
                let c = cell[k] + if copy >> k & 1 == 1 { g as usize } else { 0 };
                idx += (c + 1) * strides[k];
            }
            prefix[idx] += 1;
        }
    }
    for k in 0..d {
        for idx in 0..prefix.len() {
            let coord = idx / strides[k] % side;
            if coord > 0 {
                prefix[idx] += prefix[idx - strides[k]];
            }
        }
    }
    let n = seq.len() as f64;
    let gf = g as f64;
    let per_axis = (g * g) as usize;
    let total = per_axis.pow(d as u32);
    let best = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let mut lo = vec![0usize; d];
            let mut len = vec![0usize; d];
            let mut vol = 1.0;
            for k in (0..d).rev() {
                let c = code % per_axis;
                code /= per_axis;
                lo[k] = c / g as usize;
                len[k] = c % g as usize + 1;
                vol *= len[k] as f64 / gf;
            }
            let mut count = 0i64;
            for corner in 0..(1usize << d) {
                let mut idx = 0;
                let mut sign = 1i64;
                for k in 0..d {
                    if corner >> k & 1 == 1 {
                        idx += (lo[k] + len[k]) * strides[k];
                    } else {
                        idx += lo[k] * strides[k];
                        sign = -sign;
                    }
                }
                count += sign * prefix[idx];
            }
            (count as f64 / n - vol).abs()
        })
        .reduce(|| 0.0, f64::max);
    Ok(best.min(1.0))
}

/// Discrepancy report: exact in dimension 1, grid supremum otherwise.
///
/// The grid value is a lower bound; `upper_bound` adds `2·dim/G`, which covers the
/// rounding of both box corners to the grid on every axis.
pub fn discrepancy(seq: &TorusSequence, grid_resolution: u64) -> Result<DiscrepancyReport> {
    if seq.is_empty() {
        return Err(Error::arg("empty sequence"));
    }
    if seq.dim() == 1 {
        let v = discrepancy_1d(&seq.coords)?;
        return Ok(DiscrepancyReport {
            value: v,
            upper_bound: v,
            method: Method::Exact1d,
            grid_resolution: 0,
            dim: 1,
            n: seq.len(),
            etk_rhs: None,
            h_used: None,
        });
    }
    let v = discrepancy_grid(seq, grid_resolution)?;
    let pad = 2.0 * seq.dim() as f64 / grid_resolution as f64;
    Ok(DiscrepancyReport {
        value: v,
        upper_bound: (v + pad).min(1.0),
        method: Method::GridSupremum,
        grid_resolution,
        dim: seq.dim(),
        n: seq.len(),
        etk_rhs: None,
        h_used: None,
    })
}

/// `1/H + Σ_{0<‖h‖∞<H} μ(h)^{-1} |(1/N) Σ_n e(h·x_n)|` with `μ(h) = Π max(1,|h_i|)`.
pub fn etk_rhs(seq: &TorusSequence, h: u64) -> Result<f64> {
    if h == 0 {
        return Err(Error::arg("H must be at least 1"));
    }
    if seq.is_empty() {
        return Err(Error::arg("empty sequence"));
    }
    let d = seq.dim();
    let width = 2 * h - 1;
    let total = (width as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if total.saturating_mul(seq.len() as u128) > 1 << 34 {
        return Err(Error::guard("too many frequencies for the ETK sum"));
    }
    let n = seq.len() as f64;
    let hi = h as i64;
    let terms: Vec<f64> = (0..total as u64)
        .into_par_iter()
        .map(|mut code| {
            let mut freq = vec![0i64; d];
            for k in (0..d).rev() {
                freq[k] = (code % width) as i64 - (hi - 1);
                code /= width;
            }
            if freq.iter().all(|&f| f == 0) {
                return 0.0;
            }
            let mu: f64 = freq.iter().map(|&f| f.unsigned_abs().max(1) as f64).product();
            let sums: Vec<Complex64> = (0..seq.len())
                .map(|i| {
                    let p = seq.point(i);
                    let phase: f64 = freq.iter().zip(p).map(|(&f, &x)| f as f64 * x).sum();
                    e_of(phase)
                })
                .collect();
            pairwise_sum_c(&sums).norm() / n / mu
        })
        .collect();
    Ok(1.0 / h as f64 + pairwise_sum(&terms))
}

/// A test function of bounded variation with known integral over `[0,1]`.
pub struct BoundedVariation<'a> {
    pub f: &'a (dyn Fn(f64) -> f64 + Sync),
    pub variation: f64,
    pub integral: f64,
}

/// `|mean f(x_n) − ∫f|` against `V(f)·D_N`.
pub fn koksma_hlawka_check(func: &BoundedVariation<'_>, seq: &TorusSequence) -> Result<(f64, f64)> {
    if seq.dim() != 1 {
        return Err(Error::arg("Koksma–Hlawka check is one-dimensional"));
    }
    let vals: Vec<f64> = seq.coords.iter().map(|&x| (func.f)(x)).collect();
    let mean = pairwise_sum(&vals) / seq.len() as f64;
    let d = discrepancy_1d(&seq.coords)?;
    Ok(((mean - func.integral).abs(), func.variation * d))
}

/// `Σ_{d<2^η} D̃_U(d/2^η)`, exact.
pub fn mean_dyadic_discrepancy(u: u64, eta: u32) -> Result<f64> {
    if u == 0 {
        return Err(Error::arg("U must be at least 1"));
    }
    if eta >= 31 || (u as u128) << eta > 1 << 30 {
        return Err(Error::guard(format!("U·2^eta exceeds 2^30 (U = {u}, eta = {eta})")));
    }
    let vals: Vec<f64> =
        (0..1u64 << eta).into_par_iter().map(|d| orbit_discrepancy_dyadic(d as i128, eta, u)).collect();
    Ok(pairwise_sum(&vals))
}

/// Left and right sides of the leftshift estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Leftshift {
    pub lhs: f64,
    pub rhs_shape: f64,
    pub ratio: f64,
}

/// `(1/N) Σ_j D_M((mα_j/q)_{m<M})` against `q·log⁺M·log⁺N/M + q^{-1} D_N(α)^{1/2}`.
pub fn leftshift_average(alphas: &[f64], q: u64, m: u64) -> Result<Leftshift> {
    if alphas.is_empty() {
        return Err(Error::arg("empty alpha vector"));
    }
    if q == 0 || m == 0 {
        return Err(Error::arg("q and M must be at least 1"));
    }
    let ds: Vec<f64> = alphas.par_iter().map(|&a| orbit_discrepancy(a / q as f64, m)).collect();
    let n = alphas.len() as f64;
    let lhs = pairwise_sum(&ds) / n;
    let (qf, mf) = (q as f64, m as f64);
    let rhs_shape = qf * log_plus(mf) * log_plus(n) / mf + discrepancy_1d(alphas)?.sqrt() / qf;
    Ok(Leftshift { lhs, rhs_shape, ratio: lhs / rhs_shape })
}
