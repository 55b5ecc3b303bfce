use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::correlations::{gowers_norm, s0_grid_moduli};
use crate::digits::count_tm_cube_zeros_range;
use crate::error::{Error, Result};
use crate::numeric::ols;

const DENSITY_MAX_LOG2: u32 = 32;
const S0_MAX_NU: u32 = 30;

/// Default `ξ` grid: `2^{ν+2}` up to `ν = 20`, then `2^22`.
pub fn default_xi_grid(nu: u32) -> usize {
    1usize << (nu + 2).min(22)
}

/// Bound on how far `sup_ξ|S₀|` can exceed the grid maximum: `|∂_ξ S₀| ≤ π(2^ν − 1)`
/// and every `ξ` lies within `1/(2G)` of the grid.
pub fn lipschitz_padding(nu: u32, grid: usize) -> f64 {
    std::f64::consts::PI * ((nu as f64).exp2() - 1.0) / (2.0 * grid as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct S0Row {
    pub nu: u32,
    pub xi_grid: usize,
    pub sup: f64,
    pub argmax_k: usize,
    pub padding: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Percentile bootstrap interval for the slope at 95%.
    pub ci_low: f64,
    pub ci_high: f64,
    pub resamples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct S0Decay {
    pub rows: Vec<S0Row>,
    /// Fit of `log₂ sup` against `ν`; absent with fewer than two rows.
    pub fit: Option<SlopeFit>,
}

/// OLS slope with a seeded percentile bootstrap over the points.
pub fn bootstrap_slope(x: &[f64], y: &[f64], resamples: usize, seed: u64) -> Option<SlopeFit> {
    let n = x.len();
    if n < 2 || x.iter().all(|&v| v == x[0]) {
        return None;
    }
    let (slope, intercept) = ols(x, y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slopes = Vec::with_capacity(resamples);
    let (mut bx, mut by) = (vec![0.0; n], vec![0.0; n]);
    while slopes.len() < resamples {
        for i in 0..n {
            let j = rng.random_range(0..n);
            bx[i] = x[j];
            by[i] = y[j];
        }
        if bx.iter().all(|&v| v == bx[0]) {
            continue;
        }
        slopes.push(ols(&bx, &by).0);
    }
    slopes.sort_by(f64::total_cmp);
    let pick = |q: f64| slopes[((q * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
    Some(SlopeFit { slope, intercept, ci_low: pick(0.025), ci_high: pick(0.975), resamples })
}

/// `sup_k |S₀(ν, k/G)|` for each `ν`, with a bootstrap fit of `log₂ sup` against `ν`.
pub fn s0_decay_experiment(nus: &[u32], xi_grid: Option<usize>, seed: u64) -> Result<S0Decay> {
    let mut rows = Vec::with_capacity(nus.len());
    for &nu in nus {
        if nu > S0_MAX_NU {
            return Err(Error::guard(format!("nu = {nu} exceeds {S0_MAX_NU}")));
        }
        let grid = xi_grid.unwrap_or_else(|| default_xi_grid(nu));
        let moduli = s0_grid_moduli(nu, grid)?;
        let (argmax_k, sup) =
            moduli
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (k, v)| if v > best.1 { (k, v) } else { best });
        rows.push(S0Row { nu, xi_grid: grid, sup, argmax_k, padding: lipschitz_padding(nu, grid) });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.nu as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.sup.log2()).collect();
    let fit = bootstrap_slope(&x, &y, 2000, seed);
    Ok(S0Decay { rows, fit })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub count: u64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub checkpoints: Vec<DensityRow>,
    /// Log-log slope of the deviation against `N` over checkpoints with nonzero deviation.
    pub slope: Option<f64>,
}

impl DensityReport {
    pub fn last(&self) -> &DensityRow {
        self.checkpoints.last().expect("at least one checkpoint")
    }
}

/// Checkpoints `⌊2^{Kj/C}⌋` for `j = 1..=C`, deduplicated; `N = 1` when `K = 0`.
pub fn density_checkpoints(log2_n: u32, checkpoints: u32) -> Vec<u64> {
    let c = checkpoints.max(1);
    let mut out: Vec<u64> =
        (1..=c)
            .map(|j| {
                if j == c {
                    1u64 << log2_n
                } else {
                    ((log2_n as f64 * j as f64 / c as f64).exp2().floor() as u64).max(1)
                }
            })
            .collect();
    out.dedup();
    out
}

/// Exact counts of `n < N` with `t(n³) = 0` at geometric checkpoints.
pub fn density_experiment(log2_n: u32, checkpoints: u32) -> Result<DensityReport> {
    if log2_n > DENSITY_MAX_LOG2 {
        return Err(Error::guard(format!("log2 N = {log2_n} exceeds {DENSITY_MAX_LOG2}")));
    }
    if checkpoints == 0 {
        return Err(Error::arg("need at least one checkpoint"));
    }
    let mut rows = Vec::new();
    let (mut prev, mut count) = (0u64, 0u64);
    for n in density_checkpoints(log2_n, checkpoints) {
        count += count_tm_cube_zeros_range(prev, n);
        prev = n;
        rows.push(DensityRow { n, count, deviation: (count as f64 / n as f64 - 0.5).abs() });
    }
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.deviation > 0.0).map(|r| ((r.n as f64).log2(), r.deviation.log2())).collect();
    let slope = (pts.len() >= 2 && pts.iter().any(|p| p.0 != pts[0].0)).then(|| {
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        ols(&x, &y).0
    });
    Ok(DensityReport { checkpoints: rows, slope })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GowersRow {
    pub rho: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GowersDecay {
    pub q: u32,
    pub rows: Vec<GowersRow>,
    /// `η` in `value ≈ C·2^{−ηρ}`, from the OLS fit of `log₂ value` against `ρ`.
    pub eta: Option<f64>,
    pub log2_c: Option<f64>,
}

pub fn gowers_decay(q: u32, rhos: &[u32]) -> Result<GowersDecay> {
    let rows =
        rhos.iter().map(|&rho| Ok(GowersRow { rho, value: gowers_norm(rho, q)? })).collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.value > 0.0).map(|r| (r.rho as f64, r.value.log2())).collect();
    let fit = (pts.len() >= 2 && pts.iter().any(|p| p.0 != pts[0].0)).then(|| {
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        ols(&x, &y)
    });
    Ok(GowersDecay { q, rows, eta: fit.map(|f| -f.0), log2_c: fit.map(|f| f.1) })
}
