//! Searches for odd multipliers that clear a digit window, and partitions of an
//! interval into short arithmetic progressions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::digits::{window_popcount_u128, DigitWindow};
use crate::discrepancy::orbit_discrepancy_dyadic;
use crate::error::{Error, Result};

const ODD_GUARD: u32 = 30;
const SAMPLE_LOG2: u32 = 10;
const GOOD_GUARD: u32 = 22;
const GOOD_COST_GUARD: u32 = 32;

/// Outcome of the odd-multiplier search for one `ω`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OddEliminationResult {
    pub omega: u64,
    pub found: bool,
    /// Largest of the least witnesses over the checked `ω₀`; every witness is odd.
    pub witness_m: Option<u64>,
    /// First `ω₀` for which no odd multiplier exists.
    pub failing_omega0: Option<u64>,
    pub checked_omega0: u64,
}

/// Whether `(M(2^μω + ω₀))^{[ℓ−κ,ℓ)} = 0`, by direct digit extraction.
pub fn clears_window(m: u64, omega: u64, omega0: u64, ell: u32, kappa: u32, mu: u32) -> bool {
    let x = m as u128 * (((omega as u128) << mu) + omega0 as u128);
    window_popcount_u128(x, DigitWindow { lo: (ell - kappa) as u64, hi: ell as u64 }) == 0
}

fn check_odd_args(ell: u32, kappa: u32, mu: u32, omega: u64) -> Result<()> {
    if kappa == 0 || ell < kappa {
        return Err(Error::params(format!("need l >= kappa >= 1, got l = {ell}, kappa = {kappa}")));
    }
    if mu + 5 * kappa + 6 > ODD_GUARD {
        return Err(Error::guard(format!("2^mu * 2^(5 kappa + 6) = 2^{} exceeds 2^{ODD_GUARD}", mu + 5 * kappa + 6)));
    }
    let bits = 64 - omega.leading_zeros() + mu + 5 * kappa + 7;
    if bits > 127 || ell > 127 {
        return Err(Error::guard("products exceed 128 bits"));
    }
    Ok(())
}

/// Least odd `M < 2^{5κ+7}` clearing the window, if any.
fn least_witness(omega: u64, omega0: u64, ell: u32, kappa: u32, mu: u32) -> Option<u64> {
    (1..1u64 << (5 * kappa + 7)).step_by(2).find(|&m| clears_window(m, omega, omega0, ell, kappa, mu))
}

fn eliminate_over(
    omega: u64,
    ell: u32,
    kappa: u32,
    mu: u32,
    omega0s: impl Iterator<Item = u64>,
) -> OddEliminationResult {
    let mut res = OddEliminationResult { omega, found: true, witness_m: None, failing_omega0: None, checked_omega0: 0 };
    for w0 in omega0s {
        res.checked_omega0 += 1;
        match least_witness(omega, w0, ell, kappa, mu) {
            Some(m) => res.witness_m = Some(res.witness_m.map_or(m, |p| p.max(m))),
            None => {
                res.found = false;
                res.failing_omega0 = Some(w0);
                res.witness_m = None;
                break;
            }
        }
    }
    res
}

/// Exhaustive test of `𝒫(ω, ℓ, κ, μ)` over every `ω₀ < 2^μ`.
pub fn odd_eliminate(omega: u64, ell: u32, kappa: u32, mu: u32) -> Result<OddEliminationResult> {
    check_odd_args(ell, kappa, mu, omega)?;
    Ok(eliminate_over(omega, ell, kappa, mu, 0..1u64 << mu))
}

/// Count of `ω < 2^{4κ+4}` satisfying `𝒫(ω, ℓ, κ, ℓ−4κ−4)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OddEliminationCensus {
    pub ell: u32,
    pub kappa: u32,
    pub mu: u32,
    pub total: u64,
    pub good_count: u64,
    /// `2^{3κ+4}(2^κ−1)`.
    pub bound: u64,
    /// Set when `ω₀` was sampled rather than exhausted.
    pub sampled: bool,
    pub holds: bool,
}

pub fn census_bound(kappa: u32) -> u64 {
    (1u64 << (3 * kappa + 4)) * ((1u64 << kappa) - 1)
}

/// Runs the census; for `κ ≥ 2` and `μ > 0` each `ω` is tested on `2^10` values of
/// `ω₀` drawn with replacement from a ChaCha8 stream seeded with `seed ^ ω`.
pub fn odd_elimination_census(ell: u32, kappa: u32, seed: u64) -> Result<OddEliminationCensus> {
    if kappa == 0 {
        return Err(Error::params("kappa must be at least 1"));
    }
    if ell < 4 * kappa + 4 {
        return Err(Error::params(format!("mu = l - 4 kappa - 4 < 0 at l = {ell}, kappa = {kappa}")));
    }
    let mu = ell - 4 * kappa - 4;
    let total = 1u64 << (4 * kappa + 4);
    let sampled = kappa >= 2 && mu > 0;
    if !sampled {
        check_odd_args(ell, kappa, mu, total)?;
    } else {
        check_odd_args(ell, kappa, SAMPLE_LOG2.min(mu), total << mu.saturating_sub(SAMPLE_LOG2))?;
    }
    let good_count = (0..total)
        .into_par_iter()
        .filter(|&omega| {
            if sampled {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ omega);
                let draws: Vec<u64> = (0..1u64 << SAMPLE_LOG2).map(|_| rng.random_range(0..1u64 << mu)).collect();
                eliminate_over(omega, ell, kappa, mu, draws.into_iter()).found
            } else {
                eliminate_over(omega, ell, kappa, mu, 0..1u64 << mu).found
            }
        })
        .count() as u64;
    let bound = census_bound(kappa);
    Ok(OddEliminationCensus { ell, kappa, mu, total, good_count, bound, sampled, holds: good_count >= bound })
}

/// `(Tℤ + first) ∩ [first, last]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Progression {
    pub difference: u64,
    pub first: u64,
    pub last: u64,
}

impl Progression {
    pub fn len(&self) -> u64 {
        (self.last - self.first) / self.difference + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.first && n <= self.last && (n - self.first).is_multiple_of(self.difference)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct APPartition {
    /// Parent interval `[lo, hi)`.
    pub lo: u64,
    pub hi: u64,
    pub v: u64,
    pub progressions: Vec<Progression>,
}

impl APPartition {
    /// Disjointness, coverage and `V/2 ≤ |P| ≤ V`.
    pub fn verify(&self) -> Result<()> {
        let n = (self.hi - self.lo) as usize;
        let mut seen = vec![false; n];
        for p in &self.progressions {
            let len = p.len();
            if 2 * len < self.v || len > self.v {
                return Err(Error::PropertyViolation(format!("progression of size {len} with V = {}", self.v)));
            }
            if p.first < self.lo || p.last >= self.hi {
                return Err(Error::PropertyViolation("progression leaves the interval".into()));
            }
            let mut x = p.first;
            while x <= p.last {
                let i = (x - self.lo) as usize;
                if seen[i] {
                    return Err(Error::PropertyViolation(format!("{x} covered twice")));
                }
                seen[i] = true;
                x += p.difference;
            }
        }
        if let Some(i) = seen.iter().position(|&s| !s) {
            return Err(Error::PropertyViolation(format!("{} not covered", self.lo + i as u64)));
        }
        Ok(())
    }
}

/// Piece sizes for one residue class of `w` elements.
fn piece_sizes(w: u64, v: u64) -> Vec<u64> {
    if v % 2 == 1 {
        let half = v.div_ceil(2);
        let m = (w - v).div_ceil(half);
        let mut sizes = vec![w - m * half];
        sizes.extend(std::iter::repeat_n(half, m as usize));
        sizes
    } else {
        let k = w.div_ceil(v);
        let (q, r) = (w / k, w % k);
        (0..k).map(|i| if i < r { q + 1 } else { q }).collect()
    }
}

/// Splits `[lo, hi)` into progressions of difference `T` with sizes in `[V/2, V]`.
pub fn partition_into_aps(lo: u64, hi: u64, t: u64, v: u64) -> Result<APPartition> {
    if t == 0 || v == 0 {
        return Err(Error::arg("T and V must be at least 1"));
    }
    if hi < lo {
        return Err(Error::InvalidRange(format!("[{lo}, {hi})")));
    }
    let len = hi - lo;
    if t.checked_mul(v).is_none_or(|tv| tv > len) {
        return Err(Error::Infeasible(format!("T V = {t} * {v} exceeds |I| = {len}")));
    }
    if len > 1 << 26 {
        return Err(Error::guard("interval longer than 2^26"));
    }
    let mut progressions = Vec::new();
    for a in lo..lo + t {
        let w = (hi - a).div_ceil(t);
        let mut start = a;
        for size in piece_sizes(w, v) {
            let last = start + (size - 1) * t;
            progressions.push(Progression { difference: t, first: start, last });
            start = last + t;
        }
    }
    let out = APPartition { lo, hi, v, progressions };
    out.verify()?;
    Ok(out)
}

/// Parameters of the good-index search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoodIndexParams {
    pub lambda: u32,
    pub tau: u32,
    pub zeta: u32,
    pub eta0: u32,
    pub eta1: u32,
    /// Orbit length `U` of the discrepancy condition.
    pub u: u64,
    pub s0: i64,
    pub s1: i64,
    /// `m(n₀₁)`, either one value for all indices or one per index.
    pub m: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoodIndexSets {
    /// `|J₀₁| = 2^{τ−ζ}`.
    pub size: u64,
    pub g0: Vec<u64>,
    pub g1: Vec<u64>,
}

fn dyadic_dist_below(num: u128, k: u32, eta: u32) -> bool {
    let modulus = 1u128 << k;
    let v = num % modulus;
    let d = v.min(modulus - v);
    (d << eta) < modulus
}

/// Direct search for `𝒢_{η₀}` and `𝒢_{η₁}` inside `J₀₁ = [0, 2^{τ−ζ})`; index 0 is never good.
pub fn good_index_sets(p: &GoodIndexParams) -> Result<GoodIndexSets> {
    if p.tau < p.zeta || p.lambda < 2 * p.tau + p.zeta {
        return Err(Error::params("need tau >= zeta and lambda >= 2 tau + zeta"));
    }
    let bits = p.tau - p.zeta;
    if bits > GOOD_GUARD {
        return Err(Error::guard(format!("tau - zeta = {bits} exceeds {GOOD_GUARD}")));
    }
    if bits + 5 * p.eta0 + 6 > GOOD_COST_GUARD {
        return Err(Error::guard("odd search space too large"));
    }
    let k = p.lambda - 2 * p.tau - p.zeta;
    if k > 64 || p.eta0 > 64 {
        return Err(Error::guard("denominator exceeds 2^64"));
    }
    let size = 1u64 << bits;
    if p.m.len() != 1 && p.m.len() as u64 != size {
        return Err(Error::arg(format!("m has {} entries, need 1 or {size}", p.m.len())));
    }
    if p.u == 0 {
        return Err(Error::arg("U must be at least 1"));
    }
    let t_max = 1u128 << (5 * p.eta0 + 7);
    let g0 = (1..size)
        .into_par_iter()
        .filter(|&n| (1..t_max).step_by(2).any(|t| dyadic_dist_below(t * n as u128, k, p.eta0)))
        .collect();
    let threshold = (-(p.eta1 as f64)).exp2();
    let diff = p.s0 as i128 - p.s1 as i128;
    let g1 = (1..size)
        .into_par_iter()
        .filter(|&n| {
            let m = if p.m.len() == 1 { p.m[0] } else { p.m[n as usize] };
            let num = n as i128 * 6 * diff * m as i128;
            orbit_discrepancy_dyadic(num, k, p.u) < threshold
        })
        .collect();
    Ok(GoodIndexSets { size, g0, g1 })
}
