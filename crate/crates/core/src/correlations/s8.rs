use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digits::{window_popcount_u128, DigitWindow};
use crate::error::{Error, Result};

/// Arguments of the eightfold correlation sum `S₈`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationSpec {
    pub u: u32,
    pub nu: u32,
    pub rho: u32,
    pub tau: u32,
    pub zeta: u32,
    pub n_lo: u64,
    pub n_ol: u64,
    pub n_oo: u64,
    pub s_o: u64,
    pub s_l: u64,
    pub m: u64,
    pub r: u64,
}

const S8_GUARD: u32 = 22;

impl CorrelationSpec {
    /// `u ≥ ν ≥ ρ ≥ τ ≥ ζ ≥ 0` and the digit ranges of `n₁₀, n₀₁, n₀₀`.
    pub fn validate(&self) -> Result<()> {
        let s = self;
        if !(s.u >= s.nu && s.nu >= s.rho && s.rho >= s.tau && s.tau >= s.zeta) {
            return Err(Error::params(format!(
                "need u >= nu >= rho >= tau >= zeta, got {}, {}, {}, {}, {}",
                s.u, s.nu, s.rho, s.tau, s.zeta
            )));
        }
        if s.u >= 64 {
            return Err(Error::guard("u must be below 64"));
        }
        if s.n_lo >= 1 << (s.rho - s.tau) || s.n_ol >= 1 << (s.tau - s.zeta) || s.n_oo >= 1 << s.zeta {
            return Err(Error::params("split digits out of range"));
        }
        Ok(())
    }

    /// `ζ ≤ λ/3 ≤ τ ≤ u/2 ≤ ρ ≤ ν ≤ λ/2`.
    pub fn check_stack(&self, lambda: u32) -> Result<()> {
        self.validate()?;
        let s = self;
        let ok = 3 * s.zeta <= lambda
            && lambda <= 3 * s.tau
            && 2 * s.tau <= s.u
            && s.u <= 2 * s.rho
            && s.rho <= s.nu
            && 2 * s.nu <= lambda;
        if !ok {
            return Err(Error::params(format!("window stack violated at lambda = {lambda}")));
        }
        Ok(())
    }

    /// `u − ρ ≤ 2τ − ζ ≤ 2τ ≤ τ + ρ ≤ 2ρ`, together with `u ≤ 2ρ`.
    pub fn check_chain(&self) -> Result<()> {
        self.validate()?;
        let s = self;
        if s.u - s.rho > 2 * s.tau - s.zeta {
            return Err(Error::params("need u - rho <= 2 tau - zeta"));
        }
        if s.u > 2 * s.rho {
            return Err(Error::params("need u <= 2 rho"));
        }
        Ok(())
    }

    fn shifts(&self) -> [(u8, u64); 4] {
        [(0, self.s_o), (1, self.s_o), (0, self.s_l), (1, self.s_l)]
    }

    fn base(&self, eps: u8, ts: u64) -> Result<u128> {
        let v = ((self.n_lo as u128) << self.tau)
            + ((self.n_ol as u128) << self.zeta)
            + ((ts as u128 * self.m as u128) << self.tau)
            + self.n_oo as u128
            + eps as u128 * self.r as u128;
        if v.checked_add(1u128 << self.nu).is_none_or(|t| t >= 1 << 42) {
            return Err(Error::guard("summation argument reaches 2^42"));
        }
        Ok(v)
    }
}

/// The slope data of the linearised form, one entry per `(ε, ts)` in the order
/// `(0,s₀), (1,s₀), (0,s₁), (1,s₁)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearizedSlopes {
    pub a: [u128; 4],
    pub q_tilde: [u128; 4],
    /// `Q′(ε,ts)`, which is also the slope `α(ε,ts)` of the digit problem.
    pub q_prime: [u128; 4],
    pub beta: [u128; 4],
    pub c: [u64; 4],
    /// `n_A(ε) = n₀₁2^ζ + n₀₀ + εr`.
    pub n_a: [u128; 2],
}

pub fn linearized_slopes(spec: &CorrelationSpec) -> Result<LinearizedSlopes> {
    spec.validate()?;
    let mut out =
        LinearizedSlopes { a: [0; 4], q_tilde: [0; 4], q_prime: [0; 4], beta: [0; 4], c: [0; 4], n_a: [0; 2] };
    for eps in 0..2u8 {
        out.n_a[eps as usize] = ((spec.n_ol as u128) << spec.zeta) + spec.n_oo as u128 + eps as u128 * spec.r as u128;
    }
    for (i, (eps, ts)) in spec.shifts().into_iter().enumerate() {
        let a = spec.base(eps, ts)?;
        let na = out.n_a[eps as usize];
        let cube = a * a * a;
        out.a[i] = a;
        out.q_tilde[i] = 3 * a * a;
        out.q_prime[i] = ((6 * na * spec.n_lo as u128) << spec.tau)
            + ((6 * ts as u128 * spec.m as u128 * na) << spec.tau)
            + 3 * na * na;
        out.beta[i] = cube >> spec.rho;
        out.c[i] = window_popcount_u128(cube, DigitWindow::below(spec.rho as u64));
    }
    Ok(out)
}

fn guard(spec: &CorrelationSpec) -> Result<()> {
    if spec.nu - spec.rho > S8_GUARD {
        return Err(Error::guard(format!("nu - rho = {} exceeds {S8_GUARD}", spec.nu - spec.rho)));
    }
    Ok(())
}

/// `2^{ρ−ν} Σ_{n₁₁<2^{ν−ρ}} Π_{ε,ts} e(½ s^{[0,u)}((n₁₁2^ρ + n₁₀2^τ + n₀₁2^ζ + ts·m·2^τ + n₀₀ + εr)³))`.
///
/// The value is real because every factor is ±1.
pub fn s8_defining(spec: &CorrelationSpec) -> Result<f64> {
    spec.validate()?;
    guard(spec)?;
    let shifts = spec.shifts();
    let mut bases = [0u128; 4];
    for (i, (eps, ts)) in shifts.into_iter().enumerate() {
        bases[i] = spec.base(eps, ts)?;
    }
    let w = DigitWindow::below(spec.u as u64);
    let count = 1u64 << (spec.nu - spec.rho);
    let sum: i64 = (0..count)
        .into_par_iter()
        .map(|n| {
            let hi = (n as u128) << spec.rho;
            let s: u64 = bases
                .iter()
                .map(|&b| {
                    let x = hi + b;
                    window_popcount_u128(x * x * x, w)
                })
                .sum();
            1 - 2 * (s & 1) as i64
        })
        .sum();
    Ok(sum as f64 / count as f64)
}

fn window_form(spec: &CorrelationSpec, w: DigitWindow) -> Result<f64> {
    guard(spec)?;
    let sl = linearized_slopes(spec)?;
    let count = 1u64 << (spec.nu - spec.rho);
    let sum: i64 = (0..count)
        .into_par_iter()
        .map(|n| {
            let s: u64 = (0..4).map(|i| window_popcount_u128(n as u128 * sl.q_prime[i] + sl.beta[i], w)).sum();
            1 - 2 * (s & 1) as i64
        })
        .sum();
    Ok((sum as f64 / count as f64).abs())
}

/// `2^{ρ−ν} |Σ_{n₁₁} Π e(½ s^{[τ,u−ρ)}(n₁₁Q′ + β))|`.
pub fn s8_linearized(spec: &CorrelationSpec) -> Result<f64> {
    spec.check_chain()?;
    let hi = (spec.u - spec.rho) as u64;
    window_form(spec, DigitWindow { lo: (spec.tau as u64).min(hi), hi })
}

/// The same expression over the full window `[0, u−ρ)`; equal to `|s8_defining|`
/// whenever `u ≤ 2ρ` and `u − ρ ≤ 2τ`.
pub fn s8_full_window(spec: &CorrelationSpec) -> Result<f64> {
    spec.check_chain()?;
    window_form(spec, DigitWindow::below((spec.u - spec.rho) as u64))
}

/// Whether the digits below `τ` drop out: the four-term sum of `s^{[0,τ)}(n₁₁Q′ + β)`
/// is even for every `n₁₁`.
pub fn low_digits_cancel(spec: &CorrelationSpec) -> Result<bool> {
    guard(spec)?;
    let sl = linearized_slopes(spec)?;
    let w = DigitWindow::below(spec.tau.min(spec.u - spec.rho) as u64);
    let count = 1u64 << (spec.nu - spec.rho);
    Ok((0..count).into_par_iter().all(|n| {
        let s: u64 = (0..4).map(|i| window_popcount_u128(n as u128 * sl.q_prime[i] + sl.beta[i], w)).sum();
        s.is_multiple_of(2)
    }))
}

/// Window tuples `(u, ν, ρ, τ, ζ)` satisfying the stack at `λ`, the chain, `ν ≤ max_nu`
/// and `ρ > τ`.
fn admissible_windows(lambda: u32, max_nu: u32) -> Vec<[u32; 5]> {
    let mut out = Vec::new();
    for nu in 0..=max_nu.min(lambda / 2) {
        for rho in 0..=nu {
            for tau in 0..rho {
                for u in nu..=2 * rho {
                    for zeta in 0..=tau {
                        let s = CorrelationSpec {
                            u,
                            nu,
                            rho,
                            tau,
                            zeta,
                            n_lo: 0,
                            n_ol: 0,
                            n_oo: 0,
                            s_o: 0,
                            s_l: 0,
                            m: 1,
                            r: 0,
                        };
                        if s.check_stack(lambda).is_ok() && s.check_chain().is_ok() {
                            out.push([u, nu, rho, tau, zeta]);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Whether shifts and multiplier fit some `S, B ≥ 1` with `s₀, s₁ < S`, `1 ≤ m ≤ B`
/// and `SB < 2^{ρ−τ}`.
pub fn shifts_admissible(spec: &CorrelationSpec) -> bool {
    let s = spec.s_o.max(spec.s_l) as u128 + 1;
    spec.m >= 1 && s * (spec.m as u128) < 1u128 << (spec.rho - spec.tau)
}

/// Every spec with `ν ≤ max_nu` satisfying the stack at `λ`, the chain, `SB < 2^{ρ−τ}`
/// and `0 ≤ r < 2^ζ`, in lexicographic order.
pub fn admissible_specs(lambda: u32, max_nu: u32) -> Vec<CorrelationSpec> {
    let mut out = Vec::new();
    for [u, nu, rho, tau, zeta] in admissible_windows(lambda, max_nu) {
        let cap = 1u64 << (rho - tau);
        for n_lo in 0..cap {
            for n_ol in 0..1u64 << (tau - zeta) {
                for n_oo in 0..1u64 << zeta {
                    for m in 1..cap {
                        for s_o in 0..cap {
                            for s_l in 0..cap {
                                for r in 0..1u64 << zeta {
                                    let spec =
                                        CorrelationSpec { u, nu, rho, tau, zeta, n_lo, n_ol, n_oo, s_o, s_l, m, r };
                                    if shifts_admissible(&spec) {
                                        out.push(spec);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// `count` specs drawn from a ChaCha8 stream: `λ ∈ {15, 18, …, 36}`, windows by
/// rejection, digits, shifts and `r` uniform in their admissible ranges.
pub fn random_specs(count: usize, seed: u64) -> Vec<CorrelationSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let lambda = 3 * rng.random_range(5..=12u32);
        let windows = admissible_windows(lambda, lambda / 2);
        let [u, nu, rho, tau, zeta] = windows[rng.random_range(0..windows.len())];
        let cap = 1u64 << (rho - tau);
        let m = rng.random_range(1..cap);
        let smax = (cap - 1) / m;
        let spec = CorrelationSpec {
            u,
            nu,
            rho,
            tau,
            zeta,
            n_lo: rng.random_range(0..cap),
            n_ol: rng.random_range(0..1u64 << (tau - zeta)),
            n_oo: rng.random_range(0..1u64 << zeta),
            s_o: rng.random_range(0..smax),
            s_l: rng.random_range(0..smax),
            m,
            r: rng.random_range(0..1u64 << zeta),
        };
        if shifts_admissible(&spec) && spec.base(1, spec.s_o.max(spec.s_l)).is_ok() {
            out.push(spec);
        }
    }
    out
}
