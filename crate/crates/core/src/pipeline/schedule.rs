use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::log2_floor_exp2;

/// A positive rational `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 {
            return Err(Error::arg(format!("Xi = {num}/{den} must be a positive rational")));
        }
        Ok(Rational { num, den })
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `⌊k·num·x / (d·den)⌋` for integer `x`, exact.
    fn floor_mul(self, k: u128, x: u64, d: u128) -> u64 {
        (k * self.num as u128 * x as u128 / (d * self.den as u128)) as u64
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational { num: 1, den: 15000 }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once('/').unwrap_or((s, "1"));
        let num = a.trim().parse().map_err(|_| Error::arg(format!("bad rational {s:?}")))?;
        let den = b.trim().parse().map_err(|_| Error::arg(format!("bad rational {s:?}")))?;
        Rational::new(num, den)
    }
}

/// The denominator 139 shared by `ζ`, `ω` and `η₀`.
pub const DEFAULT_SPLIT_CONSTANT: u64 = 139;

/// Every parameter derived from the driver `ν`.
///
/// Exponents are exact integers; the "small values" `B, H, R₁, R = S` and the
/// factor `T₀ = 2^{5η₀+7}` are carried as `log₂` because they overflow at real scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterSchedule {
    pub nu: u64,
    pub xi: Rational,
    pub split_constant: u64,
    pub lambda: u64,
    pub rho: u64,
    pub u: u64,
    pub tau: u64,
    pub zeta: u64,
    pub omega: u64,
    pub log2_v: f64,
    pub log2_b: f64,
    pub log2_h: f64,
    pub log2_r1: f64,
    pub log2_r: f64,
    pub log2_s: f64,
    pub eta0: u64,
    pub eta1: u64,
    pub log2_t0: f64,
    pub a: u64,
    pub b: u64,
    pub kappa: u64,
    pub delta: u64,
    pub delta1: u64,
    pub delta2: u64,
    /// `None` when no `ℓ` reaches `a + 66κ` (only possible for `κ = 0`).
    pub big_l: Option<u64>,
    pub c: u64,
    pub d: Option<i64>,
    pub q: Option<u64>,
    pub mu: u64,
}

pub fn build_schedule(nu: u64, xi: Rational) -> Result<ParameterSchedule> {
    build_schedule_with(nu, xi, DEFAULT_SPLIT_CONSTANT)
}

/// Builds the schedule with a custom denominator in place of 139.
pub fn build_schedule_with(nu: u64, xi: Rational, split_constant: u64) -> Result<ParameterSchedule> {
    if nu == 0 {
        return Err(Error::arg("nu must be at least 1"));
    }
    if nu > 1 << 50 {
        return Err(Error::guard("nu above 2^50"));
    }
    if split_constant <= 6 {
        return Err(Error::arg("split constant must exceed 6"));
    }
    if xi.num as u128 * 5 > xi.den as u128 * 2 {
        return Err(Error::arg("Xi above 2/5 makes u negative"));
    }
    let (p, q) = (xi.num as u128, xi.den as u128);
    let n = nu as u128;
    let lambda = (3 * ((2 * q * n + 2 * p * n) / (3 * q))) as u64;
    let rho = ((q * n - 2 * p * n) / q) as u64;
    let u = ((2 * q * n - 5 * p * n) / q) as u64;
    let tau = lambda / 3;
    let cst = split_constant as u128;
    let zeta = (lambda as u128 * (cst - 6) / (6 * cst)) as u64;
    let omega = (3 * lambda as u128 / cst) as u64;
    let eta0 = (4 * lambda as u128 / cst) as u64;
    let xinu = xi.to_f64() * nu as f64;
    let eta1 = xi.floor_mul(16, nu, 1);
    let kappa = xi.floor_mul(1, nu, 100);
    let delta = xi.floor_mul(3, nu, 100);
    let log2_b = log2_floor_exp2(180.0 * xinu);
    let shift = lambda.saturating_sub(u) as f64;
    let log2_h = shift + log2_floor_exp2(8.0 * xinu - shift);
    let log2_r1 = log2_floor_exp2(xinu / 40.0);
    let log2_s = log2_floor_exp2(17.0 * xinu);
    let a = tau;
    let b = u.saturating_sub(rho);
    let target = a + 66 * kappa;
    let big_l = if b <= target {
        Some(0)
    } else if kappa == 0 {
        None
    } else {
        Some((b - target).div_ceil(kappa))
    };
    let c = a + 64 * kappa;
    let d = big_l.map(|l| b as i64 - (l * kappa) as i64);
    Ok(ParameterSchedule {
        nu,
        xi,
        split_constant,
        lambda,
        rho,
        u,
        tau,
        zeta,
        omega,
        log2_v: omega as f64,
        log2_b,
        log2_h,
        log2_r1,
        log2_r: log2_s,
        log2_s,
        eta0,
        eta1,
        log2_t0: (5 * eta0 + 7) as f64,
        a,
        b,
        kappa,
        delta,
        delta1: 32 * kappa,
        delta2: 64 * kappa + delta,
        big_l,
        c,
        d,
        q: big_l.map(|l| 4 * (l + 1)),
        mu: nu - rho,
    })
}

impl ParameterSchedule {
    /// `b_ℓ = b − ℓκ`.
    pub fn b_ell(&self, ell: u64) -> i64 {
        self.b as i64 - (ell * self.kappa) as i64
    }

    /// Every structural constraint as `(name, holds)`.
    pub fn constraints(&self) -> Vec<(&'static str, bool)> {
        let s = self;
        let (lambda, u, nu, rho, tau, zeta) = (s.lambda, s.u, s.nu, s.rho, s.tau, s.zeta);
        let h_ok = s.log2_h.is_finite();
        let d = s.d;
        let (c, kappa, tau_i) = (s.c as i64, s.kappa as i64, tau as i64);
        let slices_ok = match s.big_l {
            Some(l) if l >= 1 => s.b_ell(l - 1) - tau_i >= 65 * kappa,
            _ => false,
        };
        vec![
            ("lambda_divisible_by_3", lambda % 3 == 0),
            ("b_h_s_at_least_1", s.log2_b >= 0.0 && h_ok && s.log2_s >= 0.0),
            ("r1_at_least_1", s.log2_r1 >= 0.0),
            ("lambda_at_least_u", lambda >= u),
            ("h_divisible_by_2_pow_lambda_minus_u", h_ok && s.log2_h >= (lambda.saturating_sub(u)) as f64),
            ("ordering", lambda >= u && u >= nu && nu >= rho && rho >= tau && tau >= zeta),
            (
                "window_stack",
                3 * zeta <= lambda
                    && lambda <= 3 * tau
                    && 2 * tau <= u
                    && u <= 2 * rho
                    && rho <= nu
                    && 2 * nu <= lambda,
            ),
            ("tau_chain", u >= rho && u - rho + zeta <= 2 * tau && tau <= rho),
            ("two_tau_at_least_rho", 2 * tau >= rho),
            ("eta0_margin", lambda >= 2 * tau + zeta && lambda - 2 * tau - zeta >= 4 * s.eta0 + 4),
            ("sb_below_j10", s.log2_s + s.log2_b < rho as f64 - tau as f64),
            ("tv_fits_j10", s.log2_t0 + s.log2_v <= rho as f64 - tau as f64),
            ("kappa_at_least_1", s.kappa >= 1),
            ("slice_margin", slices_ok),
            ("remaining_window_width", d.is_some_and(|d| d - c >= kappa && d - c <= 2 * kappa)),
            ("zeta_covers_d_minus_tau", d.is_some_and(|d| zeta as i64 >= d - tau_i)),
            ("d_minus_tau_covers_window", d.is_some_and(|d| d - tau_i >= 4 * (d - c))),
            ("r_covers_d_minus_tau", d.is_some_and(|d| s.log2_r >= (d - tau_i) as f64)),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub ok: bool,
    pub violations: Vec<String>,
    /// Least passing driver for this `Ξ` and split constant.
    pub nu0: Option<u64>,
}

/// The violated constraints of `s`.
pub fn violations(s: &ParameterSchedule) -> Vec<String> {
    s.constraints().into_iter().filter(|&(_, ok)| !ok).map(|(n, _)| n.to_string()).collect()
}

fn passes(nu: u64, xi: Rational, split: u64) -> bool {
    build_schedule_with(nu, xi, split).is_ok_and(|s| violations(&s).is_empty())
}

const SCAN_MAX: u64 = 1_000_000_000_000;
const SCAN_STEPS_PER_OCTAVE: u32 = 8;

/// Log-spaced drivers `⌈2^{k/8}⌉` up to `10¹²`.
pub fn scan_grid() -> Vec<u64> {
    let mut out: Vec<u64> = (0..)
        .map(|k: u32| (k as f64 / SCAN_STEPS_PER_OCTAVE as f64).exp2().ceil() as u64)
        .take_while(|&v| v <= SCAN_MAX)
        .collect();
    out.dedup();
    out
}

/// First grid point from which every later grid point passes, refined by bisection
/// against the preceding failing grid point.
pub fn find_nu0(xi: Rational, split: u64) -> Option<u64> {
    let grid = scan_grid();
    let flags: Vec<bool> = grid.iter().map(|&v| passes(v, xi, split)).collect();
    let first = (0..grid.len()).rev().take_while(|&i| flags[i]).last()?;
    if first == 0 {
        return Some(grid[0]);
    }
    let (mut lo, mut hi) = (grid[first - 1], grid[first]);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if passes(mid, xi, split) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

pub fn audit_schedule(s: &ParameterSchedule) -> AuditReport {
    let v = violations(s);
    AuditReport { ok: v.is_empty(), violations: v, nu0: find_nu0(s.xi, s.split_constant) }
}
