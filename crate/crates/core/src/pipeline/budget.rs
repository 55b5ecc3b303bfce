use serde::Serialize;

use super::schedule::{violations, ParameterSchedule};
use crate::error::{Error, Result};
use crate::numeric::log2_sum_exp2;

/// How a budget entry was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermKind {
    ClosedForm,
    /// A proven upper bound standing in for a data-dependent quantity.
    Surrogate,
    /// Depends on data the schedule does not fix; no number is emitted.
    DataDependent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetTerm {
    pub name: &'static str,
    pub label: &'static str,
    pub kind: TermKind,
    pub log2: Option<f64>,
    /// `−log₂E / ν`, so the term is `2^{−cν}`.
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub nu: u64,
    pub terms: Vec<BudgetTerm>,
    /// `log₂E₄⁻`: the carry term before the `log ν` factor.
    pub e4_minus_log2: f64,
    pub all_negative: bool,
}

impl ErrorBudget {
    pub fn term(&self, name: &str) -> Option<&BudgetTerm> {
        self.terms.iter().find(|t| t.name == name)
    }

    /// Names of numeric terms with a nonnegative exponent.
    pub fn nonnegative_terms(&self) -> Vec<&'static str> {
        self.terms.iter().filter(|t| t.log2.is_some_and(|v| v >= 0.0)).map(|t| t.name).collect()
    }
}

fn ls(terms: &[f64]) -> f64 {
    log2_sum_exp2(terms)
}

/// `log₂E₁₂`, maximised over the slices `ℓ < L`.
fn e12(s: &ParameterSchedule) -> f64 {
    let l = s.big_l.unwrap_or(0);
    let nu = s.nu as f64;
    let (tau, zeta) = (s.tau as f64, s.zeta as f64);
    let kp = (s.kappa + s.delta) as f64;
    let base = (l.max(1) as f64).log2() + 4.0 * kp + 4.0 + 0.5 * nu.log2();
    (0..l.max(1))
        .map(|ell| {
            let b = s.b_ell(ell) as f64;
            base + ((b - tau - zeta) / 2.0).max(0.0) + ls(&[-(s.omega as f64) / 4.0, (tau - b) / 4.0])
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The closed-form and surrogate exponents of `E₀ … E₁₄` for an audited schedule.
pub fn error_budget(s: &ParameterSchedule) -> Result<ErrorBudget> {
    let v = violations(s);
    if !v.is_empty() {
        return Err(Error::Infeasible(format!("schedule audit failed: {}", v.join(", "))));
    }
    let nu = s.nu as f64;
    let xinu = s.xi.to_f64() * nu;
    let (lambda, rho, u, tau, zeta) = (s.lambda as f64, s.rho as f64, s.u as f64, s.tau as f64, s.zeta as f64);
    let (b, h, r1, r, sv) = (s.log2_b, s.log2_h, s.log2_r1, s.log2_r, s.log2_s);
    let (eta0, eta1, omega) = (s.eta0 as f64, s.eta1 as f64, s.omega as f64);
    let mu = s.mu as f64;
    let l = s.big_l.unwrap_or(0) as f64;
    let (kappa, delta) = (s.kappa as f64, s.delta as f64);
    let (c, a) = (s.c as f64, s.a as f64);
    let d = s.d.unwrap_or(0) as f64;

    let e0 = ls(&[lambda - u - h, lambda / 3.0 - nu, 1.5 * h + (nu - lambda) / 2.0]);
    let e1 = sv + b + h - (nu - tau);
    let e2 = -36.0 * xinu + sv + 2.0 * h + nu - rho;
    let e3 = 2.0 * h + zeta + ls(&[sv + b + rho + tau - lambda, 2.0 * sv + 2.0 * b + 2.0 * tau - lambda]);
    let e4_minus = ls(&[r - zeta, -r, r + 2.0 * nu - lambda]);
    let e4 = e4_minus + nu.ln().log2();
    let e5 = 2.0 * h + sv + b + omega - eta0;
    let e6 = ls(&[h - eta0, h - sv]);
    let e7 = 2.0 * (sv + b) + 3.0 * tau - lambda + 2.0 * lambda.log2() + eta1 - (tau - zeta);
    let m_sum = ls(&[(4.0 * l.max(1.0)).log2() + 5.0 * (kappa + delta) + 7.0, 2.0 + 3.0 * (c - a)]);
    let e8 = ls(&[r1 - mu + m_sum, -r1]);
    let e12v = e12(s);
    let e9 = ls(&[-delta, e12v]);
    let e10 = d - c - r1;
    let e13 = ls(&[2.0 * nu.log2() - (nu - rho), -zeta / 4.0]);
    let e14 = 6.0 * nu.log2() + ls(&[-xinu / 200.0, 2.0 * xinu / 25.0 + 2.0 * nu.log2() - omega]);

    use TermKind::*;
    let entry = |name, label, kind, v: Option<f64>| BudgetTerm { name, label, kind, log2: v, c: v.map(|x| -x / nu) };
    let terms = vec![
        entry("E0", "trigonometric approximation of the digit-window indicator", ClosedForm, Some(e0)),
        entry("E1", "dropping the summation-range conditions on the shifts", ClosedForm, Some(e1)),
        entry("E2", "odd multipliers m(n01) in summation by parts", Surrogate, Some(e2)),
        entry("E3", "removing the lowest zeta digits from the geometric-sum argument", ClosedForm, Some(e3)),
        entry("E4", "second van der Corput step and the carry lemma", ClosedForm, Some(e4)),
        entry("E5", "Dirichlet approximation by the odd factor T", ClosedForm, Some(e5)),
        entry("E6", "indices without a good factor T", ClosedForm, Some(e6)),
        entry("E7", "representative sampling of the geometric sum", ClosedForm, Some(e7)),
        entry("E8", "summation limits in the iterated van der Corput step", ClosedForm, Some(e8)),
        entry("E9", "carry overflow in the slice margins", ClosedForm, Some(e9)),
        entry("E10", "passage to a full period before the Gowers norm", ClosedForm, Some(e10)),
        entry("E11", "fourfold discrepancy, estimated only on average", DataDependent, None),
        entry("E12", "uniform distribution of the slope digit blocks", ClosedForm, Some(e12v)),
        entry("E13", "leftshift elimination of the lowest block", ClosedForm, Some(e13)),
        entry("E14", "fourfold independence average", Surrogate, Some(e14)),
    ];
    let all_negative = terms.iter().all(|t| t.log2.is_none_or(|v| v < 0.0));
    Ok(ErrorBudget { nu: s.nu, terms, e4_minus_log2: e4_minus, all_negative })
}
