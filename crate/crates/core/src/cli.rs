//! Command-line front end. [`run_args`] parses and runs in-process so the binary
//! and the tests share one code path.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::correlations::{
    admissible_specs, fit_iterated_constant, low_digits_cancel, random_specs, s8_defining, s8_linearized,
    vdc_generalized_check, vdc_iterated_check, vdc_mr_check, CorrelationSpec,
};
use crate::digits::carry_count;
use crate::dirichlet::{odd_eliminate, odd_elimination_census};
use crate::discrepancy::{discrepancy, etk_rhs, TorusSequence};
use crate::error::{Error, Result};
use crate::pipeline::{
    audit_schedule, build_schedule_with, density_experiment, error_budget, gowers_decay, s0_decay_experiment, Rational,
    DEFAULT_SPLIT_CONSTANT,
};
use crate::trig::{interval_detector, interval_indicator, vaaler_psi};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

/// Environment variable that overrides `--threads`.
pub const THREADS_ENV: &str = "GELFOND_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    PlotData,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "gelfond", version, about = "Thue–Morse along cubes: experiments and verifiers")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Seed for randomized corpora.
    #[arg(long, default_value = "0x5EED", value_parser = parse_u64, global = true)]
    pub seed: u64,
    /// Worker threads; `auto` uses all cores.
    #[arg(long, default_value = "auto", value_parser = parse_threads, global = true)]
    pub threads: usize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Count n < N with t(n³) = 0 at geometric checkpoints.
    Density(DensityArgs),
    /// sup over a ξ grid of |S₀(ν, ξ)|, optionally over a range of ν with a slope fit.
    ExpsumS0(ExpsumArgs),
    /// Gowers norm powers of the truncated Thue–Morse sequence.
    Gowers(GowersArgs),
    /// Carry-lemma count against its bound.
    Carry(CarryArgs),
    /// Odd-multiplier digit elimination.
    Oddelim(OddelimArgs),
    /// Parameter schedule, audit and error budget.
    Params(ParamsArgs),
    /// Vaaler approximation and interval-detector bounds on sample points.
    Vaaler(VaalerArgs),
    /// Discrepancy of a point set read from a file.
    Discrepancy(DiscrepancyArgs),
    /// Defining against linearised eightfold correlation.
    S8Identity(S8Args),
    /// Van der Corput inequality verifiers on random corpora.
    VdcVerify(VdcArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub log2_n: u32,
    #[arg(long, default_value_t = 1)]
    pub checkpoints: u32,
}

#[derive(Debug, Clone, Args)]
pub struct ExpsumArgs {
    #[arg(long)]
    pub nu: u32,
    /// First ν of a decay run ending at `--nu`.
    #[arg(long)]
    pub nu_from: Option<u32>,
    /// Grid size; defaults to 2^(ν+2) capped at 2^22.
    #[arg(long)]
    pub xi_grid: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct GowersArgs {
    #[arg(long)]
    pub rho: u32,
    #[arg(long)]
    pub q: u32,
    /// First ρ of a decay run ending at `--rho`.
    #[arg(long)]
    pub rho_from: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct CarryArgs {
    #[arg(long)]
    pub a: u64,
    #[arg(long)]
    pub b: u64,
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub lambda: u32,
}

#[derive(Debug, Clone, Args)]
pub struct OddelimArgs {
    #[arg(long)]
    pub kappa: u32,
    #[arg(long)]
    pub ell: u32,
    /// Count the ω satisfying the property instead of listing them.
    #[arg(long)]
    pub census: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ParamsArgs {
    #[arg(long)]
    pub nu: u64,
    #[arg(long, default_value = "1/15000")]
    pub xi: Rational,
    #[arg(long)]
    pub audit: bool,
    #[arg(long)]
    pub budget: bool,
    /// Denominator shared by ζ, ω and η₀.
    #[arg(long, default_value_t = DEFAULT_SPLIT_CONSTANT)]
    pub split_constant: u64,
}

#[derive(Debug, Clone, Args)]
pub struct VaalerArgs {
    #[arg(long)]
    pub h: u64,
    #[arg(long)]
    pub samples: u64,
}

#[derive(Debug, Clone, Args)]
pub struct DiscrepancyArgs {
    #[arg(long)]
    pub dim: usize,
    /// Whitespace- or comma-separated rows of `dim` coordinates.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub etk: Option<u64>,
    /// Grid resolution for dimension ≥ 2.
    #[arg(long, default_value_t = 64)]
    pub grid: u64,
}

#[derive(Debug, Clone, Args)]
pub struct S8Args {
    #[arg(long)]
    pub exhaustive_nu: u32,
    #[arg(long, default_value_t = 12)]
    pub lambda: u32,
    /// Additional random specs at larger λ.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VdcVariant {
    Gen,
    Mr,
    Iter,
}

#[derive(Debug, Clone, Args)]
pub struct VdcArgs {
    #[arg(long, value_enum)]
    pub variant: VdcVariant,
    #[arg(long)]
    pub trials: usize,
}

fn parse_u64(s: &str) -> std::result::Result<u64, String> {
    let t = s.trim();
    let r = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    r.map_err(|e| format!("{s:?}: {e}"))
}

fn parse_threads(s: &str) -> std::result::Result<usize, String> {
    if s == "auto" {
        return Ok(0);
    }
    s.parse::<usize>().map_err(|e| format!("{s:?}: {e}"))
}

/// A tabular view of a result: CSV rows plus plot series.
#[derive(Debug, Default)]
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    series: Vec<(String, Vec<(f64, f64)>)>,
}

struct Outcome {
    json: Value,
    table: Table,
    status: i32,
}

fn ok(json: Value, table: Table) -> Outcome {
    Outcome { json, table, status: EXIT_OK }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable result")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::GuardExceeded(_) => EXIT_GUARD,
        Error::PropertyViolation(_) => EXIT_VIOLATION,
        _ => EXIT_INVALID,
    }
}

/// Parses `args` (including the program name) and runs; usage text and errors go to `err`.
pub fn run_args<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            code
        }
    }
}

/// Thread count after applying the environment override; 0 means all cores.
pub fn effective_threads(cfg: &RunConfig) -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => parse_threads(v.trim()).map_err(|e| Error::arg(format!("{THREADS_ENV}: {e}"))),
        Err(_) => Ok(cfg.threads),
    }
}

/// Runs one configured command, writing the formatted result to `out`.
pub fn run(cfg: &RunConfig, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let result = effective_threads(cfg).and_then(|threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::arg(format!("thread pool: {e}")))?;
        pool.install(|| dispatch(cfg))
    });
    match result {
        Ok(outcome) => match emit(cfg.format, &outcome, out) {
            Ok(()) => outcome.status,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_INVALID
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(format: Format, o: &Outcome, out: &mut impl Write) -> std::io::Result<()> {
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(&o.json).map_err(std::io::Error::other)?;
            writeln!(out, "{text}")
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&o.table.header).map_err(std::io::Error::other)?;
            for row in &o.table.rows {
                w.write_record(row).map_err(std::io::Error::other)?;
            }
            let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
            out.write_all(&bytes)
        }
        Format::PlotData => {
            for (i, (name, pts)) in o.table.series.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                    writeln!(out)?;
                }
                writeln!(out, "# series {name}")?;
                for (x, y) in pts {
                    writeln!(out, "{x} {y}")?;
                }
            }
            Ok(())
        }
    }
}

fn dispatch(cfg: &RunConfig) -> Result<Outcome> {
    match &cfg.command {
        Command::Density(a) => cmd_density(a),
        Command::ExpsumS0(a) => cmd_expsum(a, cfg.seed),
        Command::Gowers(a) => cmd_gowers(a),
        Command::Carry(a) => cmd_carry(a),
        Command::Oddelim(a) => cmd_oddelim(a, cfg.seed),
        Command::Params(a) => cmd_params(a),
        Command::Vaaler(a) => cmd_vaaler(a, cfg.seed),
        Command::Discrepancy(a) => cmd_discrepancy(a),
        Command::S8Identity(a) => cmd_s8(a, cfg.seed),
        Command::VdcVerify(a) => cmd_vdc(a, cfg.seed),
    }
}

fn cmd_density(a: &DensityArgs) -> Result<Outcome> {
    let r = density_experiment(a.log2_n, a.checkpoints)?;
    let last = r.last();
    let json = json!({
        "N": last.n,
        "count": last.count,
        "deviation": last.deviation,
        "checkpoints": r.checkpoints,
        "slope": r.slope,
    });
    let table = Table {
        header: vec!["N", "count", "deviation"],
        rows: r
            .checkpoints
            .iter()
            .map(|c| vec![c.n.to_string(), c.count.to_string(), c.deviation.to_string()])
            .collect(),
        series: vec![("deviation".into(), r.checkpoints.iter().map(|c| (c.n as f64, c.deviation)).collect())],
    };
    Ok(ok(json, table))
}

fn cmd_expsum(a: &ExpsumArgs, seed: u64) -> Result<Outcome> {
    let from = a.nu_from.unwrap_or(a.nu);
    if from > a.nu {
        return Err(Error::arg("--nu-from exceeds --nu"));
    }
    let nus: Vec<u32> = (from..=a.nu).collect();
    let d = s0_decay_experiment(&nus, a.xi_grid, seed)?;
    let last = d.rows.last().expect("nonempty range");
    let json = json!({
        "nu": last.nu,
        "xi_grid": last.xi_grid,
        "sup": last.sup,
        "argmax_k": last.argmax_k,
        "padding": last.padding,
        "rows": d.rows,
        "fit": d.fit,
    });
    let table = Table {
        header: vec!["nu", "xi_grid", "sup", "argmax_k", "padding"],
        rows: d
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.nu.to_string(),
                    r.xi_grid.to_string(),
                    r.sup.to_string(),
                    r.argmax_k.to_string(),
                    r.padding.to_string(),
                ]
            })
            .collect(),
        series: vec![("log2_sup".into(), d.rows.iter().map(|r| (r.nu as f64, r.sup.log2())).collect())],
    };
    Ok(ok(json, table))
}

fn cmd_gowers(a: &GowersArgs) -> Result<Outcome> {
    let from = a.rho_from.unwrap_or(a.rho);
    if from > a.rho {
        return Err(Error::arg("--rho-from exceeds --rho"));
    }
    let rhos: Vec<u32> = (from..=a.rho).collect();
    let d = gowers_decay(a.q, &rhos)?;
    let last = d.rows.last().expect("nonempty range");
    let json = json!({
        "rho": last.rho,
        "q": a.q,
        "value": last.value,
        "rows": d.rows,
        "eta": d.eta,
        "log2_c": d.log2_c,
    });
    let table = Table {
        header: vec!["rho", "q", "value"],
        rows: d.rows.iter().map(|r| vec![r.rho.to_string(), a.q.to_string(), r.value.to_string()]).collect(),
        series: vec![(format!("u{}", a.q), d.rows.iter().map(|r| (r.rho as f64, r.value)).collect())],
    };
    Ok(ok(json, table))
}

fn cmd_carry(a: &CarryArgs) -> Result<Outcome> {
    let c = carry_count(a.a, a.b, a.r, a.lambda)?;
    let within = c.within_bound();
    let json = json!({
        "a": a.a,
        "b": a.b,
        "r": a.r,
        "lambda": a.lambda,
        "count": c.count,
        "bound": c.bound_f64(),
        "bound_num": c.bound.as_ref().map(|b| b.0.to_string()),
        "bound_den": c.bound.as_ref().map(|b| b.1.to_string()),
        "within_bound": within,
        "cubic_bound": c.cubic_bound_f64(),
        "within_cubic_bound": c.within_cubic_bound(),
    });
    let table = Table {
        header: vec!["a", "b", "r", "lambda", "count", "bound", "within_bound"],
        rows: vec![vec![
            a.a.to_string(),
            a.b.to_string(),
            a.r.to_string(),
            a.lambda.to_string(),
            c.count.to_string(),
            fmt_opt(c.bound_f64()),
            within.map_or_else(String::new, |w| w.to_string()),
        ]],
        series: vec![("count_vs_bound".into(), vec![(c.count as f64, c.bound_f64().unwrap_or(f64::NAN))])],
    };
    let status = if within == Some(false) { EXIT_VIOLATION } else { EXIT_OK };
    Ok(Outcome { json, table, status })
}

fn cmd_oddelim(a: &OddelimArgs, seed: u64) -> Result<Outcome> {
    if a.census {
        let c = odd_elimination_census(a.ell, a.kappa, seed)?;
        let table = Table {
            header: vec!["ell", "kappa", "mu", "total", "good_count", "bound", "sampled", "holds"],
            rows: vec![vec![
                c.ell.to_string(),
                c.kappa.to_string(),
                c.mu.to_string(),
                c.total.to_string(),
                c.good_count.to_string(),
                c.bound.to_string(),
                c.sampled.to_string(),
                c.holds.to_string(),
            ]],
            series: vec![("census".into(), vec![(c.good_count as f64, c.bound as f64)])],
        };
        let status = if c.holds { EXIT_OK } else { EXIT_VIOLATION };
        return Ok(Outcome { json: to_json(&c), table, status });
    }
    if a.kappa == 0 || a.ell < 4 * a.kappa + 4 {
        return Err(Error::params("need kappa >= 1 and l >= 4 kappa + 4"));
    }
    let mu = a.ell - 4 * a.kappa - 4;
    let total = 1u64 << (4 * a.kappa + 4);
    let results =
        (0..total).into_par_iter().map(|w| odd_eliminate(w, a.ell, a.kappa, mu)).collect::<Result<Vec<_>>>()?;
    let good = results.iter().filter(|r| r.found).count();
    let json = json!({ "ell": a.ell, "kappa": a.kappa, "mu": mu, "good_count": good, "results": results });
    let table = Table {
        header: vec!["omega", "found", "witness_m", "checked_omega0"],
        rows: results
            .iter()
            .map(|r| {
                vec![
                    r.omega.to_string(),
                    r.found.to_string(),
                    r.witness_m.map_or_else(String::new, |m| m.to_string()),
                    r.checked_omega0.to_string(),
                ]
            })
            .collect(),
        series: vec![(
            "witness".into(),
            results.iter().map(|r| (r.omega as f64, r.witness_m.map_or(f64::NAN, |m| m as f64))).collect(),
        )],
    };
    Ok(ok(json, table))
}

fn cmd_params(a: &ParamsArgs) -> Result<Outcome> {
    let s = build_schedule_with(a.nu, a.xi, a.split_constant)?;
    let mut json = json!({ "schedule": s });
    let mut rows = Vec::new();
    let audit = a.audit.then(|| audit_schedule(&s));
    if let Some(au) = &audit {
        json["audit"] = to_json(au);
    }
    if a.budget {
        match error_budget(&s) {
            Ok(b) => {
                for t in &b.terms {
                    rows.push(vec![
                        t.name.to_string(),
                        to_json(&t.kind).as_str().unwrap_or_default().to_string(),
                        fmt_opt(t.log2),
                        fmt_opt(t.c),
                    ]);
                }
                json["budget"] = to_json(&b);
            }
            Err(e) => {
                json["budget"] = Value::Null;
                json["budget_error"] = Value::String(e.to_string());
            }
        }
    }
    let series = vec![(
        "budget_c".into(),
        rows.iter().enumerate().filter_map(|(i, r)| r[3].parse::<f64>().ok().map(|c| (i as f64, c))).collect(),
    )];
    Ok(ok(json, Table { header: vec!["term", "kind", "log2", "c"], rows, series }))
}

fn cmd_vaaler(a: &VaalerArgs, seed: u64) -> Result<Outcome> {
    if a.samples == 0 || a.samples > 1 << 24 {
        return Err(Error::guard("samples outside 1..=2^24"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut alpha, mut beta): (f64, f64) = (rng.random(), rng.random());
    if alpha > beta {
        std::mem::swap(&mut alpha, &mut beta);
    }
    let det = interval_detector(alpha, beta, a.h)?;
    let checks: Vec<(f64, f64)> = (0..a.samples)
        .into_par_iter()
        .map(|k| {
            let t = (k as f64 + 0.5) / a.samples as f64;
            let v = vaaler_psi(a.h, t).expect("H >= 1 checked");
            let saw = (v.psi_h - v.psi).abs() - v.kappa_h;
            let ind = (interval_indicator(alpha, beta, t) - det.detector(t)).abs() - det.envelope(t);
            (saw, ind)
        })
        .collect();
    let tol = 1e-9;
    let saw_viol = checks.iter().filter(|c| c.0 > tol).count();
    let det_viol = checks.iter().filter(|c| c.1 > tol).count();
    let max_saw = checks.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
    let max_det = checks.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let json = json!({
        "h": a.h,
        "samples": a.samples,
        "alpha": alpha,
        "beta": beta,
        "sawtooth_violations": saw_viol,
        "detector_violations": det_viol,
        "max_sawtooth_excess": max_saw,
        "max_detector_excess": max_det,
    });
    let table = Table {
        header: vec![
            "h",
            "samples",
            "sawtooth_violations",
            "detector_violations",
            "max_sawtooth_excess",
            "max_detector_excess",
        ],
        rows: vec![vec![
            a.h.to_string(),
            a.samples.to_string(),
            saw_viol.to_string(),
            det_viol.to_string(),
            max_saw.to_string(),
            max_det.to_string(),
        ]],
        series: vec![
            (
                "sawtooth_excess".into(),
                checks.iter().enumerate().map(|(k, c)| ((k as f64 + 0.5) / a.samples as f64, c.0)).collect(),
            ),
            (
                "detector_excess".into(),
                checks.iter().enumerate().map(|(k, c)| ((k as f64 + 0.5) / a.samples as f64, c.1)).collect(),
            ),
        ],
    };
    let status = if saw_viol + det_viol > 0 { EXIT_VIOLATION } else { EXIT_OK };
    Ok(Outcome { json, table, status })
}

/// Reads rows of `dim` numbers separated by commas or whitespace; `#` starts a comment.
pub fn read_points(text: &str, dim: usize) -> Result<Vec<Vec<f64>>> {
    let mut rdr =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).comment(Some(b'#')).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::arg(format!("input: {e}")))?;
        let row: Vec<f64> = rec
            .iter()
            .flat_map(|f| f.split_whitespace())
            .map(|f| f.parse::<f64>().map_err(|_| Error::arg(format!("line {}: bad number {f:?}", line + 1))))
            .collect::<Result<_>>()?;
        if row.is_empty() {
            continue;
        }
        if row.len() != dim {
            return Err(Error::arg(format!("line {}: {} values, need {dim}", line + 1, row.len())));
        }
        out.push(row);
    }
    Ok(out)
}

fn cmd_discrepancy(a: &DiscrepancyArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&a.input).map_err(|e| Error::arg(format!("{}: {e}", a.input.display())))?;
    let pts = read_points(&text, a.dim)?;
    let seq = TorusSequence::new(a.dim, &pts)?;
    let mut rep = discrepancy(&seq, a.grid)?;
    if let Some(h) = a.etk {
        rep.etk_rhs = Some(etk_rhs(&seq, h)?);
        rep.h_used = Some(h);
    }
    let table = Table {
        header: vec!["dim", "n", "value", "upper_bound", "etk_rhs"],
        rows: vec![vec![
            rep.dim.to_string(),
            rep.n.to_string(),
            rep.value.to_string(),
            rep.upper_bound.to_string(),
            fmt_opt(rep.etk_rhs),
        ]],
        series: vec![("discrepancy".into(), vec![(rep.n as f64, rep.value)])],
    };
    let status = match rep.etk_rhs {
        Some(rhs) if rep.value > rhs * (1.0 + 1e-12) => EXIT_VIOLATION,
        _ => EXIT_OK,
    };
    Ok(Outcome { json: to_json(&rep), table, status })
}

/// Outcome of comparing the two forms of `S₈` on one spec.
#[derive(Debug, Clone, Serialize)]
pub struct S8Row {
    pub spec: CorrelationSpec,
    pub defining: f64,
    pub linearized: f64,
    pub low_digits_cancel: bool,
}

impl S8Row {
    pub fn agrees(&self, tol: f64) -> bool {
        (self.defining.abs() - self.linearized).abs() <= tol
    }
}

pub fn s8_compare(specs: &[CorrelationSpec]) -> Result<Vec<S8Row>> {
    specs
        .par_iter()
        .map(|s| {
            Ok(S8Row {
                spec: *s,
                defining: s8_defining(s)?,
                linearized: s8_linearized(s)?,
                low_digits_cancel: low_digits_cancel(s)?,
            })
        })
        .collect()
}

fn cmd_s8(a: &S8Args, seed: u64) -> Result<Outcome> {
    if a.exhaustive_nu > 8 || a.lambda > 24 {
        return Err(Error::guard("exhaustive grid limited to nu <= 8 and lambda <= 24"));
    }
    let exhaustive = admissible_specs(a.lambda, a.exhaustive_nu);
    let random = random_specs(a.random, seed);
    let tol = 1e-10;
    let summarize = |rows: &[S8Row]| {
        let fails: Vec<&S8Row> = rows.iter().filter(|r| !r.agrees(tol)).collect();
        let max_diff = rows.iter().map(|r| (r.defining.abs() - r.linearized).abs()).fold(0.0, f64::max);
        json!({
            "checked": rows.len(),
            "failures": fails.len(),
            "low_digit_failures": rows.iter().filter(|r| !r.low_digits_cancel).count(),
            "max_diff": max_diff,
            "first_failure": fails.first().map(to_json),
        })
    };
    let ex_rows = s8_compare(&exhaustive)?;
    let rnd_rows = s8_compare(&random)?;
    let ex = summarize(&ex_rows);
    let rnd = summarize(&rnd_rows);
    let failures = ex["failures"].as_u64().unwrap_or(0) + rnd["failures"].as_u64().unwrap_or(0);
    let json = json!({ "lambda": a.lambda, "exhaustive_nu": a.exhaustive_nu, "exhaustive": ex, "random": rnd });
    let table = Table {
        header: vec!["corpus", "checked", "failures", "low_digit_failures", "max_diff"],
        rows: [("exhaustive", &json["exhaustive"]), ("random", &json["random"])]
            .iter()
            .map(|(n, v)| {
                vec![
                    n.to_string(),
                    v["checked"].to_string(),
                    v["failures"].to_string(),
                    v["low_digit_failures"].to_string(),
                    v["max_diff"].to_string(),
                ]
            })
            .collect(),
        series: vec![(
            "defining_vs_linearized".into(),
            ex_rows.iter().chain(&rnd_rows).map(|r| (r.defining.abs(), r.linearized)).collect(),
        )],
    };
    let status = if failures > 0 { EXIT_VIOLATION } else { EXIT_OK };
    Ok(Outcome { json, table, status })
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// One trial's sides of the chosen inequality.
#[derive(Debug, Clone, Serialize)]
pub struct VdcTrial {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// Error term of the iterated form; `rhs` is then `main + err`.
    pub err: Option<f64>,
}

/// Runs `trials` seeded random instances; for the iterated variant also fits the constant.
pub fn vdc_corpus(variant: VdcVariant, trials: usize, seed: u64) -> Result<(Vec<VdcTrial>, Option<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    let mut iter_checks = Vec::new();
    for _ in 0..trials {
        match variant {
            VdcVariant::Gen => {
                let m = rng.random_range(1..=64usize);
                let x: Vec<Complex64> = (0..m).map(|_| random_complex(&mut rng)).collect();
                let k = rng.random_range(1..=6usize);
                let s: Vec<i64> = (0..k).map(|_| rng.random_range(-8..=8)).collect();
                let c = vdc_generalized_check(&x, &s)?;
                out.push(VdcTrial { lhs: c.lhs, rhs: c.rhs, holds: c.holds(), err: None });
            }
            VdcVariant::Mr => {
                let n = rng.random_range(1..=128usize);
                let z: Vec<Complex64> = (0..n).map(|_| random_complex(&mut rng)).collect();
                let c = vdc_mr_check(&z, rng.random_range(1..=8), rng.random_range(1..=8))?;
                out.push(VdcTrial { lhs: c.lhs, rhs: c.rhs, holds: c.holds(), err: None });
            }
            VdcVariant::Iter => {
                let len = rng.random_range(64..=256usize);
                let (a2, a3): (f64, f64) = (rng.random(), rng.random());
                let g: Vec<Complex64> = (0..len)
                    .map(|n| {
                        let x = n as f64 / len as f64;
                        crate::trig::e_of(a2 * (n * n) as f64 / len as f64 + a3 * x * x * x)
                    })
                    .collect();
                let q = rng.random_range(1..=3usize);
                let ms: Vec<u64> = (0..q).map(|_| rng.random_range(1..=4)).collect();
                let c = vdc_iterated_check(&g, &ms, rng.random_range(2..=4))?;
                iter_checks.push(c);
                out.push(VdcTrial {
                    lhs: c.lhs,
                    rhs: c.main + c.err,
                    holds: c.lhs <= c.main + c.err,
                    err: Some(c.err),
                });
            }
        }
    }
    let fitted = (variant == VdcVariant::Iter).then(|| fit_iterated_constant(&iter_checks));
    Ok((out, fitted))
}

fn cmd_vdc(a: &VdcArgs, seed: u64) -> Result<Outcome> {
    if a.trials > 100_000 {
        return Err(Error::guard("at most 100000 trials"));
    }
    let (trials, fitted) = vdc_corpus(a.variant, a.trials, seed)?;
    let violations = match a.variant {
        // the iterated form holds only up to an unspecified constant
        VdcVariant::Iter => 0,
        _ => trials.iter().filter(|t| !t.holds).count(),
    };
    let max_ratio = trials.iter().filter(|t| t.rhs > 0.0).map(|t| t.lhs / t.rhs).fold(0.0, f64::max);
    let variant = match a.variant {
        VdcVariant::Gen => "gen",
        VdcVariant::Mr => "mr",
        VdcVariant::Iter => "iter",
    };
    let json = json!({
        "variant": variant,
        "trials": a.trials,
        "violations": violations,
        "max_ratio": max_ratio,
        "fitted_constant": fitted,
    });
    let table = Table {
        header: vec!["trial", "lhs", "rhs", "holds"],
        rows: trials
            .iter()
            .enumerate()
            .map(|(i, t)| vec![i.to_string(), t.lhs.to_string(), t.rhs.to_string(), t.holds.to_string()])
            .collect(),
        series: vec![("lhs_vs_rhs".into(), trials.iter().map(|t| (t.rhs, t.lhs)).collect())],
    };
    let status = if violations > 0 { EXIT_VIOLATION } else { EXIT_OK };
    Ok(Outcome { json, table, status })
}
