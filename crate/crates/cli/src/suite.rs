//! The identity battery: every cross-representation check in the library,
//! grouped by area and run with one configuration.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use qspectra_core::bell::{
    bell_recurrence, faa_di_bruno, p_coefficient, product_expansion, q_coefficient, ZeroVector,
};
use qspectra_core::csgen::{
    bilateral_collapse, free_energy, free_energy_coefficients, lmov_log_form, lmov_product, p_from_w_exact,
    partition_function, symmetry_checks, tuples_up_to, tuples_with_weights, w_from_p_exact, Alphabet,
    FunctionBasis, IndexChoice, InvariantTable, LinkData, PartitionTuple,
};
use qspectra_core::hierarchy::{
    b44, bernoulli_kernel, factorized_hierarchy, g1_spectral_check, g21_check, g22_check, gamma1_qq_check,
    gamma1_reflection_check, gamma2_modularity_check, gamma2_qqq_check, NomeTriple,
};
use qspectra_core::multipartite::{
    count_multipartitions, gf_distinct, gf_graded, gf_specialized, gf_unrestricted, negate_first_variable,
    beta_series, Convention, Kind,
};
use qspectra_core::scalar::{c, real};
use qspectra_core::spectral::{
    beta_spectral, de3_check, euler_check, gf_spectral_check, ruelle_identity, ruelle_powered, zeta_cross_check,
    zeta_zero_check, RuelleArg, SpectralParams,
};
use qspectra_core::symmfunc::{orthogonality_check, partitions, schur_exact, schur_tableaux, Partition};
use qspectra_core::{Error, IdentityReport, Result, Scalar, Status, TruncatedSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

/// Every tunable default of the battery.
pub mod defaults {
    use qspectra_core::Scalar;

    pub const NOME: Scalar = Scalar::new(0.2, 0.0);
    pub const TOLERANCE: f64 = 1e-7;
    /// Triple products at modest truncation; decoupled from the main tolerance.
    pub const MODULARITY_TOLERANCE: f64 = 1e-4;
    pub const ORDER: u32 = 12;
    pub const SEED: u64 = 2024;
    pub const MAX_LEVELS: u32 = 500;
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub tolerance: f64,
    pub modularity_tolerance: f64,
    pub nome: SpectralParams,
    pub order: u32,
    pub max_levels: u32,
    pub seed: u64,
    /// Group names or identity labels; empty means everything.
    pub identities: Vec<String>,
    pub m: Option<u32>,
    pub output: Option<PathBuf>,
    pub parallel: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            tolerance: defaults::TOLERANCE,
            modularity_tolerance: defaults::MODULARITY_TOLERANCE,
            nome: SpectralParams::from_nome(defaults::NOME).expect("default nome"),
            order: defaults::ORDER,
            max_levels: defaults::MAX_LEVELS,
            seed: defaults::SEED,
            identities: Vec::new(),
            m: None,
            output: None,
            parallel: false,
        }
    }
}

/// A suite configuration file (TOML or JSON). Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub tolerance: Option<f64>,
    pub modularity_tolerance: Option<f64>,
    pub q: Option<String>,
    pub order: Option<u32>,
    pub max_levels: Option<u32>,
    pub seed: Option<u64>,
    pub precision: Option<String>,
    pub identities: Option<Vec<String>>,
    pub m: Option<u32>,
    pub output: Option<PathBuf>,
    pub parallel: Option<bool>,
}

impl ConfigFile {
    pub fn parse(text: &str, path_hint: &str) -> std::result::Result<Self, String> {
        let json = path_hint.ends_with(".json") || text.trim_start().starts_with('{');
        if json {
            serde_json::from_str(text).map_err(|e| format!("config: {e}"))
        } else {
            toml::from_str(text).map_err(|e| format!("config: {e}"))
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> std::result::Result<(), String> {
        for (name, v) in [("tolerance", self.tolerance), ("modularity tolerance", self.modularity_tolerance)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be a positive number, got {v}"));
            }
        }
        if self.order == 0 {
            return Err("series order must be positive".into());
        }
        if let Some(m) = self.m {
            if !(1..=4).contains(&m) {
                return Err(format!("--m must be between 1 and 4, got {m}"));
            }
        }
        for id in &self.identities {
            if !known_selection(id) {
                return Err(format!("unknown identity {id:?}; known: {}", selection_names().join(", ")));
            }
        }
        Ok(())
    }

    fn strict(&self, criterion: f64) -> f64 {
        self.tolerance.min(criterion)
    }

    fn ms(&self) -> Vec<u32> {
        match self.m {
            Some(m) => vec![m],
            None => vec![1, 2, 3],
        }
    }

    fn q(&self) -> Scalar {
        self.nome.q
    }
}

type GroupFn = fn(&SuiteConfig) -> Vec<IdentityReport>;

/// Group name, the identity labels it emits (before any `[...]` qualifier), runner.
const GROUPS: &[(&str, &[&str], GroupFn)] = &[
    ("multipartite", &["multipartite", "euler-symmetry"], multipartite_group),
    ("bell", &["bell", "P1", "Q1", "example"], bell_group),
    ("prod1", &["prod1"], prod1_group),
    ("zeta", &["zeta", "zeta-zero"], zeta_group),
    ("ruelle", &["R1", "R2", "RU1", "RU2"], ruelle_group),
    ("beta", &["beta"], beta_group),
    ("generating", &["F1", "G1", "euler"], generating_group),
    ("DE3", &["DE3"], de3_group),
    (
        "hierarchy",
        &[
            "G1-spectral",
            "G21",
            "G22",
            "gamma1-reflection",
            "gamma1",
            "gamma2",
            "B44",
            "gamma2-modularity",
            "hierarchy-factorization",
        ],
        hierarchy_group,
    ),
    ("symmfunc", &["chars", "schur"], symmfunc_group),
    ("cs", &["cs", "bilateral-collapse", "lmov", "rank-level"], cs_group),
];

/// Base label of an identity: the text before any `[` qualifier.
pub fn base_label(identity: &str) -> &str {
    identity.split('[').next().unwrap_or(identity)
}

pub fn selection_names() -> Vec<&'static str> {
    let mut out = Vec::new();
    for (name, labels, _) in GROUPS {
        out.push(*name);
        out.extend(labels.iter().copied());
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn known_selection(sel: &str) -> bool {
    GROUPS
        .iter()
        .any(|(name, labels, _)| *name == sel || labels.contains(&base_label(sel)))
}

fn report_selected(r: &IdentityReport, group: &str, selection: &[String]) -> bool {
    selection.iter().any(|s| s == group || s == &r.identity || s == base_label(&r.identity))
}

/// Runs the selected checks and returns the reports sorted by identity, then params.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<IdentityReport> {
    let chosen: Vec<&(&str, &[&str], GroupFn)> = GROUPS
        .iter()
        .filter(|(name, labels, _)| {
            cfg.identities.is_empty()
                || cfg
                    .identities
                    .iter()
                    .any(|s| s == name || labels.contains(&base_label(s)))
        })
        .collect();
    let run = |(name, _, f): &&(&str, &[&str], GroupFn)| -> Vec<IdentityReport> {
        f(cfg)
            .into_iter()
            .filter(|r| cfg.identities.is_empty() || report_selected(r, name, &cfg.identities))
            .collect()
    };
    let mut reports: Vec<IdentityReport> = if cfg.parallel {
        chosen.par_iter().flat_map_iter(run).collect()
    } else {
        chosen.iter().flat_map(run).collect()
    };
    for r in &mut reports {
        r.params.insert("seed".into(), cfg.seed.to_string());
    }
    reports.sort_by(|a, b| a.identity.cmp(&b.identity).then_with(|| a.params.cmp(&b.params)));
    reports
}

/// Turns a library error into a report: domain-type errors are reported as
/// such, anything else is a failure.
pub fn lift(label: &str, result: Result<IdentityReport>, tol: f64) -> IdentityReport {
    match result {
        Ok(r) => r,
        Err(e) => error_report(label, &e, tol),
    }
}

pub fn error_report(label: &str, e: &Error, tol: f64) -> IdentityReport {
    match e {
        Error::Domain(_) | Error::Branch(_) | Error::Pole(_) | Error::SpectralZero { .. } => {
            IdentityReport::domain_failure(label, e.to_string(), tol)
        }
        _ => IdentityReport::with_residual(label, nan(), nan(), f64::INFINITY, f64::INFINITY, tol).note(e.to_string()),
    }
}

fn nan() -> Scalar {
    c(f64::NAN, f64::NAN)
}

pub fn lift_many(label: &str, result: Result<Vec<IdentityReport>>, tol: f64) -> Vec<IdentityReport> {
    match result {
        Ok(v) => v,
        Err(e) => vec![error_report(label, &e, tol)],
    }
}

/// Exact comparison of two counts.
fn exact(label: &str, got: f64, expected: f64, tol: f64) -> IdentityReport {
    IdentityReport::with_residual(label, real(got), real(expected), (got - expected).abs(), 0.0, tol)
}

fn conv_name(conv: Convention) -> &'static str {
    match conv {
        Convention::Diagonal => "diagonal",
        Convention::DistinctPowers => "distinct-powers",
    }
}

fn targets(m: usize, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t: Vec<u32>| {
                let used: u32 = t.iter().sum();
                (0..=max_total - used).map(move |k| {
                    let mut n = t.clone();
                    n.push(k);
                    n
                })
            })
            .collect();
    }
    out.retain(|t| t.iter().any(|&k| k > 0));
    out
}

fn multipartite_group(cfg: &SuiteConfig) -> Vec<IdentityReport> {
    let tol = cfg.strict(1e-9);
    let mut out = Vec::new();
    for m in 1..=3usize {
        let label = "multipartite[oracle]";
        let result = (|| -> Result<Vec<IdentityReport>> {
            let f = gf_unrestricted(real(1.0), m, 6)?;
            let g = gf_distinct(real(1.0), m, 6)?;
            let fz = gf_graded(m, 7, true)?;
            let gz = gf_graded(m, 7, false)?;
            let mut worst = [0.0f64; 4];
            let mut totals = [(0.0, 0.0); 4];
            let ts = targets(m, 6);
            for t in &ts {
                let count = count_multipartitions(t)?;
                let pairs = [
                    (f.coeff(t), count.unrestricted as f64),
                    (g.coeff(t), count.distinct as f64),
                ];
                for (i, (v, n)) in pairs.into_iter().enumerate() {
                    worst[i] = worst[i].max((v - real(n)).norm());
                    totals[i].0 += v.re;
                    totals[i].1 += n;
                }
                let weight: u32 = t.iter().sum();
                let graded = [(&fz, &count.by_num_parts), (&gz, &count.distinct_by_num_parts)];
                for (i, (series, by_parts)) in graded.into_iter().enumerate() {
                    for (&j, &n) in by_parts {
                        if weight + j as u32 <= 7 {
                            let mut e = vec![j as u32];
                            e.extend(t);
                            let v = series.coeff(&e);
                            worst[2 + i] = worst[2 + i].max((v - real(n as f64)).norm());
                            totals[2 + i].0 += v.re;
                            totals[2 + i].1 += n as f64;
                        }
                    }
                }
            }
            let kinds = ["unrestricted", "distinct", "unrestricted-by-parts", "distinct-by-parts"];
            Ok(kinds
                .iter()
                .enumerate()
                .map(|(i, kind)| {
                    IdentityReport::with_residual(label, real(totals[i].0), real(totals[i].1), worst[i], 0.0, tol)
                        .param("m", m)
                        .param("kind", kind)
                        .param("targets", ts.len())
                        .param("max_total", 6)
                })
                .collect())
        })();
        out.extend(lift_many(label, result, tol));
    }
    let examples: [(&[u32], bool, u64, &str); 4] = [
        (&[1, 1], false, 2, "C-(1,1)"),
        (&[2, 0], false, 2, "C-(2,0)"),
        (&[2, 0], true, 1, "C+(2,0)"),
        (&[5], false, 7, "p(5)"),
    ];
    for (t, distinct, expected, name) in examples {
        let label = "multipartite[example]";
        let r = count_multipartitions(t).map(|count| {
            let got = if distinct { count.distinct } else { count.unrestricted };
            exact(label, got as f64, expected as f64, tol).param("case", name)
        });
        out.push(lift(label, r, tol));
    }
    for m in 1..=3usize {
        for conv in [Convention::Diagonal, Convention::DistinctPowers] {
            let label = "euler-symmetry";
            let tol = cfg.strict(1e-10);
            let r = (|| -> Result<IdentityReport> {
                let f = gf_specialized(None, m, 10, Kind::Unrestricted, conv, 1e-9)?.direct;
                let g = gf_specialized(None, m, 10, Kind::Distinct, conv, 1e-9)?.direct;
                let lg = negate_first_variable(&g).log()?.0;
                let lf = f.log()?.0;
                let sum = lg.try_add(&lf)?;
                let d = sum.max_abs_diff(&sum.zero_like())?;
                Ok(IdentityReport::with_residual(label, lg.coeff(&[1, 1]), -lf.coeff(&[1, 1]), d, 0.0, tol)
                    .param("m", m)
                    .param("convention", conv_name(conv))
                    .note("log G(-z) + log F(z) = 0 coefficientwise")
                    .truncated("order", 10))
            })();
            out.push(lift(label, r, tol));
        }
    }
    out
}

fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> Vec<Scalar> {
    (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn bell_group(cfg: &SuiteConfig) -> Vec<IdentityReport> {
    let mut out = Vec::new();
    let tol = cfg.strict(1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples: Vec<Vec<Scalar>> = (0..20).map(|_| random_complex(&mut rng, 12)).collect();
    for n in 1..=12usize {
        let label = "bell[recurrence=faa-di-bruno]";
        let r = (|| -> Result<IdentityReport> {
            let mut worst = 0.0f64;
            let mut last = (real(0.0), real(0.0));
            for g in &samples {
                let y = bell_recurrence(g, n)?;
                let f = faa_di_bruno(g, n)?;
                worst = worst.max((y[n] - f).norm() / f.norm().max(1.0));
                last = (y[n], f);
            }
            Ok(IdentityReport::with_residual(label, last.0, last.1, worst, 0.0, tol)
                .param("n", n)
                .param("samples", samples.len()))
        })();
        out.push(lift(label, r, tol));
    }

    let order = 12;
    let tol = cfg.strict(1e-8);
    for m in 1..=3usize {
        for conv in [Convention::Diagonal, Convention::DistinctPowers] {
            let specialized = (|| -> Result<(TruncatedSeries, TruncatedSeries)> {
                Ok((
                    gf_specialized(None, m, order, Kind::Unrestricted, conv, 1e-9)?.direct,
                    gf_specialized(None, m, order, Kind::Distinct, conv, 1e-9)?.direct,
                ))
            })();
            for (name, unrestricted) in [("P1", true), ("Q1", false)] {
                let label = format!("{name}[{}]", conv_name(conv));
                let r = specialized.clone().and_then(|(f, g)| {
                    let mut worst = 0.0f64;
                    let mut sample = (real(0.0), real(0.0));
                    for j in 1..=6u32 {
                        let top = order - j;
                        let (coeff, direct) = if unrestricted {
                            (p_coefficient(j as usize, m, order, conv, ZeroVector::Excluded)?, f.coefficient_of(0, j)?)
                        } else {
                            (q_coefficient(j as usize, m, order, conv, ZeroVector::Excluded)?, g.coefficient_of(0, j)?)
                        };
                        let coeff = coeff.restrict(top)?;
                        worst = worst.max(coeff.max_rel_diff(&direct)?);
                        sample = (coeff.coeff(&[1]), direct.coeff(&[1]));
                    }
                    Ok(IdentityReport::with_residual(&label, sample.0, sample.1, worst, 0.0, tol)
                        .param("m", m)
                        .param("j", "1..=6")
                        .param("zero_vector", "excluded")
                        .truncated("order", order as u64))
                });
                out.push(lift(&label, r, tol));
            }
            let label = "example[2P2=beta(1)^2+beta(2)]";
            let tol = cfg.strict(1e-10);
            let r = (|| -> Result<IdentityReport> {
                let p2 = p_coefficient(2, m, 10, conv, ZeroVector::Included)?.scale_real(2.0);
                let b1 = beta_series(1, m, 10, conv)?;
                let b2 = beta_series(2, m, 10, conv)?;
                let rhs = b1.try_mul(&b1)?.try_add(&b2)?;
                let d = p2.max_abs_diff(&rhs)?;
                Ok(IdentityReport::with_residual(label, p2.coeff(&[3]), rhs.coeff(&[3]), d, 0.0, tol)
                    .param("m", m)
                    .param("convention", conv_name(conv))
                    .param("zero_vector", "included")
                    .truncated("order", 10))
            })();
            out.push(lift(label, r, tol));
        }
    }
    out
}

fn direct_product(a: &dyn Fn(usize) -> i64, order: u32) -> Result<TruncatedSeries> {
    let mut s = TruncatedSeries::one(&["q"], order)?;
    for k in 1..=order {
        let base = s.one_like().try_sub(&s.monomial_like(&[k], real(1.0))?)?;
        s = s.try_mul(&base.powi(-a(k as usize))?)?;
    }
    Ok(s)
}

fn prod1_group(cfg: &SuiteConfig) -> Vec<IdentityReport> {
    let tol = cfg.strict(1e-9);
    let cases: [(&dyn Fn(usize) -> i64, &str); 3] =
        [(&|_| 1, "ones"), (&|k| i64::from(k == 1), "delta"), (&|k| k as i64, "linear")];
    cases
        .into_iter()
        .map(|(a, name)| {
            let label = format!("prod1[{name}]");
            let r = direct_product(a, 20).map(|direct| {
                let exps: Vec<Scalar> = (1..=20).map(|k| real(a(k) as f64)).collect();
                let rec = product_expansion(&exps, 20);
                let worst = rec
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let d = direct.coeff(&[k as u32]);
                        (v - d).norm() / d.norm().max(1.0)
                    })
                    .fold(0.0, f64::max);
                IdentityReport::with_residual(&label, rec[20], direct.coeff(&[20]), worst, 0.0, tol)
                    .truncated("order", 20)
            });
            lift(&label, r, tol)
        })
        .collect()
}

fn zeta_group(cfg: &SuiteConfig) -> Vec<IdentityReport> {
    let mut out = Vec::new();
    let tol = cfg.strict(1e-8);
    for alpha in [0.5, 1.0, 2.0] {
        for beta in [0.0, 1.0, PI] {
            for s in [real(2.0), c(3.5, 0.5)] {
                let label = "zeta[product=exp(log)]";
                let r = SpectralParams::from_alpha_beta(alpha, beta).and_then(|p| zeta_cross_check(s, &p, tol));
                out.push(lift(label, r, tol).param("alpha", alpha).param("beta", beta).param("s", s));
            }
        }
    }
    let tol = cfg.strict(1e-6);
    for n in -2..=2i64 {
        for k1 in 0..=3u32 {
            for k2 in 0..=3 - k1 {
                let r = SpectralParams::from_alpha_beta(1.0, 1.0).and_then(|p| zeta_zero_check(n, k1, k2, &p, tol));
                out.push(lift("zeta-zero", r, tol).param("n", n).param("k1", k1).param("k2", k2));
            }
        }
    }
    out
}

/// The configured nome plus two fixed ones inside `|q| <= 0.3`.
fn ruelle_nomes(cfg: &SuiteConfig) -> Vec<Scalar> {
    let mut out = vec![cfg.q()];
    for extra in [c(0.15, 0.1), real(-0.3)] {
        if (extra - cfg.q()).norm() > 1e-12 {
            out.push(extra);
        }
    }
    out
}

fn ruelle_group(cfg: &SuiteConfig) -> Vec<IdentityReport> {
    let tol = cfg.tolerance;
    let mut out = Vec::new();
    let args = [
        RuelleArg::new(1.0, real(0.0), 1),
        RuelleArg::new(1.0, real(0.0), 1).plus(),
        RuelleArg::new(2.0, c(0.3, 0.1), 3),
        RuelleArg::new(2.0, c(0.3, 0.1), 3).plus(),
    ];
    for q in ruelle_nomes(cfg) {
        let params = SpectralParams::from_nome(q);
        for arg in args {
            let name = if arg.plus_variant { "R2" } else { "R1" };
            let r = params.as_ref().map_err(Clone::clone).and_then(|p| ruelle_identity(&arg, p, tol));
            out.push(lift(name, r, tol).param("q", q));
            for b in [real(1.0), c(0.5, 0.25)] {
                let name = if arg.plus_variant { "RU2" } else { "RU1" };
                let r = params
                    .as_ref()
                    .map_err(Clone::clone)
                    .and_then(|p| ruelle_powered(&arg.weight(b), p, tol));
                out.push(
                    lift(name, r, tol)
                        .param("q", q)
                        .param("a", arg.a)
                        .param("epsilon", arg.epsilon)
                        .param("ell", arg.ell)
                        .param("b", b),
                );
            }
        }
    }
    out
}

/// One report per `m` for a convention-dependent identity: the verdict is
/// that of the distinct-powers reading, and the params record how each
/// convention fared.
fn convention_probe(
    label: &str,
    m: u32,
    run: impl Fn(Convention) -> Result<IdentityReport>,
    tol: f64,
) -> IdentityReport {
    let distinct = lift(label, run(Convention::DistinctPowers), tol);
    let diagonal = lift(label, run(Convention::Diagonal), tol);
    let mut passing = Vec::new();
    if diagonal.pass {
        passing.push("diagonal");
    }
    if distinct.pass {
        passing.push("distinct-powers");
    }
    let mut r = distinct.clone();
    r.identity = label.to_string();
    r = r
        .param("convention", "distinct-powers")
        .param("diagonal_residual", format!("{:.3e}", diagonal.residual))
        .param("distinct_powers_residual", format!("{:.3e}", distinct.residual))
        .param("passing_conventions", if passing.is_empty() { "none".into() } else { passing.join(",") });
    if m > 1 && !diagonal.pass {
        r = r.note("the diagonal convention holds only at m = 1");
    }
    r
}

fn beta_group(cfg: &SuiteConfig) -> Vec<IdentityReport> {
    let tol = cfg.tolerance;
    let p = match SpectralParams::from_nome(cfg.q()) {
        Ok(p) => p,
        Err(e) => return vec![error_report("beta", &e, tol)],
    };
    cfg.ms()
        .into_iter()
        .map(|m| convention_probe("beta", m, |conv| beta_spectral(3, m, &p, conv, tol), tol).param("n", 3))
        .collect()
}

fn generating_group(cfg: &SuiteConfig) -> Vec<IdentityReport> {
    let tol = cfg.tolerance;
    let p = match SpectralParams::from_nome(cfg.q()) {
        Ok(p) => p,
        Err(e) => return vec![error_report("F1", &e, tol)],
    };
    let z = real(0.5);
    let mut out = Vec::new();
    for m in cfg.ms() {
        for (label, kind) in [("F1", Kind::Unrestricted), ("G1", Kind::Distinct)] {
            out.push(convention_probe(label, m, |conv| gf_spectral_check(z, m, &p, kind, conv, tol), tol));
        }
        let label = "euler[G(-z)F(z)=1]";
        out.push(lift(label, euler_check(c(0.3, 0.1), m, &p, tol), tol).param("m", m));
    }
    out
}

fn de3_group(cfg: &SuiteConfig) -> Vec<IdentityReport> {
    let tol = cfg.tolerance;
    let p = match SpectralParams::from_nome(cfg.q()) {
        Ok(p) => p,
        Err(e) => return vec![error_report("DE3", &e, tol)],
    };
    let mut out = Vec::new();
    for z in [1, 2] {
        for b in [0, 1] {
            out.extend(de3_check(z, b, &p, tol));
        }
    }
    out
}

/// The period point with purely imaginary periods, and a generic point.
pub const MODULARITY_POINTS: [(&str, [(f64, f64); 3]); 2] = [
    ("imaginary", [(0.0, 0.9), (0.0, 1.0), (0.0, 1.1)]),
    ("generic", [(0.3, 1.0), (-0.2, 0.9), (0.1, 1.2)]),
];
pub const MODULARITY_Z: (f64, f64) = (0.2, 0.15);

fn hierarchy_group(cfg: &SuiteConfig) -> Vec<IdentityReport> {
    let tol = cfg.tolerance;
    let shift_tol = cfg.strict(1e-8);
    let q0 = cfg.q();
    let mut out = vec![lift("G1-spectral", g1_spectral_check(real(0.3), q0, shift_tol), shift_tol)];
    let grid = [real(0.1), real(0.25), c(0.15, 0.15)];
    for &q in &grid {
        for &p in &grid {
            out.extend(lift_many("G21", g21_check(real(0.3), q, p, shift_tol), shift_tol));
            for omega in [real(0.3), c(0.2, 0.25)] {
                out.extend(lift_many("G22", g22_check(omega, q, p, shift_tol), shift_tol));
            }
        }
    }
    out.push(lift(
        "gamma1-reflection",
        gamma1_reflection_check(c(0.5, -0.2), q0, c(0.1, 0.25), tol),
        tol,
    ));
    for (z, q) in [(real(0.4), q0), (c(0.3, 0.2), c(0.1, 0.15))] {
        out.push(lift("gamma1[q=p]", gamma1_qq_check(z, q, tol), tol));
        out.push(lift("gamma2[q=p=t]", gamma2_qqq_check(z, q, tol), tol));
    }

    let exact_tol = cfg.strict(1e-12);
    let one = real(1.0);
    let label = "B44[taylor]";
    let r = b44(real(0.0), one, one, one)
        .map(|v| IdentityReport::compare(label, v, real(-9.0), 0.0, exact_tol).param("z", 0).param("periods", "1,1,1"));
    out.push(lift(label, r, exact_tol));
    let label = "B44[order-8=order-12]";
    let [a, b, cc] = MODULARITY_POINTS[0].1.map(|(x, y)| c(x, y));
    let z = c(0.2, 0.5);
    let r = (|| -> Result<IdentityReport> {
        let low = b44(z, a, b, cc)?;
        let high = bernoulli_kernel(z, &[a, b, cc], 4, 4, 12)?;
        Ok(IdentityReport::compare(label, low, high, 0.0, exact_tol).param("z", z))
    })();
    out.push(lift(label, r, exact_tol));

    let mtol = cfg.modularity_tolerance;
    let z = c(MODULARITY_Z.0, MODULARITY_Z.1);
    for (name, periods) in MODULARITY_POINTS {
        let [a, b, cc] = periods.map(|(x, y)| c(x, y));
        let r = NomeTriple::from_periods(a, b, cc).map(|t| gamma2_modularity_check(z, &t, mtol, true));
        out.push(lift("gamma2-modularity", r, mtol).param("point", name));
    }

    for m in [1, 2] {
        let label = "hierarchy-factorization";
        out.push(lift(label, factorized_hierarchy(real(0.3), m, q0, shift_tol), shift_tol));
    }
    out
}

fn symmfunc_group(cfg: &SuiteConfig) -> Vec<IdentityReport> {
    let tol = cfg.tolerance;
    let mut out = Vec::new();
    for n in 1..=8 {
        let ok = orthogonality_check(n);
        out.push(exact("chars[orthogonality]", f64::from(u8::from(ok)), 1.0, tol).param("n", n).note("exact rational arithmetic"));
    }
    for n in 1..=5 {
        for vars in 1..=3usize {
            let label = "schur[characters=tableaux]";
            let shapes = partitions(n);
            let r = (|| -> Result<IdentityReport> {
                let mut mismatches = 0;
                for shape in &shapes {
                    if schur_exact(shape, vars)? != schur_tableaux(shape, vars) {
                        mismatches += 1;
                    }
                }
                Ok(exact(label, mismatches as f64, 0.0, tol)
                    .param("n", n)
                    .param("vars", vars)
                    .param("shapes", shapes.len()))
            })();
            out.push(lift(label, r, tol));
        }
    }
    out
}

/// `max |exp(F) - Z|` coefficientwise, each difference divided by the matching
/// coefficient of `exp(|F|)` (at least 1). Terms of `exp(F)` that cancel down to
/// a small coefficient of `Z` carry rounding of the size of `exp(|F|)`.
pub fn scaled_exp_diff(f: &TruncatedSeries, z: &TruncatedSeries) -> Result<f64> {
    let e = f.exp()?;
    let mut magnitude = f.zero_like();
    for (exps, v) in f.terms() {
        magnitude.set_coeff(exps, real(v.norm()))?;
    }
    let bound = magnitude.exp()?;
    Ok(e.coefficients()
        .iter()
        .zip(z.coefficients())
        .zip(bound.coefficients())
        .map(|((a, b), m)| (a - b).norm() / m.norm().max(b.norm()).max(1.0))
        .fold(0.0, f64::max))
}

fn random_link(rng: &mut ChaCha8Rng, components: usize, bound: u32) -> Result<LinkData> {
    let mut link = LinkData::new(components, bound)?;
    for t in tuples_up_to(components, bound) {
        link.insert(t, real(rng.gen_range(-5..=5) as f64))?;
    }
    Ok(link)
}

fn part(p: &[u32]) -> Partition {
    Partition::new(p.to_vec()).expect("valid partition")
}

/// A table obeying the rank-level reflection rule, and one violating it.
pub fn hand_built_tables() -> Result<(InvariantTable, InvariantTable)> {
    let mut good = InvariantTable::new(1);
    good.push(vec![part(&[1])], 0, 1, 1)?;
    good.push(vec![part(&[1])], 0, -1, -1)?;
    good.push(vec![part(&[1, 1])], 1, 0, 2)?;
    let mut bad = InvariantTable::new(1);
    bad.push(vec![part(&[1])], 0, 1, 1)?;
    bad.push(vec![part(&[1])], 0, -1, 1)?;
    Ok((good, bad))
}

fn cs_group(cfg: &SuiteConfig) -> Vec<IdentityReport> {
    let mut out = Vec::new();
    let tol = cfg.strict(1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..20usize {
        let label = "cs[schur=powersum]";
        let components = 1 + i % 2;
        let r = (|| -> Result<IdentityReport> {
            let link = random_link(&mut rng, components, 4)?;
            let alphabet = Alphabet::new(&vec![2; components], 6)?;
            let schur = partition_function(&link, &alphabet, FunctionBasis::Schur)?;
            let ps = partition_function(&link, &alphabet, FunctionBasis::PowerSum)?;
            let d = schur.max_rel_diff(&ps)?;
            let probe = vec![1; alphabet.template().nvars()];
            Ok(IdentityReport::with_residual(label, schur.coeff(&probe), ps.coeff(&probe), d, 0.0, tol)
                .param("table", i)
                .param("components", components)
                .param("letters", 2)
                .truncated("order", 6))
        })();
        out.push(lift(label, r, tol));
    }

    for n in 1..=5u32 {
        for components in 1..=2usize {
            let label = "cs[W<->P]";
            let weights: Vec<Vec<u32>> = if components == 1 {
                vec![vec![n]]
            } else {
                (0..=n).map(|k| vec![k, n - k]).collect()
            };
            let mut p: BTreeMap<PartitionTuple, i128> = BTreeMap::new();
            for w in weights {
                for t in tuples_with_weights(&w) {
                    p.insert(t, rng.gen_range(-20..=20));
                }
            }
            let r = w_from_p_exact(&p).and_then(|w| p_from_w_exact(&w)).map(|back| {
                let wrong = p.iter().filter(|(k, v)| back.get(*k) != Some(v)).count() + back.len().abs_diff(p.len());
                exact(label, wrong as f64, 0.0, tol)
                    .param("n", n)
                    .param("components", components)
                    .param("entries", p.len())
                    .note("exact rational arithmetic")
            });
            out.push(lift(label, r, tol));
        }
    }

    for components in 1..=2usize {
        let label = "cs[exp(F)=Z]";
        let order = cfg.order;
        let r = (|| -> Result<IdentityReport> {
            let link = random_link(&mut rng, components, 4)?;
            let alphabet = Alphabet::new(&vec![2; components], order)?;
            let z = partition_function(&link, &alphabet, FunctionBasis::PowerSum)?;
            let f = free_energy(&link, &alphabet)?;
            let e = f.exp()?;
            let probe = vec![1; alphabet.template().nvars()];
            Ok(IdentityReport::with_residual(label, e.coeff(&probe), z.coeff(&probe), scaled_exp_diff(&f, &z)?, 0.0, tol)
                .param("components", components)
                .note("residual scaled by the coefficients of exp(|F|)")
                .truncated("order", order as u64))
        })();
        out.push(lift(label, r, tol));
    }

    let label = "cs[additivity]";
    let r = (|| -> Result<IdentityReport> {
        let a = random_link(&mut rng, 1, 4)?;
        let b = random_link(&mut rng, 1, 4)?;
        let fa = free_energy_coefficients(&a)?;
        let fb = free_energy_coefficients(&b)?;
        let fj = free_energy_coefficients(&a.disjoint_union(&b))?;
        let mut worst = 0.0f64;
        for (key, v) in &fj {
            let expect = if key[1].is_empty() {
                fa.get(&key[..1]).copied().unwrap_or(real(0.0))
            } else if key[0].is_empty() {
                fb.get(&key[1..]).copied().unwrap_or(real(0.0))
            } else {
                real(0.0)
            };
            worst = worst.max((v - expect).norm() / expect.norm().max(1.0));
        }
        Ok(IdentityReport::with_residual(label, real(fj.len() as f64), real(fj.len() as f64), worst, 0.0, tol)
            .note("F of a split link is the sum of the component free energies"))
    })();
    out.push(lift(label, r, tol));

    let tol = cfg.strict(1e-7);
    let t = real(0.5);
    match SpectralParams::from_nome(cfg.q()) {
        Ok(p) => {
            for (m, twice, n, x) in [(1, 0, 1, 0.3), (2, 1, -1, 0.6), (1, -1, 2, 0.2)] {
                let label = "bilateral-collapse";
                out.push(lift(label, bilateral_collapse(m, twice, n, real(x), t, &p, tol), tol));
            }
        }
        Err(e) => out.push(error_report("bilateral-collapse", &e, tol)),
    }

    let tol = cfg.strict(1e-9);
    let (good, bad) = match hand_built_tables() {
        Ok(v) => v,
        Err(e) => {
            out.push(error_report("rank-level[validator]", &e, tol));
            return out;
        }
    };
    for choice in [IndexChoice::Ordered, IndexChoice::Unordered] {
        let label = "lmov[product=log-form]";
        let r = (|| -> Result<IdentityReport> {
            let alphabet = Alphabet::new(&[2], 6)?;
            let prod = lmov_product(&good, &alphabet, cfg.q(), t, choice, tol / 1e4, cfg.max_levels)?;
            let oracle = lmov_log_form(&good, &alphabet, cfg.q(), t, choice)?;
            Ok(IdentityReport::with_residual(
                label,
                prod.series.coeff(&[1, 1]),
                oracle.coeff(&[1, 1]),
                prod.series.max_rel_diff(&oracle)?,
                prod.tail_bound,
                tol,
            )
            .param("indices", format!("{choice:?}").to_lowercase())
            .param("t", t)
            .truncated("levels", prod.levels as u64)
            .truncated("order", 6))
        })();
        out.push(lift(label, r, tol));
    }

    let tol = cfg.strict(1e-8);
    let alphabet = Alphabet::new(&[2], 6);
    let checks = alphabet.and_then(|a| symmetry_checks(&good, &a, cfg.q(), t, IndexChoice::Ordered, tol));
    out.extend(lift_many("rank-level", checks, tol).into_iter().map(|r| r.param("table", "symmetric")));
    let verdict = |table: &InvariantTable| {
        qspectra_core::csgen::rank_level_reflection(table, tol)
    };
    let accepted = verdict(&good);
    let rejected = verdict(&bad);
    let correct = u8::from(accepted.pass) + u8::from(!rejected.pass);
    let mut r = exact("rank-level[validator]", f64::from(correct), 2.0, tol)
        .param("accepts_symmetric", accepted.pass)
        .param("rejects_asymmetric", !rejected.pass);
    if let Some(note) = rejected.note {
        r = r.note(format!("asymmetric table {note}"));
    }
    out.push(r);
    out
}

/// Whether any report failed, and whether any was a domain failure.
pub fn tally(reports: &[IdentityReport]) -> (usize, usize, usize) {
    let mut counts = (0, 0, 0);
    for r in reports {
        match r.status {
            Status::Pass => counts.0 += 1,
            Status::Fail => counts.1 += 1,
            Status::DomainFailure => counts.2 += 1,
        }
    }
    counts
}
