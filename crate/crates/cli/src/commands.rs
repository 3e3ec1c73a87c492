//! One function per subcommand; each returns the rendered output data.

use std::fs;
use std::path::Path;

use qspectra_core::bell::{bell_recurrence, product_expansion};
use qspectra_core::csgen::{
    free_energy, lmov_log_form, lmov_product, partition_function, symmetry_checks, Alphabet, FunctionBasis,
    IndexChoice, InvariantTable, LinkData,
};
use qspectra_core::hierarchy::{
    b44, elliptic_gamma1, elliptic_gamma2, factorized_hierarchy, g1_spectral_check, g21_check, g22_check,
    gamma1_qq_check, gamma1_reflection_check, gamma2_modularity_check, gamma2_qqq_check, NomeTriple,
};
use qspectra_core::multipartite::{count_multipartitions, enumerate_multipartitions, Convention, Kind};
use qspectra_core::scalar::{parse_complex, real};
use qspectra_core::spectral::{
    beta_spectral, de3_check, gf_spectral_check, nearest_zero, ruelle_identity, ruelle_powered, zeta_cross_check,
    zeta_log_series, zeta_product, Evaluation, RuelleArg,
};
use qspectra_core::symmfunc::{
    character_table, schur_exact, schur_from_power_sums, schur_tableaux, schur_with_adams, Partition,
};
use qspectra_core::{IdentityReport, Scalar, TruncatedSeries};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::args::*;
use crate::emit::{complex_list, reports_json, to_pretty, to_raw, Complex, Num, Output, Row};
use crate::suite::{lift, lift_many, scaled_exp_diff};
use crate::{CliError, Settings};

/// A JSON object whose keys keep their insertion order.
#[derive(Default)]
pub struct Doc(Vec<(&'static str, Box<RawValue>)>);

impl Doc {
    pub fn with<T: Serialize>(mut self, key: &'static str, value: T) -> Self {
        self.0.push((key, to_raw(&value)));
        self
    }

    pub fn raw(mut self, key: &'static str, value: Box<RawValue>) -> Self {
        self.0.push((key, value));
        self
    }

    pub fn render(&self) -> String {
        to_pretty(self)
    }
}

impl Serialize for Doc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct EvaluationOut {
    value: Complex,
    terms: u64,
    tail_bound: Num,
}

impl From<Evaluation> for EvaluationOut {
    fn from(e: Evaluation) -> Self {
        EvaluationOut {
            value: e.value.into(),
            terms: e.terms,
            tail_bound: Num(e.tail_bound),
        }
    }
}

#[derive(Serialize)]
struct SeriesOut<'a> {
    variables: &'a [String],
    order: u32,
    terms: Vec<(&'a [u32], Num, Num)>,
}

fn series_out(s: &TruncatedSeries) -> SeriesOut<'_> {
    SeriesOut {
        variables: s.variables(),
        order: s.order(),
        terms: s
            .terms()
            .filter(|(_, v)| *v != real(0.0))
            .map(|(e, v)| (e, Num(v.re), Num(v.im)))
            .collect(),
    }
}

fn series_rows(s: &TruncatedSeries) -> Vec<Row> {
    s.terms()
        .filter(|(_, v)| *v != real(0.0))
        .map(|(e, v)| Row {
            exponents: e.to_vec(),
            value: v,
        })
        .collect()
}

pub fn complex_arg(name: &str, text: &str) -> Result<Scalar, CliError> {
    parse_complex(text).map_err(|e| CliError::Usage(format!("--{name}: {e}")))
}

fn integer_arg(name: &str, text: &str) -> Result<i64, CliError> {
    text.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("--{name}: expected an integer, got {text:?}")))
}

fn reports_output(reports: Vec<IdentityReport>) -> Output {
    Output {
        json: to_pretty(&reports_json(&reports)),
        rows: Vec::new(),
        reports,
    }
}

fn table_output(doc: Doc, rows: Vec<Row>) -> Output {
    Output {
        json: doc.render(),
        rows,
        reports: Vec::new(),
    }
}

pub fn partitions(args: &PartitionsArgs) -> Result<Output, CliError> {
    if let Some(m) = args.m {
        if m != args.target.len() {
            return Err(CliError::Usage(format!(
                "--target has {} entries but --m is {m}",
                args.target.len()
            )));
        }
    }
    let counts = count_multipartitions(&args.target)?;
    let (count, by_parts) = if args.distinct {
        (counts.distinct, &counts.distinct_by_num_parts)
    } else {
        (counts.unrestricted, &counts.by_num_parts)
    };
    let mut doc = Doc::default()
        .with("target", &args.target)
        .with("distinct", args.distinct)
        .with("count", count)
        .with("by_num_parts", by_parts);
    if args.witnesses {
        doc = doc.with("witnesses", enumerate_multipartitions(&args.target, args.distinct)?);
    }
    let rows = vec![Row {
        exponents: args.target.clone(),
        value: real(count as f64),
    }];
    Ok(table_output(doc, rows))
}

fn complex_list_arg(name: &str, items: &[String]) -> Result<Vec<Scalar>, CliError> {
    items.iter().map(|t| complex_arg(name, t)).collect()
}

pub fn bell(args: &BellArgs) -> Result<Output, CliError> {
    let g = complex_list_arg("g", &args.g)?;
    let y = bell_recurrence(&g, args.n)?;
    let rows = y
        .iter()
        .enumerate()
        .map(|(k, &v)| Row {
            exponents: vec![k as u32],
            value: v,
        })
        .collect();
    let doc = Doc::default()
        .with("n", args.n)
        .with("g", complex_list(&g))
        .with("y", complex_list(&y));
    Ok(table_output(doc, rows))
}

pub fn prodexp(args: &ProdexpArgs, settings: &Settings) -> Result<Output, CliError> {
    let a = complex_list_arg("a", &args.a)?;
    let b = product_expansion(&a, settings.order as usize);
    let rows = b
        .iter()
        .enumerate()
        .map(|(k, &v)| Row {
            exponents: vec![k as u32],
            value: v,
        })
        .collect();
    let doc = Doc::default()
        .with("a", complex_list(&a))
        .with("order", settings.order)
        .with("coefficients", complex_list(&b));
    Ok(table_output(doc, rows))
}

pub fn zeta(args: &ZetaArgs, settings: &Settings) -> Result<Output, CliError> {
    let s = complex_arg("s", &args.s)?;
    let p = &settings.nome;
    let tol = settings.tolerance;
    let product = zeta_product(s, p, tol / 100.0)?;
    let series = zeta_log_series(s, p, tol / 100.0)?;
    let check = lift("zeta[product=exp(log)]", zeta_cross_check(s, p, tol), tol);
    let (n, k1, k2) = nearest_zero(s, p);
    let doc = Doc::default()
        .with("s", Complex::from(s))
        .with("alpha", Num(p.alpha))
        .with("beta", Num(p.beta))
        .with("product", EvaluationOut::from(product))
        .with("log_series", EvaluationOut::from(series))
        .with("nearest_zero", (n, k1, k2))
        .raw("check", reports_json(std::slice::from_ref(&check)));
    Ok(Output {
        json: doc.render(),
        rows: Vec::new(),
        reports: vec![check],
    })
}

fn conventions(arg: ConventionArg) -> Vec<Convention> {
    match arg {
        ConventionArg::Diagonal => vec![Convention::Diagonal],
        ConventionArg::DistinctPowers => vec![Convention::DistinctPowers],
        ConventionArg::Both => vec![Convention::Diagonal, Convention::DistinctPowers],
    }
}

pub fn ruelle_check(args: &RuelleArgs, settings: &Settings) -> Result<Output, CliError> {
    let p = &settings.nome;
    let tol = settings.tolerance;
    let mut reports = Vec::new();
    match args.identity {
        RuelleIdentity::R1 | RuelleIdentity::R2 | RuelleIdentity::Ru1 | RuelleIdentity::Ru2 => {
            let mut arg = RuelleArg::new(args.a, complex_arg("epsilon", &args.epsilon)?, args.ell);
            if matches!(args.identity, RuelleIdentity::R2 | RuelleIdentity::Ru2) {
                arg = arg.plus();
            }
            let label = format!("{:?}", args.identity).to_uppercase();
            let r = if matches!(args.identity, RuelleIdentity::R1 | RuelleIdentity::R2) {
                ruelle_identity(&arg, p, tol)
            } else {
                ruelle_powered(&arg.weight(complex_arg("b", &args.b)?), p, tol)
            };
            reports.push(lift(&label, r, tol));
        }
        RuelleIdentity::Beta => {
            for conv in conventions(args.convention) {
                reports.push(lift("beta", beta_spectral(args.n, args.m, p, conv, tol), tol));
            }
        }
        RuelleIdentity::F1 | RuelleIdentity::G1 => {
            let z = complex_arg("z", &args.z)?;
            let kind = if args.identity == RuelleIdentity::F1 {
                Kind::Unrestricted
            } else {
                Kind::Distinct
            };
            let label = if kind == Kind::Unrestricted { "F1" } else { "G1" };
            for conv in conventions(args.convention) {
                reports.push(lift(label, gf_spectral_check(z, args.m, p, kind, conv, tol), tol));
            }
        }
        RuelleIdentity::De3 => {
            let z = integer_arg("z", &args.z)?;
            let b = integer_arg("b", &args.b)?;
            reports.extend(de3_check(z, b, p, tol));
        }
    }
    Ok(reports_output(reports))
}

pub fn elliptic(args: &EllipticArgs, settings: &Settings) -> Result<Output, CliError> {
    let z = complex_arg("z", &args.z)?;
    let q = settings.nome.q;
    let p = complex_arg("p", args.p.as_deref().unwrap_or("0.25"))?;
    let target = settings.tolerance / 100.0;
    let mut doc = Doc::default()
        .with("function", format!("{:?}", args.function).to_lowercase())
        .with("z", Complex::from(z))
        .with("q", Complex::from(q))
        .with("p", Complex::from(p));
    let value = match args.function {
        EllipticFn::Gamma1 => elliptic_gamma1(z, q, p, target)?,
        EllipticFn::Gamma2 => {
            let t = complex_arg("t", args.t.as_deref().unwrap_or("0.3"))?;
            doc = doc.with("t", Complex::from(t));
            elliptic_gamma2(z, q, p, t, target)?
        }
    };
    let doc = doc.with("evaluation", EvaluationOut::from(value));
    Ok(table_output(doc, Vec::new()))
}

pub fn check(args: &CheckArgs, settings: &Settings) -> Result<Output, CliError> {
    let tol = settings.tolerance;
    let q = settings.nome.q;
    let z = complex_arg("z", &args.z)?;
    let p = complex_arg("p", &args.p)?;
    let periods = || -> Result<[Scalar; 3], CliError> {
        Ok([
            complex_arg("a", &args.period_a)?,
            complex_arg("b", &args.period_b)?,
            complex_arg("c", &args.period_c)?,
        ])
    };
    let reports = match args.identity {
        CheckIdentity::G1 => vec![lift("G1-spectral", g1_spectral_check(z, q, tol), tol)],
        CheckIdentity::G21 => lift_many("G21", g21_check(z, q, p, tol), tol),
        CheckIdentity::G22 => lift_many("G22", g22_check(z, q, p, tol), tol),
        CheckIdentity::Gamma1Reflection => {
            vec![lift("gamma1-reflection", gamma1_reflection_check(z, q, p, tol), tol)]
        }
        CheckIdentity::Gamma1Qq => vec![lift("gamma1[q=p]", gamma1_qq_check(z, q, tol), tol)],
        CheckIdentity::Gamma2Qqq => vec![lift("gamma2[q=p=t]", gamma2_qqq_check(z, q, tol), tol)],
        CheckIdentity::Gamma2Modularity => {
            let [a, b, c] = periods()?;
            let mtol = settings.modularity_tolerance;
            let r = NomeTriple::from_periods(a, b, c).map(|t| gamma2_modularity_check(z, &t, mtol, !args.no_reflection));
            vec![lift("gamma2-modularity", r, mtol)]
        }
        CheckIdentity::B44 => {
            let [a, b, c] = periods()?;
            let value = b44(z, a, b, c)?;
            let doc = Doc::default()
                .with("z", Complex::from(z))
                .with("periods", complex_list(&[a, b, c]))
                .with("value", Complex::from(value));
            return Ok(table_output(doc, Vec::new()));
        }
        CheckIdentity::Hierarchy => {
            vec![lift("hierarchy-factorization", factorized_hierarchy(z, args.m, q, tol), tol)]
        }
    };
    Ok(reports_output(reports))
}

pub fn chars(args: &CharsArgs) -> Result<Output, CliError> {
    if args.n == 0 || args.n > 20 {
        return Err(CliError::Usage(format!("--n must be between 1 and 20, got {}", args.n)));
    }
    let t = character_table(args.n);
    let z: Vec<String> = t.z_mu.iter().map(u128::to_string).collect();
    let doc = Doc::default()
        .with("n", t.n)
        .with("partitions", &t.partitions)
        .with("table", &t.table)
        .with("z_mu", z);
    let mut rows = Vec::new();
    for (i, row) in t.table.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            rows.push(Row {
                exponents: vec![i as u32, j as u32],
                value: real(v as f64),
            });
        }
    }
    Ok(table_output(doc, rows))
}

pub fn schur(args: &SchurArgs, settings: &Settings) -> Result<Output, CliError> {
    if args.vars == 0 || args.vars > 8 {
        return Err(CliError::Usage(format!("--vars must be between 1 and 8, got {}", args.vars)));
    }
    let shape = Partition::new(args.shape.clone())?;
    let names: Vec<String> = (1..=args.vars).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let order = settings.order.max(shape.weight() * args.adams);
    let series = if args.adams == 1 {
        schur_from_power_sums(&shape, &refs, order)?
    } else {
        schur_with_adams(&shape, args.adams, &refs, order)?
    };
    let mut doc = Doc::default()
        .with("shape", &shape)
        .with("vars", args.vars)
        .with("adams", args.adams);
    if args.adams == 1 {
        let exact = schur_exact(&shape, args.vars)?;
        let agree = exact == schur_tableaux(&shape, args.vars);
        let exact: Vec<(&Vec<u32>, String)> = exact.iter().map(|(e, c)| (e, c.to_string())).collect();
        doc = doc.with("exact", exact).with("tableaux_agree", agree);
    }
    let doc = doc.with("series", series_out(&series));
    Ok(table_output(doc, series_rows(&series)))
}

/// Exponent vector of the first variable, where the reported sample coefficient is read.
fn first_variable(s: &TruncatedSeries) -> Vec<u32> {
    let mut e = vec![0; s.nvars()];
    e[0] = 1;
    e
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn alphabet(letters: &[usize], components: usize, order: u32) -> Result<Alphabet, CliError> {
    let letters = if letters.is_empty() {
        vec![2; components]
    } else {
        letters.to_vec()
    };
    if letters.len() != components {
        return Err(CliError::Usage(format!(
            "--letters has {} entries for {components} components",
            letters.len()
        )));
    }
    Ok(Alphabet::new(&letters, order)?)
}

pub fn cs_partition(args: &CsPartitionArgs, settings: &Settings) -> Result<Output, CliError> {
    let link = LinkData::from_json(&read_input(&args.input)?).map_err(|e| CliError::Usage(e.to_string()))?;
    let alphabet = alphabet(&args.letters, link.components(), settings.order)?;
    let tol = settings.tolerance;
    let mut doc = Doc::default()
        .with("components", link.components())
        .with("degree_bound", link.degree_bound())
        .with("order", settings.order);
    let mut reports = Vec::new();
    let schur = matches!(args.basis, BasisArg::Schur | BasisArg::Both)
        .then(|| partition_function(&link, &alphabet, FunctionBasis::Schur))
        .transpose()?;
    let power = matches!(args.basis, BasisArg::Powersum | BasisArg::Both)
        .then(|| partition_function(&link, &alphabet, FunctionBasis::PowerSum))
        .transpose()?;
    if let Some(s) = &schur {
        doc = doc.with("schur", series_out(s));
    }
    if let Some(s) = &power {
        doc = doc.with("powersum", series_out(s));
    }
    let f = free_energy(&link, &alphabet)?;
    doc = doc.with("free_energy", series_out(&f));
    let z = power.as_ref().or(schur.as_ref()).expect("a basis is always selected");
    let probe = first_variable(z);
    if let (Some(a), Some(b)) = (&schur, &power) {
        let d = a.max_rel_diff(b)?;
        reports.push(IdentityReport::with_residual("cs[schur=powersum]", a.coeff(&probe), b.coeff(&probe), d, 0.0, tol));
    }
    let e = f.exp()?;
    let d = scaled_exp_diff(&f, z)?;
    reports.push(IdentityReport::with_residual("cs[exp(F)=Z]", e.coeff(&probe), z.coeff(&probe), d, 0.0, tol));
    let rows = series_rows(z);
    let doc = doc.raw("checks", reports_json(&reports));
    Ok(Output {
        json: doc.render(),
        rows,
        reports,
    })
}

pub fn cs_lmov(args: &CsLmovArgs, settings: &Settings) -> Result<Output, CliError> {
    let table = InvariantTable::from_json(&read_input(&args.table)?).map_err(|e| CliError::Usage(e.to_string()))?;
    let alphabet = alphabet(&args.letters, table.components, settings.order)?;
    let t = complex_arg("t", &args.t)?;
    let q = settings.nome.q;
    let tol = settings.tolerance;
    let choice = if args.unordered {
        IndexChoice::Unordered
    } else {
        IndexChoice::Ordered
    };
    let max_levels = args.max_levels.unwrap_or(crate::suite::defaults::MAX_LEVELS);
    let product = lmov_product(&table, &alphabet, q, t, choice, tol / 100.0, max_levels)?;
    let oracle = lmov_log_form(&table, &alphabet, q, t, choice)?;
    let probe = first_variable(&oracle);
    let mut reports = vec![IdentityReport::with_residual(
        "lmov[product=log-form]",
        product.series.coeff(&probe),
        oracle.coeff(&probe),
        product.series.max_rel_diff(&oracle)?,
        product.tail_bound,
        tol,
    )
    .truncated("levels", product.levels as u64)];
    reports.extend(symmetry_checks(&table, &alphabet, q, t, choice, tol)?);
    let doc = Doc::default()
        .with("q", Complex::from(q))
        .with("t", Complex::from(t))
        .with("indices", if args.unordered { "unordered" } else { "ordered" })
        .with("levels", product.levels)
        .with("tail_bound", Num(product.tail_bound))
        .with("product", series_out(&product.series))
        .raw("checks", reports_json(&reports));
    Ok(Output {
        json: doc.render(),
        rows: series_rows(&product.series),
        reports,
    })
}
