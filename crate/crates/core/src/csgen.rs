//! Chern-Simons generating series built from colored link invariants.
//!
//! Link data (`P_A` for tuples of partitions) and integer invariant tables
//! are inputs. This module turns them into partition functions in the Schur
//! and power-sum bases, free energies, the infinite-product form with its
//! symmetric-product brackets, and the rank-level symmetry checks.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::jackson_g1;
use crate::report::IdentityReport;
use crate::scalar::{c, ensure_finite, real, Scalar};
use crate::series::TruncatedSeries;
use crate::spectral::{ruelle, RuelleMethod, SpectralParams};
use crate::symmfunc::{character, partitions, power_sum_poly, schur_tableaux, z_mu, IntPoly, Partition};

/// One partition per link component.
pub type PartitionTuple = Vec<Partition>;

pub fn tuple_weight(tuple: &[Partition]) -> u32 {
    tuple.iter().map(Partition::weight).sum()
}

pub fn tuple_len(tuple: &[Partition]) -> usize {
    tuple.iter().map(Partition::len).sum()
}

pub fn tuple_z(tuple: &[Partition]) -> u128 {
    tuple.iter().map(z_mu).product()
}

fn tuple_character(shape: &[Partition], mu: &[Partition]) -> Result<i64> {
    let mut acc = 1;
    for (a, m) in shape.iter().zip(mu) {
        acc *= character(a, m)?;
        if acc == 0 {
            break;
        }
    }
    Ok(acc)
}

fn is_trivial(tuple: &[Partition]) -> bool {
    tuple.iter().all(Partition::is_empty)
}

/// All tuples whose component weights are exactly `weights`.
pub fn tuples_with_weights(weights: &[u32]) -> Vec<PartitionTuple> {
    let mut out: Vec<PartitionTuple> = vec![Vec::new()];
    for &w in weights {
        let parts = partitions(w);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                parts.iter().map(move |p| {
                    let mut next = prefix.clone();
                    next.push(p.clone());
                    next
                })
            })
            .collect();
    }
    out
}

/// All nontrivial tuples with `components` entries and total weight `<= bound`.
pub fn tuples_up_to(components: usize, bound: u32) -> Vec<PartitionTuple> {
    let mut weights = vec![Vec::new()];
    for _ in 0..components {
        weights = weights
            .into_iter()
            .flat_map(|w: Vec<u32>| {
                let used: u32 = w.iter().sum();
                (0..=bound - used).map(move |k| {
                    let mut next = w.clone();
                    next.push(k);
                    next
                })
            })
            .collect();
    }
    weights.sort_by_key(|w| (w.iter().sum::<u32>(), std::cmp::Reverse(w.clone())));
    weights
        .iter()
        .filter(|w| w.iter().any(|&k| k > 0))
        .flat_map(|w| tuples_with_weights(w))
        .collect()
}

fn weight_vector(tuple: &[Partition]) -> Vec<u32> {
    tuple.iter().map(Partition::weight).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ValueJson {
    Real(f64),
    Pair([f64; 2]),
    Parts { re: f64, im: f64 },
}

impl From<ValueJson> for Scalar {
    fn from(v: ValueJson) -> Scalar {
        match v {
            ValueJson::Real(x) => real(x),
            ValueJson::Pair([re, im]) | ValueJson::Parts { re, im } => c(re, im),
        }
    }
}

#[derive(Debug, Deserialize)]
struct LinkJson {
    #[serde(rename = "L")]
    components: usize,
    #[serde(default)]
    degree_bound: Option<u32>,
    entries: Vec<LinkEntryJson>,
}

#[derive(Debug, Deserialize)]
struct LinkEntryJson {
    #[serde(rename = "A")]
    shape: PartitionTuple,
    value: ValueJson,
}

/// Colored invariants `P_A` of an `L`-component link. Every tuple of total
/// weight up to `degree_bound` is defined; absent ones are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkData {
    components: usize,
    degree_bound: u32,
    values: BTreeMap<PartitionTuple, Scalar>,
}

impl LinkData {
    pub fn new(components: usize, degree_bound: u32) -> Result<Self> {
        if components == 0 {
            return Err(Error::Invalid("a link has at least one component".into()));
        }
        Ok(LinkData {
            components,
            degree_bound,
            values: BTreeMap::new(),
        })
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn insert(&mut self, shape: PartitionTuple, value: Scalar) -> Result<()> {
        ensure_finite(value)?;
        if shape.len() != self.components {
            return Err(Error::Shape(format!(
                "tuple has {} partitions, link has {} components",
                shape.len(),
                self.components
            )));
        }
        if is_trivial(&shape) {
            if (value - real(1.0)).norm() > 0.0 {
                return Err(Error::Invalid("the empty tuple must carry the value 1".into()));
            }
            return Ok(());
        }
        if tuple_weight(&shape) > self.degree_bound {
            return Err(Error::Invalid(format!(
                "weight {} exceeds the degree bound {}",
                tuple_weight(&shape),
                self.degree_bound
            )));
        }
        self.values.insert(shape, value);
        Ok(())
    }

    pub fn get(&self, shape: &[Partition]) -> Result<Scalar> {
        if is_trivial(shape) {
            return Ok(real(1.0));
        }
        if tuple_weight(shape) > self.degree_bound {
            return Err(Error::MissingEntry(format!("{shape:?} lies beyond the degree bound")));
        }
        Ok(self.values.get(shape).copied().unwrap_or(real(0.0)))
    }

    /// Nonzero entries, excluding the empty tuple.
    pub fn entries(&self) -> impl Iterator<Item = (&PartitionTuple, Scalar)> {
        self.values.iter().map(|(k, &v)| (k, v))
    }

    /// `{L, degree_bound?, entries: [{A, value}]}`; the bound defaults to the
    /// largest weight present.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: LinkJson = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        let bound = raw
            .degree_bound
            .unwrap_or_else(|| raw.entries.iter().map(|e| tuple_weight(&e.shape)).max().unwrap_or(0));
        let mut link = LinkData::new(raw.components, bound)?;
        for e in raw.entries {
            link.insert(e.shape, e.value.into())?;
        }
        Ok(link)
    }

    /// The data of two unlinked pieces: `P_{(A, B)} = P_A P_B`.
    pub fn disjoint_union(&self, other: &LinkData) -> LinkData {
        let bound = self.degree_bound.min(other.degree_bound);
        let mut values = BTreeMap::new();
        let left = std::iter::once((vec![Partition::empty(); self.components], real(1.0)))
            .chain(self.values.iter().map(|(k, &v)| (k.clone(), v)));
        let left: Vec<_> = left.collect();
        for (a, va) in &left {
            let right = std::iter::once((vec![Partition::empty(); other.components], real(1.0)))
                .chain(other.values.iter().map(|(k, &v)| (k.clone(), v)));
            for (b, vb) in right {
                let mut key = a.clone();
                key.extend(b);
                if !is_trivial(&key) && tuple_weight(&key) <= bound {
                    values.insert(key, va * vb);
                }
            }
        }
        LinkData {
            components: self.components + other.components,
            degree_bound: bound,
            values,
        }
    }
}

/// `W_mu = sum_A prod_alpha chi_{A_alpha}(C_{mu_alpha}) P_A`.
pub fn w_mu(link: &LinkData, mu: &[Partition]) -> Result<Scalar> {
    if mu.len() != link.components {
        return Err(Error::Shape("tuple length differs from the component count".into()));
    }
    if tuple_weight(mu) > link.degree_bound {
        return Err(Error::MissingEntry(format!("{mu:?} needs entries beyond the degree bound")));
    }
    let mut acc = real(0.0);
    for shape in tuples_with_weights(&weight_vector(mu)) {
        let value = link.get(&shape)?;
        if value.norm() == 0.0 {
            continue;
        }
        acc += value * tuple_character(&shape, mu)? as f64;
    }
    Ok(acc)
}

fn weight_classes<V>(table: &BTreeMap<PartitionTuple, V>) -> Result<BTreeSet<Vec<u32>>> {
    let mut len = None;
    let mut out = BTreeSet::new();
    for k in table.keys() {
        if *len.get_or_insert(k.len()) != k.len() {
            return Err(Error::Shape("tuples of different lengths".into()));
        }
        out.insert(weight_vector(k));
    }
    Ok(out)
}

/// Exact `W` for an integer `P` table, on every class whose weights occur.
pub fn w_from_p_exact(p: &BTreeMap<PartitionTuple, i128>) -> Result<BTreeMap<PartitionTuple, i128>> {
    let mut out = BTreeMap::new();
    for weights in weight_classes(p)? {
        let shapes = tuples_with_weights(&weights);
        for mu in &shapes {
            let mut acc = 0i128;
            for a in &shapes {
                if let Some(&v) = p.get(a) {
                    acc += tuple_character(a, mu)? as i128 * v;
                }
            }
            out.insert(mu.clone(), acc);
        }
    }
    Ok(out)
}

/// Inverse of [`w_from_p_exact`] by orthogonality:
/// `P_A = sum_mu chi_A(C_mu) W_mu / z_mu`, in exact rationals.
pub fn p_from_w_exact(w: &BTreeMap<PartitionTuple, i128>) -> Result<BTreeMap<PartitionTuple, i128>> {
    let mut out = BTreeMap::new();
    for weights in weight_classes(w)? {
        let shapes = tuples_with_weights(&weights);
        for a in &shapes {
            let mut acc = Ratio::from_integer(0i128);
            for mu in &shapes {
                if let Some(&v) = w.get(mu) {
                    let chi = tuple_character(a, mu)? as i128;
                    acc += Ratio::new(chi * v, tuple_z(mu) as i128);
                }
            }
            if !acc.is_integer() {
                return Err(Error::Invalid(format!("P at {a:?} is not an integer: {acc}")));
            }
            out.insert(a.clone(), acc.to_integer());
        }
    }
    Ok(out)
}

/// Formal variables grouped by link component, named `x<component>_<letter>`.
#[derive(Debug, Clone)]
pub struct Alphabet {
    letters: Vec<usize>,
    offsets: Vec<usize>,
    template: TruncatedSeries,
}

impl Alphabet {
    pub fn new(letters: &[usize], order: u32) -> Result<Self> {
        if letters.is_empty() || letters.contains(&0) {
            return Err(Error::Invalid("every component needs at least one letter".into()));
        }
        let mut names = Vec::new();
        let mut offsets = Vec::new();
        for (alpha, &k) in letters.iter().enumerate() {
            offsets.push(names.len());
            for i in 0..k {
                names.push(format!("x{}_{}", alpha + 1, i + 1));
            }
        }
        Ok(Alphabet {
            letters: letters.to_vec(),
            offsets,
            template: TruncatedSeries::zero_in(names, order)?,
        })
    }

    pub fn components(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn order(&self) -> u32 {
        self.template.order()
    }

    pub fn template(&self) -> &TruncatedSeries {
        &self.template
    }

    fn nvars(&self) -> usize {
        self.template.nvars()
    }

    /// A polynomial in one component's letters, placed in the full variable list.
    fn place(&self, alpha: usize, poly: &IntPoly) -> IntPoly {
        poly.iter()
            .map(|(e, &v)| {
                let mut full = vec![0; self.nvars()];
                full[self.offsets[alpha]..self.offsets[alpha] + e.len()].copy_from_slice(e);
                (full, v)
            })
            .collect()
    }

    fn to_series(&self, poly: &IntPoly) -> Result<TruncatedSeries> {
        let mut s = self.template.zero_like();
        for (e, &v) in poly {
            s.add_term(e, real(v as f64))?;
        }
        Ok(s)
    }

    fn check(&self, components: usize) -> Result<()> {
        if components != self.components() {
            return Err(Error::Shape(format!(
                "data has {components} components, alphabet has {}",
                self.components()
            )));
        }
        Ok(())
    }
}

/// Which symmetric-function basis a partition function is expanded in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionBasis {
    Schur,
    PowerSum,
}

fn tuple_function(
    alphabet: &Alphabet,
    tuple: &[Partition],
    basis: FunctionBasis,
    cache: &mut HashMap<(usize, Partition), TruncatedSeries>,
) -> Result<TruncatedSeries> {
    let mut acc = alphabet.template.one_like();
    for (alpha, part) in tuple.iter().enumerate() {
        if part.is_empty() {
            continue;
        }
        let key = (alpha, part.clone());
        if !cache.contains_key(&key) {
            let k = alphabet.letters[alpha];
            let poly = match basis {
                FunctionBasis::Schur => schur_tableaux(part, k),
                FunctionBasis::PowerSum => power_sum_poly(part, k),
            };
            cache.insert(key.clone(), alphabet.to_series(&alphabet.place(alpha, &poly))?);
        }
        acc = acc.try_mul(&cache[&key])?;
    }
    Ok(acc)
}

/// `1 + sum_A P_A s_A(X)` or `1 + sum_mu W_mu / z_mu p_mu(X)`, truncated at
/// the alphabet's order.
pub fn partition_function(link: &LinkData, alphabet: &Alphabet, basis: FunctionBasis) -> Result<TruncatedSeries> {
    alphabet.check(link.components)?;
    let top = link.degree_bound.min(alphabet.order());
    let mut z = alphabet.template.one_like();
    let mut cache = HashMap::new();
    for tuple in tuples_up_to(link.components, top) {
        let weight = match basis {
            FunctionBasis::Schur => link.get(&tuple)?,
            FunctionBasis::PowerSum => w_mu(link, &tuple)? / tuple_z(&tuple) as f64,
        };
        if weight.norm() == 0.0 {
            continue;
        }
        let f = tuple_function(alphabet, &tuple, basis, &mut cache)?;
        z = z.try_add(&f.scale(weight))?;
    }
    Ok(z)
}

/// `log Z` as a series.
pub fn free_energy(link: &LinkData, alphabet: &Alphabet) -> Result<TruncatedSeries> {
    let z = partition_function(link, alphabet, FunctionBasis::PowerSum)?;
    Ok(z.log()?.0)
}

type PowerSumElement = BTreeMap<PartitionTuple, Scalar>;

fn merge(a: &[Partition], b: &[Partition]) -> Result<PartitionTuple> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut parts: Vec<u32> = x.parts().iter().chain(y.parts()).copied().collect();
            parts.sort_unstable_by(|l, r| r.cmp(l));
            Partition::new(parts)
        })
        .collect()
}

fn ps_mul(a: &PowerSumElement, b: &PowerSumElement, bound: u32) -> Result<PowerSumElement> {
    let mut out = PowerSumElement::new();
    for (ka, va) in a {
        for (kb, vb) in b {
            if tuple_weight(ka) + tuple_weight(kb) > bound {
                continue;
            }
            *out.entry(merge(ka, kb)?).or_insert(real(0.0)) += va * vb;
        }
    }
    Ok(out)
}

/// Connected coefficients `F_mu` with `log Z = sum_mu F_mu / z_mu p_mu`,
/// computed in the power-sum ring itself (no alphabet).
pub fn free_energy_coefficients(link: &LinkData) -> Result<BTreeMap<PartitionTuple, Scalar>> {
    let bound = link.degree_bound;
    let mut u = PowerSumElement::new();
    for tuple in tuples_up_to(link.components, bound) {
        let v = w_mu(link, &tuple)?;
        if v.norm() != 0.0 {
            u.insert(tuple.clone(), v / tuple_z(&tuple) as f64);
        }
    }
    let mut log = PowerSumElement::new();
    let mut power = u.clone();
    for k in 1..=bound {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        for (key, v) in &power {
            *log.entry(key.clone()).or_insert(real(0.0)) += v * (sign / k as f64);
        }
        power = ps_mul(&power, &u, bound)?;
        if power.is_empty() {
            break;
        }
    }
    Ok(log
        .into_iter()
        .filter(|(_, v)| v.norm() != 0.0)
        .map(|(k, v)| {
            let z = tuple_z(&k) as f64;
            (k, v * z)
        })
        .collect())
}

/// `sum_mu F_mu / z_mu p_mu(X)` from connected coefficients.
pub fn power_sum_series(coefficients: &BTreeMap<PartitionTuple, Scalar>, alphabet: &Alphabet) -> Result<TruncatedSeries> {
    let mut out = alphabet.template.zero_like();
    let mut cache = HashMap::new();
    for (tuple, &v) in coefficients {
        alphabet.check(tuple.len())?;
        if tuple_weight(tuple) > alphabet.order() {
            continue;
        }
        let f = tuple_function(alphabet, tuple, FunctionBasis::PowerSum, &mut cache)?;
        out = out.try_add(&f.scale(v / tuple_z(tuple) as f64))?;
    }
    Ok(out)
}

/// How the letter indices of a bracket are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexChoice {
    /// Every sequence of letters, repeats allowed.
    #[default]
    Ordered,
    /// Weakly increasing sequences only.
    Unordered,
}

fn index_sequences(len: usize, letters: usize, choice: IndexChoice) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|seq: Vec<usize>| {
                let start = match choice {
                    IndexChoice::Ordered => 0,
                    IndexChoice::Unordered => seq.last().copied().unwrap_or(0),
                };
                (start..letters).map(move |i| {
                    let mut next = seq.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
    }
    out
}

/// The monomials `x_{i_1}^{mu_1} ... x_{i_l}^{mu_l}` over all index choices,
/// multiplied across components.
pub fn bracket_monomials(mu: &[Partition], alphabet: &Alphabet, choice: IndexChoice) -> Result<Vec<Vec<u32>>> {
    alphabet.check(mu.len())?;
    if is_trivial(mu) {
        return Err(Error::Invalid("the bracket needs a nonempty tuple".into()));
    }
    let mut out = vec![vec![0u32; alphabet.nvars()]];
    for (alpha, part) in mu.iter().enumerate() {
        let seqs = index_sequences(part.len(), alphabet.letters[alpha], choice);
        out = out
            .into_iter()
            .flat_map(|base| {
                seqs.iter()
                    .map(|seq| {
                        let mut e = base.clone();
                        for (&letter, &p) in seq.iter().zip(part.parts()) {
                            e[alphabet.offsets[alpha] + letter] += p;
                        }
                        e
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    Ok(out)
}

/// `<1 - psi X^mu>`: the product of `1 - psi M` over the bracket monomials.
pub fn symmetric_bracket(psi: Scalar, mu: &[Partition], alphabet: &Alphabet, choice: IndexChoice) -> Result<TruncatedSeries> {
    let mut s = alphabet.template.one_like();
    for e in bracket_monomials(mu, alphabet, choice)? {
        s.mul_binomial(&e, -psi)?;
    }
    Ok(s)
}

/// Multiplies `s` by `<1 - psi X^mu>^{-power}`.
fn apply_bracket_power(s: &mut TruncatedSeries, monomials: &[Vec<u32>], psi: Scalar, power: i64) -> Result<()> {
    for e in monomials {
        for _ in 0..power.unsigned_abs() {
            if power > 0 {
                s.mul_geometric(e, psi)?;
            } else {
                s.mul_binomial(e, -psi)?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct TableJson {
    #[serde(rename = "L")]
    components: usize,
    entries: Vec<TableEntryJson>,
}

#[derive(Debug, Deserialize)]
struct TableEntryJson {
    mu: PartitionTuple,
    #[serde(default)]
    g: u32,
    #[serde(rename = "Q")]
    charge: f64,
    n: i64,
}

/// One integer invariant `n_{mu; g, Q}`; `Q` is stored doubled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantEntry {
    pub mu: PartitionTuple,
    pub genus: u32,
    pub twice_charge: i32,
    pub n: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct InvariantTable {
    pub components: usize,
    pub entries: Vec<InvariantEntry>,
}

impl InvariantTable {
    pub fn new(components: usize) -> Self {
        InvariantTable {
            components,
            entries: Vec::new(),
        }
    }

    /// Adds `n_{mu; g, Q}` with `Q = twice_charge / 2`.
    pub fn push(&mut self, mu: PartitionTuple, genus: u32, twice_charge: i32, n: i64) -> Result<()> {
        if mu.len() != self.components {
            return Err(Error::Shape("tuple length differs from the component count".into()));
        }
        if is_trivial(&mu) {
            return Err(Error::Invalid("invariants are indexed by nonempty tuples".into()));
        }
        self.entries.push(InvariantEntry {
            mu,
            genus,
            twice_charge,
            n,
        });
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: TableJson = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        let mut table = InvariantTable::new(raw.components);
        for e in raw.entries {
            let twice = e.charge * 2.0;
            if twice.fract() != 0.0 || twice.abs() > i32::MAX as f64 {
                return Err(Error::Invalid(format!("Q = {} is not a half-integer", e.charge)));
            }
            table.push(e.mu, e.g, twice as i32, e.n)?;
        }
        Ok(table)
    }

    /// Entries summed over the genus, zeros dropped.
    pub fn summed(&self) -> BTreeMap<(PartitionTuple, i32), i64> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry((e.mu.clone(), e.twice_charge)).or_insert(0) += e.n;
        }
        out.retain(|_, v| *v != 0);
        out
    }

    fn resolved(&self) -> BTreeMap<(PartitionTuple, u32, i32), i64> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry((e.mu.clone(), e.genus, e.twice_charge)).or_insert(0) += e.n;
        }
        out
    }
}

fn charge_power(t: Scalar, twice_charge: i32) -> Scalar {
    (t.ln() * (twice_charge as f64 / 2.0)).exp()
}

/// Infinite-product form of the partition function and its truncation data.
#[derive(Debug, Clone)]
pub struct ProductForm {
    pub series: TruncatedSeries,
    /// Largest `s` in `q^s` that was multiplied in.
    pub levels: u32,
    pub tail_bound: f64,
}

/// `prod_{mu, Q} prod_{m >= 1} [<1 - q^m t^Q X^mu>^{-m n}
///   prod_{k >= 1} <1 - q^{k+m} t^Q X^mu>^{-2 m n}]`,
/// the two-sided product in its collapsed form. Grouping by `s = m + k`
/// gives the exponent `-s^2 n` at `q^s`.
pub fn lmov_product(
    table: &InvariantTable,
    alphabet: &Alphabet,
    q: Scalar,
    t: Scalar,
    choice: IndexChoice,
    target: f64,
    max_levels: u32,
) -> Result<ProductForm> {
    alphabet.check(table.components)?;
    let r = q.norm();
    if r >= 1.0 {
        return Err(Error::Domain(format!("|q| = {r} is not below 1")));
    }
    ensure_finite(t)?;
    if t.norm() == 0.0 {
        return Err(Error::Domain("t = 0".into()));
    }
    let mut series = alphabet.template.one_like();
    let mut levels = 0;
    let mut tail_bound = 0.0;
    for ((mu, twice), n) in table.summed() {
        let monomials = bracket_monomials(&mu, alphabet, choice)?;
        let tq = charge_power(t, twice);
        let weight = (n.unsigned_abs() as f64) * monomials.len() as f64;
        // bound on the log coefficients from levels above `top`
        let rest = |top: u32| -> f64 {
            (top + 1..top + 2000)
                .map(|s| {
                    let x = r.powi(s as i32) * tq.norm();
                    let s = s as f64;
                    s * s * weight * x / (1.0 - x.min(0.5))
                })
                .sum()
        };
        let mut top = 1;
        while rest(top) >= target {
            top += 1;
            if top > max_levels {
                return Err(Error::NonConvergent(format!("{mu:?} needs more than {max_levels} levels")));
            }
        }
        let mut qs = real(1.0);
        for s in 1..=top {
            qs *= q;
            apply_bracket_power(&mut series, &monomials, qs * tq, (s * s) as i64 * n)?;
        }
        levels = levels.max(top);
        tail_bound += rest(top);
    }
    Ok(ProductForm {
        series,
        levels,
        tail_bound,
    })
}

/// `exp` of the closed-form logarithm of the product: each entry contributes
/// `n sum_M sum_j (t^Q M)^j / j * q^j (1 + q^j) / (1 - q^j)^3`.
pub fn lmov_log_form(table: &InvariantTable, alphabet: &Alphabet, q: Scalar, t: Scalar, choice: IndexChoice) -> Result<TruncatedSeries> {
    alphabet.check(table.components)?;
    if q.norm() >= 1.0 {
        return Err(Error::Domain(format!("|q| = {} is not below 1", q.norm())));
    }
    let mut log = alphabet.template.zero_like();
    for ((mu, twice), n) in table.summed() {
        let tq = charge_power(t, twice);
        for e in bracket_monomials(&mu, alphabet, choice)? {
            let deg: u32 = e.iter().sum();
            let mut j = 1;
            while j * deg <= alphabet.order() {
                let qj = q.powu(j);
                let weight = qj * (real(1.0) + qj) / (real(1.0) - qj).powu(3);
                let exps: Vec<u32> = e.iter().map(|&x| x * j).collect();
                log.add_term(&exps, tq.powu(j) * weight * (n as f64 / j as f64))?;
                j += 1;
            }
        }
    }
    log.exp()
}

/// The collapsed two-sided product for one `(m, Q, n)` at a numeric monomial
/// value, directly and through the spectral function:
/// `(1 - psi)^{-mn} prod_{k >= 1} (1 - q^k psi)^{-2mn}` against
/// `(1 - psi)^{-mn} R((1 + Omega(psi))(1 - i rho))^{-2mn}`, `psi = q^m t^Q X^mu`.
pub fn bilateral_collapse(
    m: u32,
    twice_charge: i32,
    n: i64,
    monomial: Scalar,
    t: Scalar,
    params: &SpectralParams,
    tol: f64,
) -> Result<IdentityReport> {
    let q = params.q;
    let psi = q.powu(m) * charge_power(t, twice_charge) * monomial;
    let label = "bilateral-collapse";
    let decorate = |r: IdentityReport| {
        r.param("m", m)
            .param("Q", twice_charge as f64 / 2.0)
            .param("n", n)
            .param("monomial", monomial)
            .param("t", t)
            .param("q", q)
    };
    if psi.norm() >= 1.0 {
        return Ok(decorate(IdentityReport::domain_failure(label, format!("|psi| = {} is not below 1", psi.norm()), tol)));
    }
    let mn = m as i32 * n as i32;
    if n == 0 {
        return Ok(decorate(IdentityReport::compare(label, real(1.0), real(1.0), 0.0, tol)));
    }
    let target = tol / 100.0 / (2 * mn.unsigned_abs()) as f64;
    let front = (real(1.0) - psi).powi(-mn);
    let direct = jackson_g1(q * psi, q, target)?;
    let omega = match params.omega_bar(psi) {
        Ok(v) => v,
        Err(e) => return Ok(decorate(IdentityReport::domain_failure(label, e.to_string(), tol))),
    };
    let spectral = ruelle((omega + 1.0) * c(1.0, -params.rho), params, 1.0, RuelleMethod::Auto, target)?;
    let scale = (2 * mn.unsigned_abs()) as f64;
    Ok(decorate(
        IdentityReport::compare(
            label,
            front * direct.value.powi(-2 * mn),
            front * spectral.value.powi(-2 * mn),
            scale * (direct.tail_bound + spectral.tail_bound),
            tol,
        )
        .truncated("direct_factors", direct.terms)
        .truncated("ruelle_terms", spectral.terms),
    ))
}

/// The reflection rule `n_{mu; g, -Q} = (-1)^{len(mu)} n_{mu; g, Q}` on the
/// table; offending `(mu, g, Q)` are listed in the note.
pub fn rank_level_reflection(table: &InvariantTable, tol: f64) -> IdentityReport {
    let resolved = table.resolved();
    let mut offenders = Vec::new();
    for ((mu, g, twice), &n) in &resolved {
        let sign = if tuple_len(mu) % 2 == 0 { 1 } else { -1 };
        let mirror = resolved.get(&(mu.clone(), *g, -twice)).copied().unwrap_or(0);
        if mirror != sign * n {
            offenders.push(format!("(mu={mu:?}, g={g}, Q={})", *twice as f64 / 2.0));
        }
    }
    let report = IdentityReport::compare(
        "rank-level[reflection]",
        real(offenders.len() as f64),
        real(0.0),
        0.0,
        tol,
    )
    .param("entries", resolved.len());
    if offenders.is_empty() {
        report
    } else {
        report.note(format!("violated at {}", offenders.join(", ")))
    }
}

/// The reflection check, followed for symmetric tables by the product-level
/// consequence: per tuple `mu`, the block `W_mu(q, t)` satisfies
/// `W_mu(q, 1/t) = W_mu(q, t)^{(-1)^{len(mu)}}`.
pub fn symmetry_checks(
    table: &InvariantTable,
    alphabet: &Alphabet,
    q: Scalar,
    t: Scalar,
    choice: IndexChoice,
    tol: f64,
) -> Result<Vec<IdentityReport>> {
    let reflection = rank_level_reflection(table, tol);
    let label = "rank-level[t->1/t]";
    if !reflection.pass {
        let failure = IdentityReport::domain_failure(label, "table is not rank-level symmetric", tol);
        return Ok(vec![reflection, failure]);
    }
    let mut blocks: BTreeMap<PartitionTuple, InvariantTable> = BTreeMap::new();
    for e in &table.entries {
        blocks
            .entry(e.mu.clone())
            .or_insert_with(|| InvariantTable::new(table.components))
            .entries
            .push(e.clone());
    }
    let mut worst = (0.0, real(0.0), real(0.0));
    let mut tail = 0.0;
    let mut levels = 0;
    for (mu, block) in &blocks {
        let target = tol / 100.0;
        let direct = lmov_product(block, alphabet, q, t, choice, target, 500)?;
        let flipped = lmov_product(block, alphabet, q, t.inv(), choice, target, 500)?;
        let expected = if tuple_len(mu) % 2 == 0 {
            direct.series.clone()
        } else {
            direct.series.inv()?
        };
        for ((_, a), (_, b)) in flipped.series.terms().zip(expected.terms()) {
            let d = (a - b).norm() / b.norm().max(1.0);
            if d > worst.0 {
                worst = (d, a, b);
            }
        }
        tail += direct.tail_bound + flipped.tail_bound;
        levels = levels.max(direct.levels).max(flipped.levels);
    }
    let product = IdentityReport::with_residual(label, worst.1, worst.2, worst.0, tail, tol)
        .param("q", q)
        .param("t", t)
        .param("blocks", blocks.len())
        .truncated("levels", levels as u64)
        .truncated("order", alphabet.order() as u64);
    Ok(vec![reflection, product])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(p: &[u32]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn w_small_examples() {
        let mut link = LinkData::new(1, 2).unwrap();
        link.insert(vec![part(&[1])], real(1.0)).unwrap();
        assert_eq!(w_mu(&link, &[part(&[1])]).unwrap(), real(1.0));
        let mut link = LinkData::new(1, 2).unwrap();
        link.insert(vec![part(&[2])], real(5.0)).unwrap();
        link.insert(vec![part(&[1, 1])], real(3.0)).unwrap();
        assert_eq!(w_mu(&link, &[part(&[2])]).unwrap(), real(2.0));
        assert_eq!(w_mu(&link, &[part(&[1, 1])]).unwrap(), real(8.0));
        assert!(matches!(w_mu(&link, &[part(&[3])]), Err(Error::MissingEntry(_))));
    }

    #[test]
    fn bases_agree_for_single_color() {
        let mut link = LinkData::new(1, 1).unwrap();
        link.insert(vec![part(&[1])], real(2.5)).unwrap();
        let alphabet = Alphabet::new(&[2], 4).unwrap();
        let a = partition_function(&link, &alphabet, FunctionBasis::Schur).unwrap();
        let b = partition_function(&link, &alphabet, FunctionBasis::PowerSum).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-14);
        assert_eq!(a.coeff(&[1, 0]), real(2.5));
    }

    #[test]
    fn brackets() {
        let alphabet = Alphabet::new(&[2], 6).unwrap();
        let b = symmetric_bracket(real(0.5), &[part(&[1])], &alphabet, IndexChoice::Ordered).unwrap();
        assert_eq!(b.coeff(&[1, 1]), real(0.25));
        let ordered = bracket_monomials(&[part(&[1, 1])], &alphabet, IndexChoice::Ordered).unwrap();
        assert_eq!(ordered.len(), 4);
        let unordered = bracket_monomials(&[part(&[1, 1])], &alphabet, IndexChoice::Unordered).unwrap();
        assert_eq!(unordered.len(), 3);
        let one = Alphabet::new(&[1], 6).unwrap();
        assert_eq!(bracket_monomials(&[part(&[2, 1])], &one, IndexChoice::Ordered).unwrap(), vec![vec![3]]);
    }

    #[test]
    fn product_against_log_form() {
        let mut table = InvariantTable::new(1);
        table.push(vec![part(&[1])], 0, 0, 1).unwrap();
        let alphabet = Alphabet::new(&[1], 6).unwrap();
        let prod = lmov_product(&table, &alphabet, real(0.2), real(0.5), IndexChoice::Ordered, 1e-13, 500).unwrap();
        let oracle = lmov_log_form(&table, &alphabet, real(0.2), real(0.5), IndexChoice::Ordered).unwrap();
        assert!(prod.series.max_rel_diff(&oracle).unwrap() < 1e-10);
        let empty = InvariantTable::new(1);
        let one = lmov_product(&empty, &alphabet, real(0.2), real(0.5), IndexChoice::Ordered, 1e-13, 500).unwrap();
        assert_eq!(one.series.max_abs_diff(&alphabet.template().one_like()).unwrap(), 0.0);
    }

    #[test]
    fn collapse_example() {
        let p = SpectralParams::from_nome(real(0.2)).unwrap();
        let r = bilateral_collapse(1, 0, 1, real(0.3), real(0.5), &p, 1e-7).unwrap();
        assert!(r.pass, "{r:?}");
        let folded = bilateral_collapse(1, 0, 1, real(0.5f64.powf(0.5) * 0.3), real(0.5), &p, 1e-7).unwrap();
        let charged = bilateral_collapse(1, 1, 1, real(0.3), real(0.5), &p, 1e-7).unwrap();
        assert!((folded.lhs - charged.lhs).norm() < 1e-15);
    }

    #[test]
    fn reflection_tables() {
        let mut good = InvariantTable::new(1);
        good.push(vec![part(&[1])], 0, 1, 1).unwrap();
        good.push(vec![part(&[1])], 0, -1, -1).unwrap();
        assert!(rank_level_reflection(&good, 1e-9).pass);
        let mut bad = InvariantTable::new(1);
        bad.push(vec![part(&[1])], 0, 1, 1).unwrap();
        bad.push(vec![part(&[1])], 0, -1, 1).unwrap();
        let r = rank_level_reflection(&bad, 1e-9);
        assert!(!r.pass);
        assert!(r.note.unwrap().contains("Q=0.5"));
    }
}
