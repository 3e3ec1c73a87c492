//! Partitions of multipartite numbers and their generating functions.
//!
//! A multipartite number is a vector of nonnegative integers; a partition of
//! it is a multiset of nonzero vectors summing to it componentwise. The
//! brute-force enumerator here is the ground truth against which the product
//! and exponential forms of the generating functions are compared.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};
use crate::series::TruncatedSeries;

pub type MultiIndex = Vec<u32>;

/// Counts of partitions of one target, split by number of parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultipartiteCount {
    pub target: MultiIndex,
    pub unrestricted: u64,
    pub distinct: u64,
    pub by_num_parts: BTreeMap<usize, u64>,
    pub distinct_by_num_parts: BTreeMap<usize, u64>,
}

/// Every nonzero vector dominated by `target`, in descending lexicographic order.
fn candidate_parts(target: &[u32]) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = target.to_vec();
    loop {
        if cur.iter().any(|&v| v > 0) {
            out.push(cur.clone());
        }
        // decrement like an odometer, least significant slot last
        let mut i = cur.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] > 0 {
                cur[i] -= 1;
                for (j, slot) in cur.iter_mut().enumerate().skip(i + 1) {
                    *slot = target[j];
                }
                break;
            }
        }
    }
}

fn dominated(part: &[u32], rest: &[u32]) -> bool {
    part.iter().zip(rest).all(|(a, b)| a <= b)
}

fn validate_target(target: &[u32]) -> Result<()> {
    if target.is_empty() || target.iter().all(|&v| v == 0) {
        return Err(Error::ZeroTarget);
    }
    Ok(())
}

/// Lists every partition of `target` as a multiset of parts (each part listed
/// in descending lexicographic order). With `distinct_parts`, no part repeats.
pub fn enumerate_multipartitions(target: &[u32], distinct_parts: bool) -> Result<Vec<Vec<MultiIndex>>> {
    validate_target(target)?;
    let parts = candidate_parts(target);
    let mut out = Vec::new();
    // explicit stack of (remaining, next admissible part, chosen parts)
    let mut stack: Vec<(Vec<u32>, usize, Vec<usize>)> = vec![(target.to_vec(), 0, Vec::new())];
    while let Some((remaining, start, chosen)) = stack.pop() {
        if remaining.iter().all(|&v| v == 0) {
            out.push(chosen.iter().map(|&i| parts[i].clone()).collect());
            continue;
        }
        for i in (start..parts.len()).rev() {
            if dominated(&parts[i], &remaining) {
                let rest = remaining.iter().zip(&parts[i]).map(|(r, p)| r - p).collect();
                let mut next = chosen.clone();
                next.push(i);
                stack.push((rest, if distinct_parts { i + 1 } else { i }, next));
            }
        }
    }
    Ok(out)
}

/// Exact partition counts for `target`, with and without the distinct-parts
/// restriction, graded by the number of parts.
pub fn count_multipartitions(target: &[u32]) -> Result<MultipartiteCount> {
    validate_target(target)?;
    let mut by_num_parts = BTreeMap::new();
    let mut distinct_by_num_parts = BTreeMap::new();
    for p in enumerate_multipartitions(target, false)? {
        *by_num_parts.entry(p.len()).or_insert(0) += 1;
        let all_distinct = p.windows(2).all(|w| w[0] != w[1]);
        if all_distinct {
            *distinct_by_num_parts.entry(p.len()).or_insert(0) += 1;
        }
    }
    Ok(MultipartiteCount {
        target: target.to_vec(),
        unrestricted: by_num_parts.values().sum(),
        distinct: distinct_by_num_parts.values().sum(),
        by_num_parts,
        distinct_by_num_parts,
    })
}

fn x_names(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("x{i}")).collect()
}

/// Nonzero exponent vectors in `m` slots with total degree at most `order`.
fn nonzero_monomials(template: &TruncatedSeries, skip: usize) -> Vec<Vec<u32>> {
    let basis = template.basis();
    (1..basis.len())
        .map(|i| basis.exponent(i).to_vec())
        .filter(|e| e[skip..].iter().any(|&v| v > 0) && e[..skip].iter().all(|&v| v == 0))
        .collect()
}

/// `prod_{k != 0} (1 - z x^k)^{-1}` in `x1..xm`, truncated at total degree `order`.
pub fn gf_unrestricted(z: Scalar, m: usize, order: u32) -> Result<TruncatedSeries> {
    gf_numeric(z, m, order, true)
}

/// `prod_{k != 0} (1 + z x^k)` in `x1..xm`, truncated at total degree `order`.
pub fn gf_distinct(z: Scalar, m: usize, order: u32) -> Result<TruncatedSeries> {
    gf_numeric(z, m, order, false)
}

fn gf_numeric(z: Scalar, m: usize, order: u32, unrestricted: bool) -> Result<TruncatedSeries> {
    if m == 0 {
        return Err(Error::Invalid("need at least one variable".into()));
    }
    let mut f = TruncatedSeries::zero_in(x_names(m), order)?.one_like();
    for k in nonzero_monomials(&f, 0) {
        if unrestricted {
            f.mul_geometric(&k, z)?;
        } else {
            f.mul_binomial(&k, z)?;
        }
    }
    Ok(f)
}

/// The same products with `z` kept formal: variables `z, x1..xm`, where each
/// factor carries `z x^k` of total degree `|k| + 1`.
pub fn gf_graded(m: usize, order: u32, unrestricted: bool) -> Result<TruncatedSeries> {
    if m == 0 {
        return Err(Error::Invalid("need at least one variable".into()));
    }
    let mut names = vec!["z".to_string()];
    names.extend(x_names(m));
    let mut f = TruncatedSeries::zero_in(names, order)?.one_like();
    for k in nonzero_monomials(&f, 1) {
        let mut e = k.clone();
        e[0] = 1;
        if unrestricted {
            f.mul_geometric(&e, real(1.0))?;
        } else {
            f.mul_binomial(&e, real(1.0))?;
        }
    }
    Ok(f)
}

/// Rounds a coefficient that should be a nonnegative integer count.
pub fn rounded_count(v: Scalar) -> Result<u64> {
    let r = v.re.round();
    if (v - real(r)).norm() > 1e-6 || r < 0.0 {
        return Err(Error::NonFinite(format!("coefficient {v} is not an integer count")));
    }
    Ok(r as u64)
}

/// Which generating function: `(1 - z x^k)^{-1}` factors or `(1 + z x^k)` factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Unrestricted,
    Distinct,
}

/// How the alphabet `x1..xm` is specialized to a single nome `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Every `x_j = q`, so `x^k = q^{|k|}`.
    Diagonal,
    /// `x_j = q^j`, so `x^k = q^{k1 + 2 k2 + ... + m km}`.
    DistinctPowers,
}

/// Number of nonzero `k` with `x^k = q^e` under the convention, for `e = 0..=order`.
pub fn exponent_multiplicities(m: usize, order: u32, convention: Convention) -> Vec<u64> {
    let n = order as usize;
    let mut mult = vec![0u64; n + 1];
    mult[0] = 1;
    match convention {
        Convention::Diagonal => {
            for (e, v) in mult.iter_mut().enumerate() {
                *v = binomial((e + m - 1) as u64, (m - 1) as u64);
            }
        }
        Convention::DistinctPowers => {
            // partitions of e into parts of size at most m
            for part in 1..=m {
                for e in part..=n {
                    mult[e] += mult[e - part];
                }
            }
        }
    }
    mult[0] = 0;
    mult
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `beta(n) = prod_j (1 - x_j^n)^{-1}` as a series in `q`.
pub fn beta_series(n: u32, m: usize, order: u32, convention: Convention) -> Result<TruncatedSeries> {
    if n == 0 || m == 0 {
        return Err(Error::Invalid("beta needs n >= 1 and m >= 1".into()));
    }
    let mut b = TruncatedSeries::zero(&["q"], order)?.one_like();
    for j in 1..=m as u32 {
        let e = match convention {
            Convention::Diagonal => n,
            Convention::DistinctPowers => n * j,
        };
        b.mul_geometric(&[e], real(1.0))?;
    }
    Ok(b)
}

/// Both representations of a specialized generating function.
#[derive(Debug, Clone)]
pub struct Specialized {
    /// The product over nonzero `k`, expanded directly.
    pub direct: TruncatedSeries,
    /// `exp(sum_n c_n z^n / n (beta(n) - 1))` with `c_n = 1` for the
    /// unrestricted kind and `(-1)^{n+1}` for the distinct kind.
    pub exp_log: TruncatedSeries,
    pub residual: f64,
}

/// Specialization of the generating function to one nome. With `z = None`
/// the result is a series in `(z, q)`; otherwise `z` is substituted and the
/// result is a series in `q`. The subtraction of 1 from `beta(n)` accounts for
/// the excluded zero vector.
pub fn gf_specialized(
    z: Option<Scalar>,
    m: usize,
    order: u32,
    kind: Kind,
    convention: Convention,
    tol: f64,
) -> Result<Specialized> {
    let names: Vec<&str> = if z.is_some() { vec!["q"] } else { vec!["z", "q"] };
    let zero = TruncatedSeries::zero(&names, order)?;
    let qpos = names.len() - 1;
    let mult = exponent_multiplicities(m, order, convention);

    let mut direct = zero.one_like();
    for (e, &count) in mult.iter().enumerate().skip(1) {
        let mut exps = vec![0u32; names.len()];
        exps[qpos] = e as u32;
        let w = match z {
            Some(v) => v,
            None => {
                exps[0] = 1;
                real(1.0)
            }
        };
        for _ in 0..count {
            match kind {
                Kind::Unrestricted => direct.mul_geometric(&exps, w)?,
                Kind::Distinct => direct.mul_binomial(&exps, w)?,
            }
        }
    }

    let mut log = zero.zero_like();
    for n in 1..=order {
        let beta = beta_series(n, m, order, convention)?;
        let sign = match kind {
            Kind::Unrestricted => 1.0,
            Kind::Distinct if n % 2 == 1 => 1.0,
            Kind::Distinct => -1.0,
        };
        for (e, v) in beta.terms() {
            if e[0] == 0 {
                continue;
            }
            let mut exps = vec![0u32; names.len()];
            exps[qpos] = e[0];
            let coeff = match z {
                Some(zv) => v * zv.powu(n) * sign / n as f64,
                None => {
                    exps[0] = n;
                    v * sign / n as f64
                }
            };
            log.add_term(&exps, coeff)?;
        }
    }
    let exp_log = log.exp()?;
    let residual = direct.max_rel_diff(&exp_log)?;
    if residual > tol {
        return Err(Error::NonConvergent(format!(
            "product and exponential forms differ by {residual:e}"
        )));
    }
    Ok(Specialized {
        direct,
        exp_log,
        residual,
    })
}

/// Substitutes `z -> -z` in a series whose first variable is `z`.
pub fn negate_first_variable(s: &TruncatedSeries) -> TruncatedSeries {
    let mut out = s.zero_like();
    for (e, v) in s.terms() {
        let sign = if e[0] % 2 == 1 { -1.0 } else { 1.0 };
        out.add_term(e, v * sign).expect("same shape");
    }
    out
}
