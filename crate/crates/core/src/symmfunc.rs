//! Partitions, symmetric-group characters and Schur functions.
//!
//! Characters and class sizes are exact integers; orthogonality is checked
//! in exact rational arithmetic. Floating point only enters when a Schur
//! function is turned into a [`TruncatedSeries`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::real;
use crate::series::TruncatedSeries;

/// A weakly decreasing sequence of positive integers. The empty partition is
/// allowed and has weight zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.iter().any(|&p| p == 0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid(format!("{parts:?} is not a partition")));
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `m_j`: how many parts equal `j`, keyed by `j`.
    pub fn multiplicities(&self) -> BTreeMap<u32, u32> {
        let mut m = BTreeMap::new();
        for &p in &self.0 {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// The conjugate partition.
    pub fn transpose(&self) -> Partition {
        let first = self.0.first().copied().unwrap_or(0);
        Partition(
            (1..=first)
                .map(|i| self.0.iter().filter(|&&p| p >= i).count() as u32)
                .collect(),
        )
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All partitions of `n` in descending lexicographic order, `(n)` first.
pub fn partitions(n: u32) -> Vec<Partition> {
    if n == 0 {
        return vec![Partition::empty()];
    }
    let mut out = Vec::new();
    let mut cur = vec![n];
    loop {
        out.push(Partition(cur.clone()));
        // next partition in reverse lexicographic order
        let mut rem = 0;
        while cur.last() == Some(&1) {
            cur.pop();
            rem += 1;
        }
        let Some(last) = cur.pop() else {
            return out;
        };
        let k = last - 1;
        rem += 1;
        cur.push(k);
        while rem > k {
            cur.push(k);
            rem -= k;
        }
        if rem > 0 {
            cur.push(rem);
        }
    }
}

/// `z_mu = prod_j j^{m_j} m_j!`, the centralizer order.
pub fn z_mu(mu: &Partition) -> u128 {
    mu.multiplicities()
        .iter()
        .map(|(&j, &m)| (j as u128).pow(m) * (1..=m as u128).product::<u128>())
        .product()
}

/// `(-1)^{|mu| - len(mu)}`.
pub fn sign(mu: &Partition) -> i64 {
    if (mu.weight() as usize - mu.len()) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Irreducible character value `chi_shape(C_mu)` by the Murnaghan-Nakayama rule.
pub fn character(shape: &Partition, mu: &Partition) -> Result<i64> {
    if shape.weight() != mu.weight() {
        return Err(Error::WeightMismatch(shape.weight(), mu.weight()));
    }
    let mut memo = HashMap::new();
    Ok(mn_recurse(&beta_set(shape), mu.parts(), &mut memo))
}

/// Bead positions `lambda_i + (len - i)`, strictly decreasing.
fn beta_set(shape: &Partition) -> Vec<u32> {
    let l = shape.len() as u32;
    shape
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &p)| p + l - 1 - i as u32)
        .collect()
}

fn mn_recurse(beads: &[u32], rest: &[u32], memo: &mut HashMap<(Vec<u32>, Vec<u32>), i64>) -> i64 {
    let Some((&r, tail)) = rest.split_first() else {
        return 1;
    };
    let key = (beads.to_vec(), rest.to_vec());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut total = 0;
    for (i, &b) in beads.iter().enumerate() {
        if b < r || beads.contains(&(b - r)) {
            continue;
        }
        // moving a bead down by r removes a rim hook; its height is the
        // number of beads jumped over
        let target = b - r;
        let jumped = beads.iter().filter(|&&x| x > target && x < b).count();
        let mut next: Vec<u32> = beads.to_vec();
        next[i] = target;
        next.sort_unstable_by(|a, b| b.cmp(a));
        let normalized = normalize_beads(&next);
        let value = mn_recurse(&normalized, tail, memo);
        total += if jumped % 2 == 0 { value } else { -value };
    }
    memo.insert(key, total);
    total
}

/// Drops beads at the bottom that encode zero-length rows, so equal shapes
/// share memo keys.
fn normalize_beads(beads: &[u32]) -> Vec<u32> {
    let mut b = beads.to_vec();
    let mut shift = 0;
    while let Some(&last) = b.last() {
        if last == shift {
            b.pop();
            shift += 1;
        } else {
            break;
        }
    }
    b.iter().map(|&x| x - shift).collect()
}

/// Full character table of the symmetric group on `n` letters.
#[derive(Debug, Clone, Serialize)]
pub struct CharacterTable {
    pub n: u32,
    /// Row labels (irreducibles) and column labels (classes), same order.
    pub partitions: Vec<Partition>,
    pub table: Vec<Vec<i64>>,
    pub z_mu: Vec<u128>,
}

pub fn character_table(n: u32) -> CharacterTable {
    let parts = partitions(n);
    let table = parts
        .iter()
        .map(|a| {
            let beads = beta_set(a);
            let mut memo = HashMap::new();
            parts
                .iter()
                .map(|mu| mn_recurse(&beads, mu.parts(), &mut memo))
                .collect()
        })
        .collect();
    let z = parts.iter().map(z_mu).collect();
    CharacterTable {
        n,
        partitions: parts,
        table,
        z_mu: z,
    }
}

/// Row and column orthogonality of the character table, exactly.
pub fn orthogonality_check(n: u32) -> bool {
    let t = character_table(n);
    let k = t.partitions.len();
    for a in 0..k {
        for b in 0..k {
            let s: Ratio<i128> = (0..k)
                .map(|m| Ratio::new(t.table[a][m] as i128 * t.table[b][m] as i128, t.z_mu[m] as i128))
                .sum();
            let expect = Ratio::from_integer(i128::from(a == b));
            if s != expect {
                return false;
            }
        }
    }
    for mu in 0..k {
        for nu in 0..k {
            let s: i128 = (0..k)
                .map(|a| t.table[a][mu] as i128 * t.table[a][nu] as i128)
                .sum();
            let expect = if mu == nu { t.z_mu[mu] as i128 } else { 0 };
            if s != expect {
                return false;
            }
        }
    }
    true
}

/// Polynomial with exact integer coefficients keyed by exponent vector.
pub type IntPoly = BTreeMap<Vec<u32>, i128>;

fn poly_mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut out = IntPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

/// `p_mu(x_1..x_n) = prod_i p_{mu_i}` with exact coefficients.
pub fn power_sum_poly(mu: &Partition, nvars: usize) -> IntPoly {
    let mut acc = IntPoly::from([(vec![0; nvars], 1)]);
    for &part in mu.parts() {
        let p: IntPoly = (0..nvars)
            .map(|i| {
                let mut e = vec![0; nvars];
                e[i] = part;
                (e, 1)
            })
            .collect();
        acc = poly_mul(&acc, &p);
    }
    acc
}

/// `s_shape = sum_mu chi_shape(C_mu) / z_mu * p_mu`, exactly.
pub fn schur_exact(shape: &Partition, nvars: usize) -> Result<IntPoly> {
    let beads = beta_set(shape);
    let mut memo = HashMap::new();
    let mut acc: BTreeMap<Vec<u32>, Ratio<i128>> = BTreeMap::new();
    for mu in partitions(shape.weight()) {
        let chi = mn_recurse(&beads, mu.parts(), &mut memo);
        if chi == 0 {
            continue;
        }
        let w = Ratio::new(chi as i128, z_mu(&mu) as i128);
        for (e, c) in power_sum_poly(&mu, nvars) {
            *acc.entry(e).or_insert_with(|| Ratio::from_integer(0)) += w * c;
        }
    }
    let mut out = IntPoly::new();
    for (e, v) in acc {
        if !v.is_integer() {
            return Err(Error::Invalid(format!("non-integral Schur coefficient {v}")));
        }
        if v != Ratio::from_integer(0) {
            out.insert(e, v.to_integer());
        }
    }
    Ok(out)
}

/// `s_shape` as a sum over semistandard tableaux with entries `1..=nvars`.
pub fn schur_tableaux(shape: &Partition, nvars: usize) -> IntPoly {
    let cells: Vec<(usize, usize)> = shape
        .parts()
        .iter()
        .enumerate()
        .flat_map(|(r, &len)| (0..len as usize).map(move |c| (r, c)))
        .collect();
    let mut out = IntPoly::new();
    if nvars == 0 {
        if shape.is_empty() {
            out.insert(Vec::new(), 1);
        }
        return out;
    }
    let mut grid: Vec<Vec<usize>> = shape.parts().iter().map(|&l| vec![0; l as usize]).collect();
    fill(&cells, 0, &mut grid, nvars, &mut out);
    out
}

fn fill(cells: &[(usize, usize)], at: usize, grid: &mut Vec<Vec<usize>>, nvars: usize, out: &mut IntPoly) {
    if at == cells.len() {
        let mut e = vec![0u32; nvars];
        for row in grid.iter() {
            for &v in row {
                e[v - 1] += 1;
            }
        }
        *out.entry(e).or_insert(0) += 1;
        return;
    }
    let (r, c) = cells[at];
    // weakly increasing along rows, strictly down columns
    let lo_row = if c > 0 { grid[r][c - 1] } else { 1 };
    let lo_col = if r > 0 { grid[r - 1][c] + 1 } else { 1 };
    for v in lo_row.max(lo_col)..=nvars {
        grid[r][c] = v;
        fill(cells, at + 1, grid, nvars, out);
    }
    grid[r][c] = 0;
}

/// Converts an exact polynomial into a series in the given variables.
pub fn poly_to_series(poly: &IntPoly, variables: &[&str], order: u32) -> Result<TruncatedSeries> {
    let mut s = TruncatedSeries::zero(variables, order)?;
    for (e, &c) in poly {
        s.add_term(e, real(c as f64))?;
    }
    Ok(s)
}

/// `p_n(x_1..x_k)` in the shape of `template`.
pub fn power_sum(n: u32, template: &TruncatedSeries) -> Result<TruncatedSeries> {
    let mut s = template.zero_like();
    for i in 0..template.nvars() {
        let mut e = vec![0; template.nvars()];
        e[i] = n;
        s.add_term(&e, real(1.0))?;
    }
    Ok(s)
}

/// `s_shape(X)` through the character expansion, in floating point.
pub fn schur_from_power_sums(shape: &Partition, variables: &[&str], order: u32) -> Result<TruncatedSeries> {
    schur_with_adams(shape, 1, variables, order)
}

/// `s_shape(X^d)`: every power sum `p_n` replaced by `p_{nd}`.
pub fn schur_with_adams(shape: &Partition, d: u32, variables: &[&str], order: u32) -> Result<TruncatedSeries> {
    if d == 0 {
        return Err(Error::Invalid("Adams degree must be positive".into()));
    }
    let template = TruncatedSeries::zero(variables, order)?;
    let beads = beta_set(shape);
    let mut memo = HashMap::new();
    let mut acc = template.zero_like();
    for mu in partitions(shape.weight()) {
        let chi = mn_recurse(&beads, mu.parts(), &mut memo);
        if chi == 0 {
            continue;
        }
        let mut p = template.one_like();
        for &part in mu.parts() {
            p = p.try_mul(&power_sum(part * d, &template)?)?;
        }
        acc = acc.try_add(&p.scale_real(chi as f64 / z_mu(&mu) as f64))?;
    }
    Ok(acc)
}

/// The Adams operation applied to `s_shape` by substituting `x -> x^d`.
pub fn adams(shape: &Partition, d: u32, variables: &[&str], order: u32) -> Result<TruncatedSeries> {
    schur_from_power_sums(shape, variables, order)?.compose_power(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn partition_listing() {
        let five: Vec<Vec<u32>> = partitions(5).into_iter().map(Vec::from).collect();
        assert_eq!(
            five,
            vec![
                vec![5],
                vec![4, 1],
                vec![3, 2],
                vec![3, 1, 1],
                vec![2, 2, 1],
                vec![2, 1, 1, 1],
                vec![1, 1, 1, 1, 1]
            ]
        );
        assert_eq!(partitions(8).len(), 22);
        assert!(Partition::new(vec![1, 2]).is_err());
    }

    #[test]
    fn centralizer_orders() {
        assert_eq!(z_mu(&p(&[1, 1, 1])), 6);
        assert_eq!(z_mu(&p(&[2, 1])), 2);
        let total: u128 = partitions(5).iter().map(|mu| 120 / z_mu(mu)).sum();
        assert_eq!(total, 120);
    }

    #[test]
    fn character_values() {
        assert_eq!(character(&p(&[1, 1]), &p(&[2])).unwrap(), -1);
        assert_eq!(character(&p(&[4]), &p(&[2, 1, 1])).unwrap(), 1);
        assert_eq!(character(&p(&[2, 1]), &p(&[1, 1, 1])).unwrap(), 2);
        assert_eq!(character(&p(&[2, 1]), &p(&[3])).unwrap(), -1);
        assert_eq!(character(&p(&[2, 2]), &p(&[2, 2])).unwrap(), 2);
        assert!(matches!(character(&p(&[2]), &p(&[1])), Err(Error::WeightMismatch(2, 1))));
    }

    #[test]
    fn small_orthogonality() {
        assert!(orthogonality_check(1));
        assert!(orthogonality_check(4));
        assert!(orthogonality_check(6));
    }

    #[test]
    fn schur_examples() {
        let s11 = schur_exact(&p(&[1, 1]), 2).unwrap();
        assert_eq!(s11, IntPoly::from([(vec![1, 1], 1)]));
        let s2 = schur_exact(&p(&[2]), 2).unwrap();
        assert_eq!(s2, IntPoly::from([(vec![2, 0], 1), (vec![1, 1], 1), (vec![0, 2], 1)]));
        assert_eq!(s2, schur_tableaux(&p(&[2]), 2));
    }

    #[test]
    fn transposes() {
        assert_eq!(p(&[2, 1]).transpose(), p(&[2, 1]));
        assert_eq!(p(&[3]).transpose(), p(&[1, 1, 1]));
        assert_eq!(p(&[4, 2, 1]).transpose().transpose(), p(&[4, 2, 1]));
    }

    #[test]
    fn adams_on_single_box() {
        let a = adams(&p(&[1]), 2, &["x1", "x2"], 4).unwrap();
        let tmpl = TruncatedSeries::zero(&["x1", "x2"], 4).unwrap();
        let p2 = power_sum(2, &tmpl).unwrap();
        assert!(a.max_abs_diff(&p2).unwrap() < 1e-15);
    }
}
