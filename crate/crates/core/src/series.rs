//! Truncated multivariate power series over complex scalars.
//!
//! Truncation is by total degree: a series of order `N` keeps every monomial
//! `x^e` with `|e| <= N` and nothing else. Coefficients live in a dense
//! vector indexed by a graded monomial basis that is shared (via `Arc`)
//! between series of the same shape. Products only visit nonzero entries, so
//! sparse inputs stay cheap even though storage is dense.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{ensure_finite, Scalar};

const MAX_VARS: usize = 16;
const MAX_ORDER: u32 = 255;

/// Graded monomial basis for `nvars` variables up to total degree `order`.
#[derive(Debug)]
pub struct Basis {
    variables: Vec<String>,
    order: u32,
    exponents: Vec<Vec<u32>>,
    degrees: Vec<u32>,
    keys: Vec<u128>,
    index: HashMap<u128, usize>,
}

fn pack(exps: &[u32]) -> u128 {
    exps.iter()
        .enumerate()
        .fold(0u128, |acc, (i, &e)| acc | ((e as u128) << (8 * i)))
}

fn compositions(total: u32, parts: usize, out: &mut Vec<Vec<u32>>) {
    fn rec(rem: u32, slot: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slot + 1 == cur.len() {
            cur[slot] = rem;
            out.push(cur.clone());
            return;
        }
        for v in (0..=rem).rev() {
            cur[slot] = v;
            rec(rem - v, slot + 1, cur, out);
        }
    }
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return;
    }
    let mut cur = vec![0; parts];
    rec(total, 0, &mut cur, out);
}

impl Basis {
    pub fn new(variables: Vec<String>, order: u32) -> Result<Self> {
        if variables.len() > MAX_VARS {
            return Err(Error::Shape(format!(
                "{} variables exceeds the supported {MAX_VARS}",
                variables.len()
            )));
        }
        if order > MAX_ORDER {
            return Err(Error::Shape(format!("order {order} exceeds {MAX_ORDER}")));
        }
        let mut exponents = Vec::new();
        for d in 0..=order {
            compositions(d, variables.len(), &mut exponents);
        }
        let degrees = exponents.iter().map(|e| e.iter().sum()).collect();
        let keys: Vec<u128> = exponents.iter().map(|e| pack(e)).collect();
        let index = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        Ok(Basis {
            variables,
            order,
            exponents,
            degrees,
            keys,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn exponent(&self, idx: usize) -> &[u32] {
        &self.exponents[idx]
    }

    pub fn degree(&self, idx: usize) -> u32 {
        self.degrees[idx]
    }

    pub fn position(&self, exps: &[u32]) -> Option<usize> {
        if exps.len() != self.variables.len() || exps.iter().sum::<u32>() > self.order {
            return None;
        }
        self.index.get(&pack(exps)).copied()
    }

    /// Index of the product monomial `e_i * e_j`, if it survives truncation.
    #[inline]
    fn product_position(&self, i: usize, j: usize) -> Option<usize> {
        if self.degrees[i] + self.degrees[j] > self.order {
            return None;
        }
        self.index.get(&(self.keys[i] + self.keys[j])).copied()
    }

    fn same_shape(&self, other: &Basis) -> bool {
        self.order == other.order && self.variables == other.variables
    }
}

/// A truncated power series in a fixed list of variables.
#[derive(Clone)]
pub struct TruncatedSeries {
    basis: Arc<Basis>,
    coeffs: Vec<Scalar>,
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedSeries")
            .field("variables", &self.basis.variables)
            .field("order", &self.basis.order)
            .field("terms", &self.terms().collect::<Vec<_>>())
            .finish()
    }
}

fn var_names(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl TruncatedSeries {
    pub fn zero(variables: &[&str], order: u32) -> Result<Self> {
        Self::zero_in(var_names(variables), order)
    }

    pub fn zero_in(variables: Vec<String>, order: u32) -> Result<Self> {
        let basis = Arc::new(Basis::new(variables, order)?);
        Ok(Self::zero_with(basis))
    }

    pub fn zero_with(basis: Arc<Basis>) -> Self {
        let coeffs = vec![Scalar::zero(); basis.len()];
        TruncatedSeries { basis, coeffs }
    }

    pub fn one(variables: &[&str], order: u32) -> Result<Self> {
        Ok(Self::zero(variables, order)?.one_like())
    }

    /// Builds a series from `(exponents, coefficient)` pairs; terms above the
    /// order are dropped, repeated monomials are summed.
    pub fn from_terms<I>(variables: &[&str], order: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Scalar)>,
    {
        let mut s = Self::zero(variables, order)?;
        for (e, v) in terms {
            s.add_term(&e, v)?;
        }
        Ok(s)
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn variables(&self) -> &[String] {
        &self.basis.variables
    }

    pub fn order(&self) -> u32 {
        self.basis.order
    }

    pub fn nvars(&self) -> usize {
        self.basis.variables.len()
    }

    pub fn zero_like(&self) -> Self {
        Self::zero_with(self.basis.clone())
    }

    pub fn one_like(&self) -> Self {
        self.constant_like(Scalar::new(1.0, 0.0))
    }

    pub fn constant_like(&self, value: Scalar) -> Self {
        let mut s = self.zero_like();
        s.coeffs[0] = value;
        s
    }

    /// `coefficient * x^exps` in the same shape as `self`.
    pub fn monomial_like(&self, exps: &[u32], coefficient: Scalar) -> Result<Self> {
        let mut s = self.zero_like();
        s.add_term(exps, coefficient)?;
        Ok(s)
    }

    /// The `i`-th variable as a series.
    pub fn variable_like(&self, i: usize) -> Self {
        let mut e = vec![0; self.nvars()];
        e[i] = 1;
        let mut s = self.zero_like();
        if let Some(p) = self.basis.position(&e) {
            s.coeffs[p] = Scalar::new(1.0, 0.0);
        }
        s
    }

    pub fn coeff(&self, exps: &[u32]) -> Scalar {
        self.basis
            .position(exps)
            .map_or(Scalar::zero(), |p| self.coeffs[p])
    }

    pub fn constant(&self) -> Scalar {
        self.coeffs[0]
    }

    /// Adds `value * x^exps`; monomials above the order are ignored.
    pub fn add_term(&mut self, exps: &[u32], value: Scalar) -> Result<()> {
        ensure_finite(value)?;
        if exps.len() != self.nvars() {
            return Err(Error::Shape(format!(
                "exponent vector of length {} for {} variables",
                exps.len(),
                self.nvars()
            )));
        }
        if let Some(p) = self.basis.position(exps) {
            self.coeffs[p] += value;
        }
        Ok(())
    }

    pub fn set_coeff(&mut self, exps: &[u32], value: Scalar) -> Result<()> {
        ensure_finite(value)?;
        match self.basis.position(exps) {
            Some(p) => {
                self.coeffs[p] = value;
                Ok(())
            }
            None => Err(Error::Shape(format!(
                "monomial {exps:?} is outside order {}",
                self.order()
            ))),
        }
    }

    /// Nonzero terms in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Scalar)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(i, v)| (self.basis.exponent(i), *v))
    }

    pub fn coefficients(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|v| crate::scalar::is_finite(*v))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis.same_shape(&other.basis) {
            return Ok(());
        }
        if self.basis.variables != other.basis.variables {
            return Err(Error::VariableMismatch {
                left: self.basis.variables.clone(),
                right: other.basis.variables.clone(),
            });
        }
        Err(Error::OrderMismatch {
            left: self.order(),
            right: other.order(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(TruncatedSeries {
            basis: self.basis.clone(),
            coeffs,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(TruncatedSeries {
            basis: self.basis.clone(),
            coeffs,
        })
    }

    /// Cauchy product, truncated at the common order.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let basis = &self.basis;
        let nz_b: Vec<(usize, Scalar)> = nonzero(&other.coeffs);
        let mut out = vec![Scalar::zero(); basis.len()];
        for (i, a) in nonzero(&self.coeffs) {
            let room = basis.order - basis.degrees[i];
            for &(j, b) in &nz_b {
                // nz_b is in graded order, so the first overflow ends the row
                if basis.degrees[j] > room {
                    break;
                }
                if let Some(k) = basis.product_position(i, j) {
                    out[k] += a * b;
                }
            }
        }
        Ok(TruncatedSeries {
            basis: basis.clone(),
            coeffs: out,
        })
    }

    pub fn scale(&self, factor: Scalar) -> Self {
        TruncatedSeries {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Scalar::new(factor, 0.0))
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn inv(&self) -> Result<Self> {
        let f0 = self.constant();
        if f0.is_zero() {
            return Err(Error::ZeroConstant("inv"));
        }
        let basis = &self.basis;
        let tail: Vec<(usize, Scalar)> = nonzero(&self.coeffs)
            .into_iter()
            .filter(|&(i, _)| i != 0)
            .collect();
        let mut acc = vec![Scalar::zero(); basis.len()];
        let mut g = vec![Scalar::zero(); basis.len()];
        let inv0 = f0.inv();
        for idx in 0..basis.len() {
            let target = if idx == 0 { Scalar::new(1.0, 0.0) } else { Scalar::zero() };
            let value = (target - acc[idx]) * inv0;
            g[idx] = value;
            if value.is_zero() {
                continue;
            }
            for &(j, fj) in &tail {
                if let Some(k) = basis.product_position(idx, j) {
                    acc[k] += fj * value;
                }
            }
        }
        ensure_all_finite(&g)?;
        Ok(TruncatedSeries {
            basis: basis.clone(),
            coeffs: g,
        })
    }

    /// `exp` of a series with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant().is_zero() {
            return Err(Error::NonZeroConstant(format!("{}", self.constant())));
        }
        let basis = &self.basis;
        // weighted by degree: E a where E = sum x_i d/dx_i
        let weighted: Vec<(usize, Scalar)> = nonzero(&self.coeffs)
            .into_iter()
            .map(|(i, v)| (i, v * basis.degrees[i] as f64))
            .collect();
        let mut acc = vec![Scalar::zero(); basis.len()];
        let mut h = vec![Scalar::zero(); basis.len()];
        for idx in 0..basis.len() {
            let value = if idx == 0 {
                Scalar::new(1.0, 0.0)
            } else {
                acc[idx] / basis.degrees[idx] as f64
            };
            h[idx] = value;
            if value.is_zero() {
                continue;
            }
            for &(j, aj) in &weighted {
                if let Some(k) = basis.product_position(idx, j) {
                    acc[k] += aj * value;
                }
            }
        }
        ensure_all_finite(&h)?;
        Ok(TruncatedSeries {
            basis: basis.clone(),
            coeffs: h,
        })
    }

    /// Logarithm of `f / f(0)` together with the principal `log f(0)`.
    ///
    /// The returned series has zero constant term; `log f` is the series plus
    /// the returned scalar.
    pub fn log(&self) -> Result<(Self, Scalar)> {
        let f0 = self.constant();
        if f0.is_zero() {
            return Err(Error::ZeroConstant("log"));
        }
        let basis = &self.basis;
        let fhat: Vec<Scalar> = self.coeffs.iter().map(|v| v / f0).collect();
        let tail: Vec<(usize, Scalar)> = nonzero(&fhat)
            .into_iter()
            .filter(|&(i, _)| i != 0)
            .collect();
        // fhat * E g = E fhat, solved degree by degree
        let mut acc = vec![Scalar::zero(); basis.len()];
        let mut g = vec![Scalar::zero(); basis.len()];
        for idx in 1..basis.len() {
            let d = basis.degrees[idx] as f64;
            let value = (fhat[idx] * d - acc[idx]) / d;
            g[idx] = value;
            if value.is_zero() {
                continue;
            }
            for &(j, fj) in &tail {
                if let Some(k) = basis.product_position(idx, j) {
                    acc[k] += fj * value * d;
                }
            }
        }
        ensure_all_finite(&g)?;
        Ok((
            TruncatedSeries {
                basis: basis.clone(),
                coeffs: g,
            },
            f0.ln(),
        ))
    }

    /// `log f` including the principal logarithm of the constant term.
    pub fn log_full(&self) -> Result<Self> {
        let (mut s, c0) = self.log()?;
        s.coeffs[0] = c0;
        Ok(s)
    }

    /// Multiplies in place by `(1 - w x^e)^{-1}`.
    pub fn mul_geometric(&mut self, exps: &[u32], w: Scalar) -> Result<()> {
        self.shift_accumulate(exps, w, true)
    }

    /// Multiplies in place by `1 + w x^e`.
    pub fn mul_binomial(&mut self, exps: &[u32], w: Scalar) -> Result<()> {
        self.shift_accumulate(exps, w, false)
    }

    fn shift_accumulate(&mut self, exps: &[u32], w: Scalar, ascending: bool) -> Result<()> {
        ensure_finite(w)?;
        if exps.len() != self.nvars() {
            return Err(Error::Shape("monomial has wrong number of variables".into()));
        }
        let shift_deg: u32 = exps.iter().sum();
        if shift_deg == 0 {
            return Err(Error::Invalid("monomial factor must have positive degree".into()));
        }
        if shift_deg > self.order() || w.is_zero() {
            return Ok(());
        }
        let basis = self.basis.clone();
        let shift = pack(exps);
        let step = |coeffs: &mut Vec<Scalar>, idx: usize| {
            let v = coeffs[idx];
            if v.is_zero() || basis.degrees[idx] + shift_deg > basis.order {
                return;
            }
            if let Some(&p) = basis.index.get(&(basis.keys[idx] + shift)) {
                coeffs[p] += w * v;
            }
        };
        if ascending {
            for idx in 0..basis.len() {
                step(&mut self.coeffs, idx);
            }
        } else {
            for idx in (0..basis.len()).rev() {
                step(&mut self.coeffs, idx);
            }
        }
        Ok(())
    }

    /// Integer power by repeated squaring; negative powers go through `inv`.
    pub fn powi(&self, exponent: i64) -> Result<Self> {
        let base = if exponent < 0 { self.inv()? } else { self.clone() };
        let mut e = exponent.unsigned_abs();
        let mut result = self.one_like();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                result = result.try_mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.try_mul(&sq)?;
            }
        }
        Ok(result)
    }

    /// Substitutes every variable `x -> x^d` (the Adams operation).
    pub fn compose_power(&self, d: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::Invalid("Adams degree must be positive".into()));
        }
        let mut out = self.zero_like();
        for (idx, &v) in self.coeffs.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let scaled: Vec<u32> = self.basis.exponent(idx).iter().map(|e| e * d).collect();
            if let Some(p) = self.basis.position(&scaled) {
                out.coeffs[p] += v;
            }
        }
        Ok(out)
    }

    /// Same series viewed at a lower order.
    pub fn restrict(&self, order: u32) -> Result<Self> {
        if order > self.order() {
            return Err(Error::Shape(format!(
                "cannot restrict order {} up to {order}",
                self.order()
            )));
        }
        let mut out = TruncatedSeries::zero_in(self.basis.variables.clone(), order)?;
        for (idx, &v) in self.coeffs.iter().enumerate() {
            if self.basis.degrees[idx] <= order {
                if let Some(p) = out.basis.position(self.basis.exponent(idx)) {
                    out.coeffs[p] = v;
                }
            }
        }
        Ok(out)
    }

    /// Re-expresses the series in a larger variable list; variable `i` of
    /// `self` becomes variable `positions[i]` of the target basis.
    pub fn embed(&self, target: &Arc<Basis>, positions: &[usize]) -> Result<Self> {
        if positions.len() != self.nvars() {
            return Err(Error::Shape("embedding needs one position per variable".into()));
        }
        let mut out = TruncatedSeries::zero_with(target.clone());
        let mut e = vec![0u32; target.variables.len()];
        for (exps, v) in self.terms() {
            e.iter_mut().for_each(|x| *x = 0);
            for (i, &p) in positions.iter().enumerate() {
                e[p] = exps[i];
            }
            if let Some(p) = target.position(&e) {
                out.coeffs[p] += v;
            }
        }
        Ok(out)
    }

    /// Evaluates the truncated polynomial at a point.
    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.nvars() {
            return Err(Error::Shape("evaluation point has wrong dimension".into()));
        }
        Ok(self
            .terms()
            .map(|(e, v)| {
                e.iter()
                    .zip(point)
                    .fold(v, |acc, (&k, x)| acc * x.powu(k))
            })
            .sum())
    }

    /// Coefficient extraction in variable `var`: returns the series in the
    /// remaining variables multiplying `var^power`.
    pub fn coefficient_of(&self, var: usize, power: u32) -> Result<Self> {
        if var >= self.nvars() || power > self.order() {
            return Err(Error::Shape(format!("no variable {var} with power {power}")));
        }
        let rest: Vec<String> = self
            .variables()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != var)
            .map(|(_, v)| v.clone())
            .collect();
        let mut out = TruncatedSeries::zero_in(rest, self.order() - power)?;
        for (exps, v) in self.terms() {
            if exps[var] != power {
                continue;
            }
            let e: Vec<u32> = exps
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != var)
                .map(|(_, &x)| x)
                .collect();
            if let Some(p) = out.basis.position(&e) {
                out.coeffs[p] += v;
            }
        }
        Ok(out)
    }

    /// Largest coefficientwise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest coefficientwise difference, relative to `max(1, |other|)`.
    pub fn max_rel_diff(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm() / b.norm().max(1.0))
            .fold(0.0, f64::max))
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            variables: self.basis.variables.clone(),
            order: self.order(),
            terms: self
                .terms()
                .map(|(e, v)| (e.to_vec(), v.re, v.im))
                .collect(),
        }
    }

    pub fn from_json(json: &SeriesJson) -> Result<Self> {
        let mut s = TruncatedSeries::zero_in(json.variables.clone(), json.order)?;
        for (e, re, im) in &json.terms {
            if e.iter().sum::<u32>() > json.order {
                return Err(Error::Shape(format!(
                    "term {e:?} exceeds order {}",
                    json.order
                )));
            }
            s.add_term(e, Scalar::new(*re, *im))?;
        }
        Ok(s)
    }
}

/// JSON form: variable list, order and `[exponents, re, im]` triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub variables: Vec<String>,
    pub order: u32,
    pub terms: Vec<(Vec<u32>, f64, f64)>,
}

impl Serialize for TruncatedSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = SeriesJson::deserialize(deserializer)?;
        TruncatedSeries::from_json(&json).map_err(serde::de::Error::custom)
    }
}

fn nonzero(coeffs: &[Scalar]) -> Vec<(usize, Scalar)> {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (i, *v))
        .collect()
}

fn ensure_all_finite(values: &[Scalar]) -> Result<()> {
    for v in values {
        ensure_finite(*v)?;
    }
    Ok(())
}

pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.try_mul(b)
}

pub fn series_exp(a: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.exp()
}

pub fn series_log(a: &TruncatedSeries) -> Result<(TruncatedSeries, Scalar)> {
    a.log()
}

pub fn series_inv(a: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.inv()
}

pub fn series_compose_power(a: &TruncatedSeries, d: u32) -> Result<TruncatedSeries> {
    a.compose_power(d)
}

// Operator sugar. Shapes must agree; mismatches are programming errors here,
// the fallible `try_*` methods are the checked surface.

impl Add for TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("series shapes must agree")
    }
}

impl Sub for TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("series shapes must agree")
    }
}

impl Mul for TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).expect("series shapes must agree")
    }
}

impl<'a> Add<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        self.try_add(rhs).expect("series shapes must agree")
    }
}

impl<'a> Sub<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        self.try_sub(rhs).expect("series shapes must agree")
    }
}

impl<'a> Mul<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        self.try_mul(rhs).expect("series shapes must agree")
    }
}

impl Neg for TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

/// Coefficient rings accepted by the generic Bell-polynomial routines.
pub trait Coefficient:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn one_like(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn scale_by(&self, factor: f64) -> Self;
}

impl Coefficient for Scalar {
    fn one_like(&self) -> Self {
        Scalar::new(1.0, 0.0)
    }
    fn zero_like(&self) -> Self {
        Scalar::zero()
    }
    fn scale_by(&self, factor: f64) -> Self {
        self * factor
    }
}

impl Coefficient for TruncatedSeries {
    fn one_like(&self) -> Self {
        TruncatedSeries::one_like(self)
    }
    fn zero_like(&self) -> Self {
        TruncatedSeries::zero_like(self)
    }
    fn scale_by(&self, factor: f64) -> Self {
        self.scale_real(factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, real};

    fn q(order: u32) -> TruncatedSeries {
        TruncatedSeries::zero(&["q"], order).unwrap().variable_like(0)
    }

    fn assert_close(a: &TruncatedSeries, b: &TruncatedSeries, tol: f64) {
        let d = a.max_abs_diff(b).unwrap();
        assert!(d <= tol, "difference {d:e}\n{a:?}\n{b:?}");
    }

    #[test]
    fn basis_is_graded() {
        let b = Basis::new(var_names(&["x", "y"]), 2).unwrap();
        assert_eq!(b.len(), 6);
        assert_eq!(b.exponent(0), &[0, 0]);
        assert_eq!(b.exponent(1), &[1, 0]);
        assert_eq!(b.exponent(2), &[0, 1]);
        assert_eq!(b.exponent(3), &[2, 0]);
        assert_eq!(b.position(&[1, 1]), Some(4));
        assert_eq!(b.position(&[2, 1]), None);
    }

    #[test]
    fn difference_of_squares() {
        let one = q(2).one_like();
        let a = &one + &q(2);
        let b = &one - &q(2);
        let expect = TruncatedSeries::from_terms(&["q"], 2, [(vec![0], real(1.0)), (vec![2], real(-1.0))]).unwrap();
        assert_close(&(&a * &b), &expect, 0.0);
    }

    #[test]
    fn geometric_telescope_truncates_to_one() {
        let geo = TruncatedSeries::from_terms(&["q"], 5, (0..=5).map(|k| (vec![k], real(1.0)))).unwrap();
        let one_minus_q = TruncatedSeries::from_terms(&["q"], 5, [(vec![0], real(1.0)), (vec![1], real(-1.0))]).unwrap();
        let prod = series_mul(&geo, &one_minus_q).unwrap();
        assert_close(&prod, &prod.one_like(), 0.0);
    }

    #[test]
    fn binomial_in_two_variables() {
        let base = TruncatedSeries::zero(&["x1", "x2"], 2).unwrap();
        let a = &base.one_like() + &base.variable_like(0);
        let b = &base.one_like() + &base.variable_like(1);
        let p = &a * &b;
        assert_eq!(p.coeff(&[0, 0]), real(1.0));
        assert_eq!(p.coeff(&[1, 0]), real(1.0));
        assert_eq!(p.coeff(&[0, 1]), real(1.0));
        assert_eq!(p.coeff(&[1, 1]), real(1.0));
        assert_eq!(p.coeff(&[2, 0]), real(0.0));
    }

    #[test]
    fn exp_log_inv_examples() {
        let e = q(3).exp().unwrap();
        for (k, v) in [1.0, 1.0, 0.5, 1.0 / 6.0].iter().enumerate() {
            assert!((e.coeff(&[k as u32]) - real(*v)).norm() < 1e-15);
        }
        let one_minus_q = &q(3).one_like() - &q(3);
        let (l, c0) = one_minus_q.log().unwrap();
        assert_eq!(c0, real(0.0));
        for (k, v) in [0.0, -1.0, -0.5, -1.0 / 3.0].iter().enumerate() {
            assert!((l.coeff(&[k as u32]) - real(*v)).norm() < 1e-15);
        }
        let inv = (&q(4).one_like() - &q(4)).inv().unwrap();
        for k in 0..=4 {
            assert!((inv.coeff(&[k]) - real(1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn log_reports_constant_separately() {
        let f = q(4).constant_like(c(0.0, 2.0)) + q(4);
        let (l, c0) = f.log().unwrap();
        assert!((c0 - c(2f64.ln(), std::f64::consts::FRAC_PI_2)).norm() < 1e-15);
        assert_eq!(l.constant(), real(0.0));
        let back = l.exp().unwrap().scale(c0.exp());
        assert_close(&back, &f, 1e-14);
    }

    #[test]
    fn error_paths() {
        let a = q(3);
        let b = TruncatedSeries::zero(&["t"], 3).unwrap();
        assert!(matches!(a.try_mul(&b), Err(Error::VariableMismatch { .. })));
        let c4 = q(4);
        assert!(matches!(a.try_mul(&c4), Err(Error::OrderMismatch { left: 3, right: 4 })));
        assert!(matches!(a.one_like().exp(), Err(Error::NonZeroConstant(_))));
        assert!(matches!(a.log(), Err(Error::ZeroConstant("log"))));
        assert!(matches!(a.inv(), Err(Error::ZeroConstant("inv"))));
        let mut s = a.zero_like();
        assert!(s.add_term(&[1], c(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn adams_substitution() {
        let s = &q(4).one_like() + &q(4);
        let s2 = s.compose_power(2).unwrap();
        assert_eq!(s2.coeff(&[2]), real(1.0));
        assert_eq!(s2.coeff(&[1]), real(0.0));

        let t = TruncatedSeries::from_terms(&["q"], 6, [(vec![1], real(1.0)), (vec![2], real(1.0))]).unwrap();
        let t3 = t.compose_power(3).unwrap();
        assert_eq!(t3.coeff(&[3]), real(1.0));
        assert_eq!(t3.coeff(&[6]), real(1.0));
        assert_eq!(t3.terms().count(), 2);

        let base = TruncatedSeries::zero(&["x1", "x2"], 4).unwrap();
        let p1 = &base.variable_like(0) + &base.variable_like(1);
        let p2 = p1.compose_power(2).unwrap();
        assert_eq!(p2.coeff(&[2, 0]), real(1.0));
        assert_eq!(p2.coeff(&[0, 2]), real(1.0));
        assert_eq!(p2.terms().count(), 2);
    }

    #[test]
    fn json_round_trip() {
        let s = TruncatedSeries::from_terms(&["x", "y"], 3, [(vec![1, 2], c(0.5, -1.0)), (vec![0, 0], real(1.0))]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"variables":["x","y"],"order":3,"terms":[[[0,0],1.0,0.0],[[1,2],0.5,-1.0]]}"#);
        let back: TruncatedSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back.max_abs_diff(&s).unwrap(), 0.0);
    }

    #[test]
    fn coefficient_extraction_and_embedding() {
        let s = TruncatedSeries::from_terms(&["z", "q"], 4, [(vec![1, 2], real(3.0)), (vec![2, 1], real(5.0))]).unwrap();
        let z1 = s.coefficient_of(0, 1).unwrap();
        assert_eq!(z1.variables(), &["q".to_string()]);
        assert_eq!(z1.order(), 3);
        assert_eq!(z1.coeff(&[2]), real(3.0));

        let target = Arc::new(Basis::new(var_names(&["a", "z", "b", "q"]), 4).unwrap());
        let e = s.embed(&target, &[1, 3]).unwrap();
        assert_eq!(e.coeff(&[0, 1, 0, 2]), real(3.0));
    }

    #[test]
    fn in_place_factors() {
        let mut s = q(5).one_like();
        s.mul_geometric(&[1], real(1.0)).unwrap();
        s.mul_binomial(&[1], real(-1.0)).unwrap();
        assert_close(&s, &q(5).one_like(), 1e-15);
        let mut t = q(4).one_like();
        t.mul_binomial(&[2], c(0.0, 2.0)).unwrap();
        assert_eq!(t.coeff(&[2]), c(0.0, 2.0));
        assert_eq!(t.terms().count(), 2);
    }

    #[test]
    fn evaluate_polynomial() {
        let s = TruncatedSeries::from_terms(&["x", "y"], 3, [(vec![1, 1], real(2.0)), (vec![0, 0], real(1.0))]).unwrap();
        assert_eq!(s.evaluate(&[real(2.0), real(3.0)]).unwrap(), real(13.0));
    }
}
