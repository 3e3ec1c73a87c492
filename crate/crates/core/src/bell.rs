//! Complete exponential Bell polynomials and the coefficient recurrence for
//! infinite products `prod_k (1 - q^k)^{-a_k}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multipartite::{beta_series, Convention};
use crate::scalar::{real, Scalar};
use crate::series::{Coefficient, TruncatedSeries};
use crate::symmfunc::partitions;

/// `Y_0..=Y_n` from `g_1..g_n` via `Y_{k+1} = sum_j C(k,j) Y_{k-j} g_{j+1}`.
///
/// Internally works with `g_j / j!` and `Y_k / k!` so the binomials never
/// appear explicitly.
pub fn bell_recurrence<T: Coefficient>(g: &[T], n: usize) -> Result<Vec<T>> {
    if g.is_empty() || g.len() < n {
        return Err(Error::InsufficientInput {
            needed: n.max(1),
            got: g.len(),
        });
    }
    let mut gt: Vec<T> = Vec::with_capacity(n);
    let mut fact = 1.0;
    for (j, gj) in g.iter().take(n).enumerate() {
        fact *= (j + 1) as f64;
        gt.push(gj.scale_by(1.0 / fact));
    }
    let mut yt = vec![g[0].one_like()];
    for k in 0..n {
        let mut acc = g[0].zero_like();
        for j in 0..=k {
            acc = acc + (gt[j].clone() * yt[k - j].clone()).scale_by((j + 1) as f64);
        }
        yt.push(acc.scale_by(1.0 / (k + 1) as f64));
    }
    let mut fact = 1.0;
    Ok(yt
        .into_iter()
        .enumerate()
        .map(|(k, y)| {
            if k > 0 {
                fact *= k as f64;
            }
            y.scale_by(fact)
        })
        .collect())
}

/// Number of set partitions of `{1..n}` with `k_j` blocks of size `j`:
/// `n! / prod_j (k_j! (j!)^{k_j})`.
fn set_partition_count(n: usize, kvec: &[usize]) -> Result<u128> {
    let overflow = || Error::Invalid("set partition count overflows".into());
    let mut remaining = n as u128;
    let mut total: u128 = 1;
    for (j, &k) in kvec.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let size = (j + 1) as u128;
        let used = size * k as u128;
        // pick the elements for all blocks of this size, then split them,
        // always completing the block of the smallest unassigned element
        total = total.checked_mul(binom_u128(remaining, used)?).ok_or_else(overflow)?;
        for i in 0..k as u128 {
            let left = used - i * size;
            total = total
                .checked_mul(binom_u128(left - 1, size - 1)?)
                .ok_or_else(overflow)?;
        }
        remaining -= used;
    }
    Ok(total)
}

fn binom_u128(n: u128, k: u128) -> Result<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul(n - i)
            .ok_or_else(|| Error::Invalid("binomial overflows".into()))?
            / (i + 1);
    }
    Ok(acc)
}

/// `Y_n` as the explicit sum over partitions of `n` with exact integer weights.
pub fn faa_di_bruno<T: Coefficient>(g: &[T], n: usize) -> Result<T> {
    if n == 0 || g.len() < n {
        return Err(Error::InsufficientInput {
            needed: n.max(1),
            got: g.len(),
        });
    }
    let mut total = g[0].zero_like();
    for lambda in partitions(n as u32) {
        let mut kvec = vec![0usize; n];
        for &part in lambda.parts() {
            kvec[part as usize - 1] += 1;
        }
        let weight = set_partition_count(n, &kvec)?;
        let mut term = g[0].one_like();
        for &part in lambda.parts() {
            term = term * g[part as usize - 1].clone();
        }
        total = total + term.scale_by(weight as f64);
    }
    Ok(total)
}

/// Whether the zero vector's factor is part of the product whose `z`
/// coefficients are being extracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroVector {
    /// Uses `beta(n)` itself: the coefficients of `(1 - z)^{-1}` times the
    /// unrestricted product (resp. `(1 + z)` times the distinct one).
    Included,
    /// Uses `beta(n) - 1`: the coefficients of the products over nonzero `k`.
    Excluded,
}

fn beta_inputs(
    j: usize,
    m: usize,
    order: u32,
    convention: Convention,
    zero: ZeroVector,
    sign: f64,
) -> Result<Vec<TruncatedSeries>> {
    let mut g = Vec::with_capacity(j);
    let mut fact = 1.0;
    for i in 1..=j {
        if i > 1 {
            fact *= (i - 1) as f64;
        }
        let mut b = beta_series(i as u32, m, order, convention)?;
        if zero == ZeroVector::Excluded {
            b = &b - &b.one_like();
        }
        g.push(b.scale_real(sign * fact));
    }
    Ok(g)
}

/// The coefficient of `z^j` in the unrestricted specialized generating
/// function, as a series in `q`: `Y_j(0! beta(1), ..., (j-1)! beta(j)) / j!`.
pub fn p_coefficient(
    j: usize,
    m: usize,
    order: u32,
    convention: Convention,
    zero: ZeroVector,
) -> Result<TruncatedSeries> {
    if j == 0 {
        return Err(Error::Invalid("coefficient index starts at 1".into()));
    }
    let g = beta_inputs(j, m, order, convention, zero, 1.0)?;
    let y = bell_recurrence(&g, j)?;
    Ok(y[j].scale_real(1.0 / factorial(j)))
}

/// The coefficient of `z^j` in the distinct specialized generating function:
/// `(-1)^j Y_j(-0! beta(1), ..., -(j-1)! beta(j)) / j!`.
pub fn q_coefficient(
    j: usize,
    m: usize,
    order: u32,
    convention: Convention,
    zero: ZeroVector,
) -> Result<TruncatedSeries> {
    if j == 0 {
        return Err(Error::Invalid("coefficient index starts at 1".into()));
    }
    let g = beta_inputs(j, m, order, convention, zero, -1.0)?;
    let y = bell_recurrence(&g, j)?;
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    Ok(y[j].scale_real(sign / factorial(j)))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Coefficients `B_0..=B_order` of `prod_{k>=1} (1 - q^k)^{-a_k}` from
/// `k B_k = sum_{j=1}^{k} D_j B_{k-j}`, `D_j = sum_{d | j} d a_d`.
///
/// `a[0]` is `a_1`; missing entries count as zero. Complex exponents are
/// accepted.
pub fn product_expansion(a: &[Scalar], order: usize) -> Vec<Scalar> {
    let d = divisor_sums(order, |k| a.get(k - 1).copied().unwrap_or(real(0.0)) * k as f64);
    let mut b = vec![real(0.0); order + 1];
    b[0] = real(1.0);
    for k in 1..=order {
        let s: Scalar = (1..=k).map(|j| d[j] * b[k - j]).sum();
        b[k] = s / k as f64;
    }
    b
}

/// Exact integer version of [`product_expansion`].
pub fn product_expansion_exact(a: &[i64], order: usize) -> Result<Vec<i128>> {
    let d = divisor_sums(order, |k| a.get(k - 1).copied().unwrap_or(0) as i128 * k as i128);
    let mut b = vec![0i128; order + 1];
    b[0] = 1;
    for k in 1..=order {
        let mut s: i128 = 0;
        for j in 1..=k {
            s = d[j]
                .checked_mul(b[k - j])
                .and_then(|t| s.checked_add(t))
                .ok_or_else(|| Error::Invalid("product coefficient overflows".into()))?;
        }
        if s % k as i128 != 0 {
            return Err(Error::Invalid(format!("coefficient {k} is not integral")));
        }
        b[k] = s / k as i128;
    }
    Ok(b)
}

/// `D_j = sum_{d | j} weighted(d)` for `j = 0..=order`.
fn divisor_sums<T>(order: usize, weighted: impl Fn(usize) -> T) -> Vec<T>
where
    T: Copy + Default + std::ops::AddAssign,
{
    let mut d = vec![T::default(); order + 1];
    for div in 1..=order {
        let weighted = weighted(div);
        for j in (div..=order).step_by(div) {
            d[j] += weighted;
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn first_bell_polynomials() {
        let g = vec![c(0.3, 0.1), c(-1.0, 2.0)];
        let y = bell_recurrence(&g, 2).unwrap();
        assert_eq!(y[0], real(1.0));
        assert!((y[1] - g[0]).norm() < 1e-15);
        assert!((y[2] - (g[0] * g[0] + g[1])).norm() < 1e-14);
    }

    #[test]
    fn bell_numbers() {
        let ones = vec![real(1.0); 4];
        let y = bell_recurrence(&ones, 4).unwrap();
        assert!((y[3] - real(5.0)).norm() < 1e-12);
        assert!((y[4] - real(15.0)).norm() < 1e-12);
        assert!((faa_di_bruno(&ones, 3).unwrap() - real(5.0)).norm() < 1e-12);
        assert!((faa_di_bruno(&ones, 4).unwrap() - real(15.0)).norm() < 1e-12);
    }

    #[test]
    fn explicit_sum_small_cases() {
        let g = vec![c(2.0, 0.0), c(0.0, 1.0), c(-1.0, 0.5)];
        let expect = g[0] * g[0] * g[0] + g[0] * g[1] * 3.0 + g[2];
        assert!((faa_di_bruno(&g, 3).unwrap() - expect).norm() < 1e-13);
        assert_eq!(faa_di_bruno(&g, 1).unwrap(), g[0]);
        assert_eq!(faa_di_bruno(&[real(0.0), real(2.0)], 2).unwrap(), real(2.0));
        assert!(matches!(bell_recurrence(&g, 4), Err(Error::InsufficientInput { needed: 4, got: 3 })));
    }

    #[test]
    fn set_partition_weights() {
        // n = 4: types (1^4), (2,1^2), (2^2), (3,1), (4)
        assert_eq!(set_partition_count(4, &[4, 0, 0, 0]).unwrap(), 1);
        assert_eq!(set_partition_count(4, &[2, 1, 0, 0]).unwrap(), 6);
        assert_eq!(set_partition_count(4, &[0, 2, 0, 0]).unwrap(), 3);
        assert_eq!(set_partition_count(4, &[1, 0, 1, 0]).unwrap(), 4);
        assert_eq!(set_partition_count(4, &[0, 0, 0, 1]).unwrap(), 1);
    }

    #[test]
    fn product_expansion_examples() {
        let ones = vec![real(1.0); 5];
        let b = product_expansion(&ones, 5);
        assert!((b[5] - real(7.0)).norm() < 1e-12);
        let geo = product_expansion(&[real(1.0)], 6);
        assert!(geo.iter().all(|v| (v - real(1.0)).norm() < 1e-12));
        let mac = product_expansion_exact(&[1, 2, 3, 4], 4).unwrap();
        assert_eq!(mac, vec![1, 1, 3, 6, 13]);
    }

    #[test]
    fn first_coefficient_is_beta() {
        let p1 = p_coefficient(1, 2, 6, Convention::Diagonal, ZeroVector::Included).unwrap();
        let b1 = beta_series(1, 2, 6, Convention::Diagonal).unwrap();
        assert!(p1.max_abs_diff(&b1).unwrap() < 1e-14);
    }
}
