//! Jackson-type infinite products, elliptic gamma functions and the
//! Bernoulli-type kernel of their modular transformation.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multipartite::binomial;
use crate::report::IdentityReport;
use crate::scalar::{c, ensure_finite, real, Scalar, I};
use crate::series::TruncatedSeries;
use crate::spectral::{ruelle, Evaluation, RuelleMethod, SpectralParams};

const MAX_INDEX: u64 = 10_000;

fn check_nome(name: &str, q: Scalar) -> Result<f64> {
    ensure_finite(q)?;
    let r = q.norm();
    if r >= 1.0 {
        return Err(Error::Domain(format!("|{name}| = {r} is not below 1")));
    }
    Ok(r)
}

/// `prod_{n>=0} (1 - z q^n)`.
pub fn jackson_g1(z: Scalar, q: Scalar, target: f64) -> Result<Evaluation> {
    ensure_finite(z)?;
    let r = check_nome("q", q)?;
    let mut value = real(1.0);
    let mut x = z;
    let mut n = 0u64;
    loop {
        value *= real(1.0) - x;
        x *= q;
        n += 1;
        let tail = 2.0 * x.norm() / (1.0 - r);
        if x.norm() <= 0.5 && tail < target {
            return Ok(Evaluation {
                value,
                terms: n,
                tail_bound: tail,
            });
        }
        if n > MAX_INDEX {
            return Err(Error::NonConvergent("G1 product does not settle".into()));
        }
    }
}

/// `G1(z; q)` against `(1 - z) R((1 + Omega(z))(1 - i rho))`.
pub fn g1_spectral_check(z: Scalar, q: Scalar, tol: f64) -> Result<IdentityReport> {
    let target = tol / 100.0;
    let direct = jackson_g1(z, q, target)?;
    let p = SpectralParams::from_nome(q)?;
    let om = match p.omega_bar(z) {
        Ok(v) => v,
        Err(e) => return Ok(IdentityReport::domain_failure("G1-spectral", e.to_string(), tol).param("z", z)),
    };
    let r = ruelle((om + 1.0) * c(1.0, -p.rho), &p, 1.0, RuelleMethod::Auto, target)?;
    Ok(IdentityReport::compare(
        "G1-spectral",
        direct.value,
        (real(1.0) - z) * r.value,
        direct.tail_bound + r.tail_bound,
        tol,
    )
    .param("q", q)
    .param("z", z)
    .truncated("direct_factors", direct.terms)
    .truncated("ruelle_terms", r.terms))
}

/// Smallest `n` with `coef * r^{n+1} / denom <= target`, capped.
fn index_bound(coef: f64, r: f64, denom: f64, target: f64) -> Result<u64> {
    if r == 0.0 || coef == 0.0 {
        return Ok(0);
    }
    let mut n = 0u64;
    let mut pow = r;
    while coef * pow / denom >= target || coef * pow > 0.5 {
        n += 1;
        pow *= r;
        if n > MAX_INDEX {
            return Err(Error::NonConvergent("product index bound exceeds the cap".into()));
        }
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum G2Form {
    /// `prod (1 - z q^{n1} p^{n2})`.
    TwoNome,
    /// `prod (1 - z q^{n1 + n2})`, ignoring `p`.
    Diagonal,
}

/// The double product `G2(z; q, p)`.
pub fn jackson_g2(z: Scalar, q: Scalar, p: Scalar, form: G2Form, target: f64) -> Result<Evaluation> {
    ensure_finite(z)?;
    let p = match form {
        G2Form::TwoNome => p,
        G2Form::Diagonal => q,
    };
    let rq = check_nome("q", q)?;
    let rp = check_nome("p", p)?;
    let denom = (1.0 - rq) * (1.0 - rp);
    let zn = 2.0 * z.norm();
    let n1 = index_bound(zn, rq, denom, target / 2.0)?;
    let n2 = index_bound(zn, rp, denom, target / 2.0)?;
    let mut value = real(1.0);
    let mut qa = real(1.0);
    for _ in 0..=n1 {
        let mut x = z * qa;
        for _ in 0..=n2 {
            value *= real(1.0) - x;
            x *= p;
        }
        qa *= q;
    }
    let tail = zn * (rq.powi(n1 as i32 + 1) + rp.powi(n2 as i32 + 1)) / denom;
    Ok(Evaluation {
        value,
        terms: (n1 + 1) * (n2 + 1),
        tail_bound: tail,
    })
}

/// `G2(W; q, p) / G2(qW; q, p) = G1(W; p)` and the same with `q` and `p`
/// exchanged. With `reciprocal`, `W = p / omega` in the first and `q / omega`
/// in the second equation.
fn shift_pair(label: &str, omega: Scalar, q: Scalar, p: Scalar, tol: f64, reciprocal: bool) -> Result<Vec<IdentityReport>> {
    let target = tol / 100.0;
    let mut out = Vec::new();
    for (name, step, other) in [("q-equation", q, p), ("p-equation", p, q)] {
        let w = if reciprocal { other / omega } else { omega };
        let identity = format!("{label}[{name}]");
        if reciprocal && w.norm() >= 1.0 {
            out.push(
                IdentityReport::domain_failure(&identity, format!("|{w}| is not below 1"), tol)
                    .param("omega", omega)
                    .param("q", q)
                    .param("p", p),
            );
            continue;
        }
        let top = jackson_g2(w, q, p, G2Form::TwoNome, target)?;
        let bottom = jackson_g2(step * w, q, p, G2Form::TwoNome, target)?;
        let g1 = jackson_g1(w, other, target)?;
        out.push(
            IdentityReport::compare(
                &identity,
                top.value / bottom.value,
                g1.value,
                top.tail_bound + bottom.tail_bound + g1.tail_bound,
                tol,
            )
            .param("omega", omega)
            .param("q", q)
            .param("p", p)
            .truncated("g2_factors", top.terms.max(bottom.terms))
            .truncated("g1_factors", g1.terms),
        );
    }
    Ok(out)
}

/// First-order shift equations of `G2` in each nome.
pub fn g21_check(omega: Scalar, q: Scalar, p: Scalar, tol: f64) -> Result<Vec<IdentityReport>> {
    shift_pair("G21", omega, q, p, tol, false)
}

/// The shift equations at the reciprocal points `p / omega` and `q / omega`,
/// with `G1` on the right-hand side.
pub fn g22_check(omega: Scalar, q: Scalar, p: Scalar, tol: f64) -> Result<Vec<IdentityReport>> {
    shift_pair("G22", omega, q, p, tol, true)
}

/// `prod_{n1,n2} (1 - z^{-1} q^{n1+1} p^{n2+1}) / (1 - z q^{n1} p^{n2})`.
pub fn elliptic_gamma1(z: Scalar, q: Scalar, p: Scalar, target: f64) -> Result<Evaluation> {
    ensure_finite(z)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("z = 0".into()));
    }
    let rq = check_nome("q", q)?;
    let rp = check_nome("p", p)?;
    let zi = z.inv();
    let denom = (1.0 - rq) * (1.0 - rp);
    let coef = 2.0 * (z.norm() + zi.norm() * rq * rp);
    let n1 = index_bound(coef, rq, denom, target / 2.0)?;
    let n2 = index_bound(coef, rp, denom, target / 2.0)?;
    let mut value = real(1.0);
    let mut qa = real(1.0);
    for _ in 0..=n1 {
        let mut pb = real(1.0);
        for _ in 0..=n2 {
            let den = real(1.0) - z * qa * pb;
            if den.norm() < 1e-14 {
                return Err(Error::Pole(den.norm()));
            }
            value *= (real(1.0) - zi * qa * pb * q * p) / den;
            pb *= p;
        }
        qa *= q;
    }
    Ok(Evaluation {
        value,
        terms: (n1 + 1) * (n2 + 1),
        tail_bound: coef * (rq.powi(n1 as i32 + 1) + rp.powi(n2 as i32 + 1)) / denom,
    })
}

/// `prod_{n1,n2,n3} (1 - z^{-1} q^{n1+1} p^{n2+1} t^{n3+1}) (1 - z q^{n1} p^{n2} t^{n3})`.
pub fn elliptic_gamma2(z: Scalar, q: Scalar, p: Scalar, t: Scalar, target: f64) -> Result<Evaluation> {
    ensure_finite(z)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("z = 0".into()));
    }
    let rq = check_nome("q", q)?;
    let rp = check_nome("p", p)?;
    let rt = check_nome("t", t)?;
    let zi = z.inv();
    let denom = (1.0 - rq) * (1.0 - rp) * (1.0 - rt);
    let coef = 2.0 * (z.norm() + zi.norm() * rq * rp * rt);
    let n1 = index_bound(coef, rq, denom, target / 3.0)?;
    let n2 = index_bound(coef, rp, denom, target / 3.0)?;
    let n3 = index_bound(coef, rt, denom, target / 3.0)?;
    let qpt = q * p * t;
    let mut value = real(1.0);
    let mut qa = real(1.0);
    for _ in 0..=n1 {
        let mut pb = qa;
        for _ in 0..=n2 {
            let mut w = pb;
            for _ in 0..=n3 {
                value *= (real(1.0) - zi * w * qpt) * (real(1.0) - z * w);
                w *= t;
            }
            pb *= p;
        }
        qa *= q;
    }
    let tail = coef * (rq.powi(n1 as i32 + 1) + rp.powi(n2 as i32 + 1) + rt.powi(n3 as i32 + 1)) / denom;
    Ok(Evaluation {
        value,
        terms: (n1 + 1) * (n2 + 1) * (n3 + 1),
        tail_bound: tail,
    })
}

/// `Gamma1(z) Gamma1(pq/z) = 1`.
pub fn gamma1_reflection_check(z: Scalar, q: Scalar, p: Scalar, tol: f64) -> Result<IdentityReport> {
    let a = elliptic_gamma1(z, q, p, tol / 100.0)?;
    let b = elliptic_gamma1(p * q / z, q, p, tol / 100.0)?;
    Ok(IdentityReport::compare("gamma1-reflection", a.value * b.value, real(1.0), a.tail_bound + b.tail_bound, tol)
        .param("z", z)
        .param("q", q)
        .param("p", p)
        .truncated("factors", a.terms.max(b.terms)))
}

/// `(q^x; q)_inf` as `R(x (1 - i rho))`.
fn pochhammer_ruelle(x: Scalar, p: &SpectralParams, target: f64) -> Result<Evaluation> {
    ruelle(x * c(1.0, -p.rho), p, 1.0, RuelleMethod::Auto, target)
}

/// Sums `weight(N) * f(N)` over `N = 0..` until the bound `coef * weight(N) r^N` is below target.
fn outer_product(
    r: f64,
    coef: f64,
    target: f64,
    weight: impl Fn(u64) -> f64,
    mut factor: impl FnMut(u64) -> Result<Evaluation>,
) -> Result<Evaluation> {
    let mut log = real(0.0);
    let mut inner = 0.0;
    let mut terms = 0;
    let mut n = 0u64;
    loop {
        let f = factor(n)?;
        log += f.value.ln() * weight(n);
        inner += f.tail_bound * weight(n);
        terms = terms.max(f.terms);
        n += 1;
        // remaining outer terms: sum_{j >= n} weight(j) coef r^j
        let rest: f64 = (n..n + 400).map(|j| weight(j) * coef * r.powi(j as i32)).sum();
        if coef * r.powi(n as i32) <= 0.5 && rest < target {
            return Ok(Evaluation {
                value: log.exp(),
                terms: n.max(terms),
                tail_bound: rest + inner,
            });
        }
        if n > MAX_INDEX {
            return Err(Error::NonConvergent("outer product does not settle".into()));
        }
    }
}

/// `Gamma1(z; q, q)` directly against
/// `prod_n (1 - q^{n+2}/z)/(1 - z q^n) * R((n + Omega(1/z) + 3)(1 - i rho)) / R((n + Omega(z) + 1)(1 - i rho))`.
pub fn gamma1_qq_check(z: Scalar, q: Scalar, tol: f64) -> Result<IdentityReport> {
    let target = tol / 100.0;
    let direct = elliptic_gamma1(z, q, q, target)?;
    let p = SpectralParams::from_nome(q)?;
    let om = p.omega_bar(z)?;
    let om_inv = p.omega_bar(z.inv())?;
    let r = p.modulus();
    let coef = 2.0 * (z.inv().norm() * r * r + z.norm()) / (1.0 - r);
    let spectral = outer_product(r, coef, target, |_| 1.0, |n| {
        let nf = n as f64;
        let top = pochhammer_ruelle(om_inv + nf + 3.0, &p, target / 4.0)?;
        let bottom = pochhammer_ruelle(om + nf + 1.0, &p, target / 4.0)?;
        let front = (real(1.0) - q.powu(n as u32 + 2) / z) / (real(1.0) - z * q.powu(n as u32));
        Ok(Evaluation {
            value: front * top.value / bottom.value,
            terms: top.terms.max(bottom.terms),
            tail_bound: (top.tail_bound + bottom.tail_bound) / (n as f64 + 1.0).powi(2),
        })
    })?;
    Ok(IdentityReport::compare("gamma1[q=p]", direct.value, spectral.value, direct.tail_bound + spectral.tail_bound, tol)
        .param("z", z)
        .param("q", q)
        .truncated("direct_factors", direct.terms)
        .truncated("ruelle_terms", spectral.terms))
}

/// `Gamma2(z; q, q, q)` directly against
/// `prod_N [(1 - q^{N+3}/z)(1 - z q^N) R((N + Omega(1/z) + 4)(1 - i rho)) R((N + Omega(z) + 1)(1 - i rho))]^{N+1}`.
pub fn gamma2_qqq_check(z: Scalar, q: Scalar, tol: f64) -> Result<IdentityReport> {
    let target = tol / 100.0;
    let direct = elliptic_gamma2(z, q, q, q, target)?;
    let p = SpectralParams::from_nome(q)?;
    let om = p.omega_bar(z)?;
    let om_inv = p.omega_bar(z.inv())?;
    let r = p.modulus();
    let coef = 2.0 * (z.inv().norm() * r.powi(3) + z.norm()) / (1.0 - r);
    let spectral = outer_product(r, coef, target, |n| (n + 1) as f64, |n| {
        let nf = n as f64;
        let a = pochhammer_ruelle(om_inv + nf + 4.0, &p, target / 4.0)?;
        let b = pochhammer_ruelle(om + nf + 1.0, &p, target / 4.0)?;
        let front = (real(1.0) - q.powu(n as u32 + 3) / z) * (real(1.0) - z * q.powu(n as u32));
        Ok(Evaluation {
            value: front * a.value * b.value,
            terms: a.terms.max(b.terms),
            tail_bound: (a.tail_bound + b.tail_bound) / (n as f64 + 1.0).powi(3),
        })
    })?;
    Ok(IdentityReport::compare("gamma2[q=p=t]", direct.value, spectral.value, direct.tail_bound + spectral.tail_bound, tol)
        .param("z", z)
        .param("q", q)
        .truncated("direct_factors", direct.terms)
        .truncated("ruelle_terms", spectral.terms))
}

/// `n! [x^n]` of `x^power e^{zx} / prod_w (e^{wx} - 1)`, by Taylor arithmetic
/// to the given order; needs `power >= omegas.len()`.
pub fn bernoulli_kernel(z: Scalar, omegas: &[Scalar], power: u32, n: u32, order: u32) -> Result<Scalar> {
    let shift = power
        .checked_sub(omegas.len() as u32)
        .ok_or_else(|| Error::Invalid("power must cover the poles".into()))?;
    if n < shift {
        return Ok(real(0.0));
    }
    let need = n - shift;
    if order < need {
        return Err(Error::Invalid(format!("Taylor order {order} is below {need}")));
    }
    let one = TruncatedSeries::zero(&["x"], order)?.one_like();
    let mut denom = one.clone();
    for &w in omegas {
        ensure_finite(w)?;
        if w.norm() == 0.0 {
            return Err(Error::Invalid("zero period".into()));
        }
        // (e^{wx} - 1) / x = sum_k w^{k+1} x^k / (k+1)!
        let mut f = one.zero_like();
        let mut term = w;
        for k in 0..=order {
            f.add_term(&[k], term)?;
            term = term * w / (k + 2) as f64;
        }
        denom = denom.try_mul(&f)?;
    }
    let mut ez = one.zero_like();
    let mut term = real(1.0);
    for k in 0..=order {
        ez.add_term(&[k], term)?;
        term = term * z / (k + 1) as f64;
    }
    let quotient = ez.try_mul(&denom.inv()?)?;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(quotient.coeff(&[need]) * fact)
}

/// `lim_{x->0} d^4/dx^4 [x^4 e^{zx} / ((e^{ax}-1)(e^{bx}-1)(e^{cx}-1))]`.
pub fn b44(z: Scalar, a: Scalar, b: Scalar, c: Scalar) -> Result<Scalar> {
    bernoulli_kernel(z, &[a, b, c], 4, 4, 8)
}

/// The kernel with the fourth period `-1` that enters the modular relation.
pub fn modular_kernel(z: Scalar, a: Scalar, b: Scalar, c: Scalar) -> Result<Scalar> {
    bernoulli_kernel(z, &[a, b, c, real(-1.0)], 4, 4, 8)
}

/// Three nomes with their periods `2 pi i a = log q` (principal branch).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NomeTriple {
    pub q: Scalar,
    pub p: Scalar,
    pub t: Scalar,
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

impl NomeTriple {
    pub fn from_nomes(q: Scalar, p: Scalar, t: Scalar) -> Result<Self> {
        for (name, v) in [("q", q), ("p", p), ("t", t)] {
            check_nome(name, v)?;
            if v.norm() == 0.0 {
                return Err(Error::Domain(format!("{name} = 0")));
            }
        }
        let per = |v: Scalar| v.ln() / (2.0 * PI * I);
        Ok(NomeTriple {
            q,
            p,
            t,
            a: per(q),
            b: per(p),
            c: per(t),
        })
    }

    pub fn from_periods(a: Scalar, b: Scalar, c: Scalar) -> Result<Self> {
        for v in [a, b, c] {
            ensure_finite(v)?;
            if v.im <= 0.0 {
                return Err(Error::Domain(format!("period {v} must lie in the upper half plane")));
            }
        }
        let nome = |v: Scalar| (2.0 * PI * I * v).exp();
        Ok(NomeTriple {
            q: nome(a),
            p: nome(b),
            t: nome(c),
            a,
            b,
            c,
        })
    }

    /// The six derived periods `-1/a, b/a, c/a, a/b, -1/b, c/b, a/c, b/c, -1/c`
    /// without repeats, in that order of appearance.
    pub fn derived(&self) -> [(&'static str, Scalar); 9] {
        let (a, b, c) = (self.a, self.b, self.c);
        [
            ("-1/a", -a.inv()),
            ("b/a", b / a),
            ("c/a", c / a),
            ("a/b", a / b),
            ("-1/b", -b.inv()),
            ("c/b", c / b),
            ("a/c", a / c),
            ("b/c", b / c),
            ("-1/c", -c.inv()),
        ]
    }
}

const REAL_AXIS: f64 = 1e-12;

/// `Gamma2` in additive variables: `x = e^{2 pi i z}`, nomes `e^{2 pi i tau_j}`.
/// A period in the lower half plane is handled by
/// `G(z | .., tau, ..) = 1 / G(z - tau | .., -tau, ..)`.
pub fn gamma2_additive(z: Scalar, taus: [Scalar; 3], target: f64) -> Result<Evaluation> {
    for (j, &tau) in taus.iter().enumerate() {
        ensure_finite(tau)?;
        if tau.im.abs() < REAL_AXIS {
            return Err(Error::Domain(format!("period {tau} is real: nome on the unit circle")));
        }
        if tau.im < 0.0 {
            let mut flipped = taus;
            flipped[j] = -tau;
            let inner = gamma2_additive(z - tau, flipped, target)?;
            return Ok(Evaluation {
                value: inner.value.inv(),
                ..inner
            });
        }
    }
    let e = |v: Scalar| (2.0 * PI * I * v).exp();
    elliptic_gamma2(e(z), e(taus[0]), e(taus[1]), e(taus[2]), target)
}

/// `Gamma2(z|a,b,c)` against
/// `Gamma2(z/a | -1/a, b/a, c/a) Gamma2(z/b | a/b, -1/b, c/b) Gamma2(z/c | a/c, b/c, -1/c)
///  * exp(i pi / 12 * K(z | a, b, c, -1))`.
///
/// Without `reflect`, every derived period must lie in the upper half plane,
/// which no triple satisfies (`b/a` and `a/b` always have opposite imaginary
/// parts); with it, only periods on the real axis are a domain failure.
pub fn gamma2_modularity_check(z: Scalar, triple: &NomeTriple, tol: f64, reflect: bool) -> IdentityReport {
    let derived = triple.derived();
    let decorate = |r: IdentityReport| {
        let mut r = r
            .param("z", z)
            .param("a", triple.a)
            .param("b", triple.b)
            .param("c", triple.c)
            .param("reflection", reflect);
        for (name, v) in derived {
            r = r.param(&format!("nome[{name}]"), format!("{:.6e}", (2.0 * PI * I * v).exp().norm()));
        }
        r
    };
    let bad: Vec<String> = derived
        .iter()
        .filter(|(_, v)| if reflect { v.im.abs() < REAL_AXIS } else { v.im <= 0.0 })
        .map(|(name, v)| format!("{name} = {v}"))
        .collect();
    if !bad.is_empty() {
        let why = format!("derived nome modulus >= 1 for {}", bad.join(", "));
        return decorate(IdentityReport::domain_failure("gamma2-modularity", why, tol));
    }
    // four products enter; keep their summed tails well inside tol / 100
    let target = tol / 1000.0;
    let eval = || -> Result<(Evaluation, Evaluation, Scalar)> {
        let (a, b, c) = (triple.a, triple.b, triple.c);
        let lhs = gamma2_additive(z, [a, b, c], target)?;
        let f1 = gamma2_additive(z / a, [-a.inv(), b / a, c / a], target)?;
        let f2 = gamma2_additive(z / b, [a / b, -b.inv(), c / b], target)?;
        let f3 = gamma2_additive(z / c, [a / c, b / c, -c.inv()], target)?;
        let kernel = modular_kernel(z, a, b, c)?;
        let rhs = Evaluation {
            value: f1.value * f2.value * f3.value,
            terms: f1.terms.max(f2.terms).max(f3.terms),
            tail_bound: f1.tail_bound + f2.tail_bound + f3.tail_bound,
        };
        Ok((lhs, rhs, kernel))
    };
    match eval() {
        Ok((lhs, rhs, kernel)) => {
            let value = rhs.value * (I * PI / 12.0 * kernel).exp();
            decorate(
                IdentityReport::compare("gamma2-modularity", lhs.value, value, lhs.tail_bound + rhs.tail_bound, tol)
                    .param("kernel", kernel)
                    .truncated("lhs_factors", lhs.terms)
                    .truncated("rhs_factors", rhs.terms),
            )
        }
        Err(e) => decorate(IdentityReport::domain_failure("gamma2-modularity", e.to_string(), tol)),
    }
}

fn compositions_upto(parts: usize, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut stack = vec![(Vec::with_capacity(parts), 0u32)];
    while let Some((cur, used)) = stack.pop() {
        if cur.len() == parts {
            out.push(cur);
            continue;
        }
        for v in 0..=max_total - used {
            let mut next = cur.clone();
            next.push(v);
            stack.push((next, used + v));
        }
    }
    out
}

/// `prod_{k in N^m} G1(z q^{|k|}; q)` against the `(m+1)`-fold product
/// `prod_{n in N^{m+1}} (1 - z q^{|n|})`.
pub fn factorized_hierarchy(z: Scalar, m: usize, q: Scalar, tol: f64) -> Result<IdentityReport> {
    if m == 0 {
        return Err(Error::Invalid("need m >= 1".into()));
    }
    let r = check_nome("q", q)?;
    let target = tol / 100.0;
    let zn = z.norm();
    // omitted degrees d > top: multiplicity C(d+m, m) in the (m+1)-fold product
    let rest = |top: u32| -> f64 {
        (top + 1..top + 400)
            .map(|d| 2.0 * binomial((d as usize + m) as u64, m as u64) as f64 * zn * r.powi(d as i32))
            .sum()
    };
    let mut top = 1u32;
    while rest(top) >= target || zn * r.powi(top as i32 + 1) > 0.5 {
        top += 1;
        if top > 2000 {
            return Err(Error::NonConvergent("hierarchy truncation does not settle".into()));
        }
    }
    let mut direct = real(1.0);
    let tuples = compositions_upto(m + 1, top);
    for n in &tuples {
        let d: u32 = n.iter().sum();
        direct *= real(1.0) - z * q.powu(d);
    }
    let mut factored = real(1.0);
    let mut g1_tail = 0.0;
    let outer = compositions_upto(m, top);
    for k in &outer {
        let d: u32 = k.iter().sum();
        let g = jackson_g1(z * q.powu(d), q, target / outer.len() as f64)?;
        factored *= g.value;
        g1_tail += g.tail_bound;
    }
    Ok(IdentityReport::compare("hierarchy-factorization", direct, factored, 2.0 * rest(top) + g1_tail, tol)
        .param("z", z)
        .param("m", m)
        .param("q", q)
        .truncated("degree", top as u64)
        .truncated("direct_factors", tuples.len() as u64))
}
