//! The Patterson-Selberg function of a loxodromic cyclic group, the Ruelle
//! function built from it, and product identities expressed through them.
//!
//! With `theta` in the upper half plane, `q = e^{2 pi i theta}`,
//! `alpha = 2 pi Im theta`, `beta = 2 pi Re theta`, `rho = Re theta / Im theta`
//! and `sigma = 1 / (2 Im theta)`. The Ruelle function with step `a` is
//!
//! ```text
//! R_a(s) = Z_a(u) / Z_a(u + 1 + i rho),   u = (s - 1 + a) / a,
//! ```
//!
//! where `Z_a` uses `(a alpha, a beta)`. It equals the single product
//! `prod_{k>=0} (1 - q^{ak} e^{-alpha (s - 1 + a)})`, which is how it is
//! evaluated whenever the ratio would leave the region `Re u > 0`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multipartite::{exponent_multiplicities, Convention, Kind};
use crate::report::IdentityReport;
use crate::scalar::{c, ensure_finite, real, Scalar, I};

const MAX_TERMS: u64 = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralParams {
    pub theta: Scalar,
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub sigma: f64,
    pub q: Scalar,
}

impl SpectralParams {
    pub fn from_theta(theta: Scalar) -> Result<Self> {
        ensure_finite(theta)?;
        if theta.im <= 0.0 {
            return Err(Error::Domain(format!("theta = {theta} must have positive imaginary part")));
        }
        Ok(SpectralParams {
            theta,
            alpha: 2.0 * PI * theta.im,
            beta: 2.0 * PI * theta.re,
            rho: theta.re / theta.im,
            sigma: 1.0 / (2.0 * theta.im),
            q: (2.0 * PI * I * theta).exp(),
        })
    }

    /// Principal `theta = log(q) / (2 pi i)`.
    pub fn from_nome(q: Scalar) -> Result<Self> {
        ensure_finite(q)?;
        let r = q.norm();
        if r == 0.0 || r >= 1.0 {
            return Err(Error::Domain(format!("nome {q} must satisfy 0 < |q| < 1")));
        }
        Self::from_theta(q.ln() / (2.0 * PI * I))
    }

    pub fn from_alpha_beta(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !beta.is_finite() {
            return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
        }
        Self::from_theta(c(beta, alpha) / (2.0 * PI))
    }

    /// `theta -> a theta`, i.e. `(alpha, beta) -> (a alpha, a beta)`.
    pub fn scaled(&self, a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Domain(format!("step a = {a} must be positive")));
        }
        Self::from_theta(self.theta * a)
    }

    /// `q^x = e^{2 pi i theta x}` for complex `x`.
    pub fn qpow(&self, x: Scalar) -> Scalar {
        (2.0 * PI * I * self.theta * x).exp()
    }

    /// `log(w) / (2 pi i theta)` on the principal branch, so that `q^{result} = w`.
    pub fn omega_bar(&self, w: Scalar) -> Result<Scalar> {
        ensure_finite(w)?;
        if w.norm() == 0.0 {
            return Err(Error::Branch("logarithm of zero".into()));
        }
        let v = w.ln() / (2.0 * PI * I * self.theta);
        let back = self.qpow(v);
        if (back - w).norm() > 1e-10 * w.norm().max(1.0) {
            return Err(Error::Branch(format!("q^omega = {back} differs from {w}")));
        }
        Ok(v)
    }

    /// `|q| = e^{-alpha}`.
    pub fn modulus(&self) -> f64 {
        (-self.alpha).exp()
    }
}

/// A truncated evaluation: value, number of terms or truncation index used,
/// and a bound on the discarded tail of the logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: Scalar,
    pub terms: u64,
    pub tail_bound: f64,
}

/// Sum over the factors with `k1 + k2 > k` of `2 |x|`, which bounds the
/// discarded part of `log Z` once every such `|x| <= 1/2`.
fn zeta_tail(s: Scalar, p: &SpectralParams, k: u64) -> f64 {
    let r = p.modulus();
    let lead = (-s.re * p.alpha).exp() * r.powi(k as i32 + 1);
    if lead > 0.5 {
        return f64::INFINITY;
    }
    let kf = k as f64;
    2.0 * lead * ((kf + 2.0) - (kf + 1.0) * r) / (1.0 - r).powi(2)
}

/// `prod_{k1 + k2 <= k} (1 - e^{i beta (k1 - k2)} e^{-(k1 + k2 + s) alpha})`.
pub fn zeta_product_truncated(s: Scalar, p: &SpectralParams, k: u64) -> Evaluation {
    let mut value = real(1.0);
    let base = (-s * p.alpha).exp();
    for d in 0..=k {
        let radial = base * (-(d as f64) * p.alpha).exp();
        for k1 in 0..=d {
            let k2 = d - k1;
            let phase = c(0.0, p.beta * (k1 as f64 - k2 as f64)).exp();
            value *= real(1.0) - phase * radial;
        }
    }
    Evaluation {
        value,
        terms: k,
        tail_bound: zeta_tail(s, p, k),
    }
}

/// The double product with the truncation chosen so the tail bound is below `target`.
pub fn zeta_product(s: Scalar, p: &SpectralParams, target: f64) -> Result<Evaluation> {
    ensure_finite(s)?;
    let start = (-s.re).ceil().max(0.0) as u64;
    let mut k = start;
    while zeta_tail(s, p, k) >= target {
        k += 1;
        if k > MAX_TERMS {
            return Err(Error::NonConvergent(format!("no truncation reaches {target:e} at s = {s}")));
        }
    }
    Ok(zeta_product_truncated(s, p, k))
}

fn log_series_tail(s: Scalar, p: &SpectralParams, n: u64) -> f64 {
    let decay = (-p.alpha * s.re).exp();
    let nf = (n + 1) as f64;
    decay.powf(nf) / (nf * (1.0 - (-p.alpha).exp()).powi(2) * (1.0 - decay))
}

/// `-1/4 sum_{n=1}^{terms} e^{-n alpha (s-1)} / (n [sinh^2(alpha n/2) + sin^2(beta n/2)])`.
pub fn zeta_log_series_truncated(s: Scalar, p: &SpectralParams, terms: u64) -> Evaluation {
    let mut sum = real(0.0);
    for n in 1..=terms {
        let nf = n as f64;
        let denom = nf * ((p.alpha * nf / 2.0).sinh().powi(2) + (p.beta * nf / 2.0).sin().powi(2));
        sum += (-(s - 1.0) * p.alpha * nf).exp() / denom;
    }
    Evaluation {
        value: sum * -0.25,
        terms,
        tail_bound: log_series_tail(s, p, terms),
    }
}

/// `log Z(s)` from its Dirichlet-type series; needs `Re s > 0`.
pub fn zeta_log_series(s: Scalar, p: &SpectralParams, target: f64) -> Result<Evaluation> {
    ensure_finite(s)?;
    if s.re <= 0.0 {
        return Err(Error::NonConvergent(format!("log series does not decay at Re s = {}", s.re)));
    }
    let mut n = 1;
    while log_series_tail(s, p, n) >= target {
        n += 1;
        if n > MAX_TERMS {
            return Err(Error::NonConvergent(format!("log series needs more than {MAX_TERMS} terms")));
        }
    }
    Ok(zeta_log_series_truncated(s, p, n))
}

/// `-(k1 + k2) + i (k1 - k2) beta / alpha + 2 pi i n / alpha`.
pub fn zeta_zero(n: i64, k1: u32, k2: u32, p: &SpectralParams) -> Scalar {
    c(
        -((k1 + k2) as f64),
        (k1 as f64 - k2 as f64) * p.beta / p.alpha + 2.0 * PI * n as f64 / p.alpha,
    )
}

/// The lattice zero closest to `s`.
pub fn nearest_zero(s: Scalar, p: &SpectralParams) -> (i64, u32, u32) {
    let d = (-s.re).round().max(0.0) as u32;
    let mut best = (0, 0, d);
    let mut best_dist = f64::INFINITY;
    for k1 in 0..=d {
        let k2 = d - k1;
        let base = zeta_zero(0, k1, k2, p);
        let n = ((s.im - base.im) * p.alpha / (2.0 * PI)).round() as i64;
        let dist = (zeta_zero(n, k1, k2, p) - s).norm();
        if dist < best_dist {
            best_dist = dist;
            best = (n, k1, k2);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuelleMethod {
    /// Ratio of Patterson-Selberg products when `Re u > 0`, single product otherwise.
    Auto,
    ZetaRatio,
    Product,
}

/// `e^{-alpha (s - 1 + a)}`, the first factor's offset in the single product.
fn ruelle_offset(s: Scalar, p: &SpectralParams, a: f64) -> Scalar {
    (-(s - 1.0 + a) * p.alpha).exp()
}

/// `prod_{k>=0} (1 - q^{ak} w)` truncated so the tail bound is below `target`.
fn ruelle_product(w: Scalar, p: &SpectralParams, a: f64, target: f64) -> Result<Evaluation> {
    let ra = p.modulus().powf(a);
    let qa = p.qpow(real(a));
    let mut value = real(1.0);
    let mut x = w;
    let mut k: u64 = 0;
    loop {
        value *= real(1.0) - x;
        x *= qa;
        let tail = 2.0 * x.norm() / (1.0 - ra);
        if x.norm() <= 0.5 && tail < target {
            return Ok(Evaluation {
                value,
                terms: k,
                tail_bound: tail,
            });
        }
        k += 1;
        if k > MAX_TERMS {
            return Err(Error::NonConvergent("Ruelle product does not settle".into()));
        }
    }
}

/// `R_a(s)`; see the module documentation for the definition.
pub fn ruelle(s: Scalar, p: &SpectralParams, a: f64, method: RuelleMethod, target: f64) -> Result<Evaluation> {
    ensure_finite(s)?;
    let pa = p.scaled(a)?;
    let u = (s - 1.0 + a) / a;
    let use_ratio = match method {
        RuelleMethod::Auto => u.re > 0.0,
        RuelleMethod::ZetaRatio => true,
        RuelleMethod::Product => false,
    };
    if !use_ratio {
        return ruelle_product(ruelle_offset(s, p, a), p, a, target);
    }
    let shifted = u + c(1.0, p.rho);
    let num = zeta_product(u, &pa, target / 2.0)?;
    let den = zeta_product(shifted, &pa, target / 2.0)?;
    if den.value.norm() < 1e-300 {
        let (n, k1, k2) = nearest_zero(shifted, &pa);
        return Err(Error::SpectralZero { n, k1, k2 });
    }
    Ok(Evaluation {
        value: num.value / den.value,
        terms: num.terms.max(den.terms),
        tail_bound: num.tail_bound + den.tail_bound,
    })
}

/// `log R_a(s)` as a sum of principal logarithms of the product factors,
/// taken from the Patterson-Selberg log series when `Re u > 0`.
pub fn ruelle_log(s: Scalar, p: &SpectralParams, a: f64, target: f64) -> Result<Evaluation> {
    ensure_finite(s)?;
    let pa = p.scaled(a)?;
    let u = (s - 1.0 + a) / a;
    if u.re > 0.0 {
        let num = zeta_log_series(u, &pa, target / 2.0)?;
        let den = zeta_log_series(u + c(1.0, p.rho), &pa, target / 2.0)?;
        return Ok(Evaluation {
            value: num.value - den.value,
            terms: num.terms.max(den.terms),
            tail_bound: num.tail_bound + den.tail_bound,
        });
    }
    let ra = p.modulus().powf(a);
    let qa = p.qpow(real(a));
    let mut x = ruelle_offset(s, p, a);
    let mut sum = real(0.0);
    let mut k: u64 = 0;
    loop {
        if x == real(1.0) {
            return Err(Error::Branch("logarithm of a vanishing factor".into()));
        }
        sum += (real(1.0) - x).ln();
        x *= qa;
        let tail = 2.0 * x.norm() / (1.0 - ra);
        if x.norm() <= 0.5 && tail < target {
            return Ok(Evaluation {
                value: sum,
                terms: k,
                tail_bound: tail,
            });
        }
        k += 1;
        if k > MAX_TERMS {
            return Err(Error::NonConvergent("Ruelle log product does not settle".into()));
        }
    }
}

/// Parameters of the single and weighted product identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuelleArg {
    pub a: f64,
    pub epsilon: Scalar,
    pub ell: u32,
    /// Exponent weight of the weighted identities.
    pub b: Scalar,
    /// Use `(1 + q^{an + eps})` instead of `(1 - q^{an + eps})`.
    pub plus_variant: bool,
}

impl RuelleArg {
    pub fn new(a: f64, epsilon: Scalar, ell: u32) -> Self {
        RuelleArg {
            a,
            epsilon,
            ell,
            b: real(1.0),
            plus_variant: false,
        }
    }

    pub fn plus(mut self) -> Self {
        self.plus_variant = true;
        self
    }

    pub fn weight(mut self, b: Scalar) -> Self {
        self.b = b;
        self
    }

    /// The Ruelle argument whose product starts at `q^{an + eps}`:
    /// `(an + eps)(1 - i rho) + 1 - a`, plus `i sigma` for the `+` variant.
    pub fn argument(&self, n: u32, p: &SpectralParams) -> Scalar {
        let base = (self.epsilon + self.a * n as f64) * c(1.0, -p.rho) + 1.0 - self.a;
        if self.plus_variant {
            base + c(0.0, p.sigma)
        } else {
            base
        }
    }

    fn factor(&self, n: u32, p: &SpectralParams) -> Scalar {
        let x = p.qpow(self.epsilon + self.a * n as f64);
        if self.plus_variant {
            real(1.0) + x
        } else {
            real(1.0) - x
        }
    }

    fn name(&self, weighted: bool) -> &'static str {
        match (weighted, self.plus_variant) {
            (false, false) => "R1",
            (false, true) => "R2",
            (true, false) => "RU1",
            (true, true) => "RU2",
        }
    }
}

fn offset_modulus(arg: &RuelleArg, n: u32, p: &SpectralParams) -> f64 {
    p.qpow(arg.epsilon + arg.a * n as f64).norm()
}

/// `prod_{n >= ell} (1 -+ q^{an + eps})` directly against `R(argument(ell))`.
pub fn ruelle_identity(arg: &RuelleArg, p: &SpectralParams, tol: f64) -> Result<IdentityReport> {
    let target = tol / 100.0;
    let ra = p.modulus().powf(arg.a);
    let mut direct = real(1.0);
    let mut n = arg.ell;
    loop {
        direct *= arg.factor(n, p);
        n += 1;
        let x = offset_modulus(arg, n, p);
        if x <= 0.5 && 2.0 * x / (1.0 - ra) < target {
            break;
        }
        if n - arg.ell > MAX_TERMS as u32 {
            return Err(Error::NonConvergent("direct product does not settle".into()));
        }
    }
    let direct_tail = 2.0 * offset_modulus(arg, n, p) / (1.0 - ra);
    let spectral = ruelle(arg.argument(arg.ell, p), p, arg.a, RuelleMethod::Auto, target)?;
    Ok(IdentityReport::compare(
        arg.name(false),
        direct,
        spectral.value,
        direct_tail + spectral.tail_bound,
        tol,
    )
    .param("a", arg.a)
    .param("epsilon", arg.epsilon)
    .param("ell", arg.ell)
    .param("q", p.q)
    .truncated("direct_factors", (n - arg.ell) as u64)
    .truncated("spectral_terms", spectral.terms))
}

/// `prod_{n >= ell} (1 -+ q^{an+eps})^{b n}` against
/// `R(argument(ell))^{b ell} prod_{n > ell} R(argument(n))^b`, both through
/// principal logarithms.
pub fn ruelle_powered(arg: &RuelleArg, p: &SpectralParams, tol: f64) -> Result<IdentityReport> {
    let target = tol / 100.0;
    let ra = p.modulus().powf(arg.a);
    if arg.b == real(0.0) {
        return Ok(IdentityReport::compare(arg.name(true), real(1.0), real(1.0), 0.0, tol)
            .param("b", arg.b)
            .note("zero weight"));
    }
    let bn = arg.b.norm();
    // direct side: sum_n b n Log(1 -+ x_n)
    let mut log_direct = real(0.0);
    let mut n = arg.ell;
    let direct_tail = loop {
        log_direct += arg.b * n as f64 * arg.factor(n, p).ln();
        n += 1;
        let x = offset_modulus(arg, n, p);
        // sum_{j >= n} 2 |b| j x ra^{j - n}
        let tail = 2.0 * bn * x * (n as f64 / (1.0 - ra) + ra / (1.0 - ra).powi(2));
        if x <= 0.5 && tail < target {
            break tail;
        }
        if n - arg.ell > MAX_TERMS as u32 {
            return Err(Error::NonConvergent("weighted product does not settle".into()));
        }
    };
    let direct_terms = n - arg.ell;
    // spectral side
    let lead = ruelle_log(arg.argument(arg.ell, p), p, arg.a, target)?;
    let mut log_spectral = lead.value * arg.b * arg.ell as f64;
    let mut tail_spec = lead.tail_bound * bn * arg.ell as f64;
    let mut n = arg.ell + 1;
    let spectral_tail = loop {
        let l = ruelle_log(arg.argument(n, p), p, arg.a, target / (n as f64).powi(2))?;
        log_spectral += l.value * arg.b;
        tail_spec += l.tail_bound * bn;
        n += 1;
        let x = offset_modulus(arg, n, p);
        // |log R(argument(j))| <= 2 x_j / (1 - ra) for j >= n
        let tail = 2.0 * bn * x / (1.0 - ra).powi(2);
        if x <= 0.5 && tail < target {
            break tail + tail_spec;
        }
        if n - arg.ell > MAX_TERMS as u32 {
            return Err(Error::NonConvergent("weighted spectral product does not settle".into()));
        }
    };
    Ok(IdentityReport::compare(
        arg.name(true),
        log_direct.exp(),
        log_spectral.exp(),
        direct_tail + spectral_tail,
        tol,
    )
    .param("a", arg.a)
    .param("b", arg.b)
    .param("epsilon", arg.epsilon)
    .param("ell", arg.ell)
    .param("q", p.q)
    .truncated("direct_factors", direct_terms as u64)
    .truncated("spectral_factors", (n - arg.ell) as u64))
}

/// `prod_{j=1}^m (1 - q^{jn})^{-1}` as the ratio `R_n(nm + 1 - i n (m+1) rho) / R_n(1 - i n rho)`.
pub fn beta_ratio(n: u32, m: u32, p: &SpectralParams, target: f64) -> Result<Evaluation> {
    if n == 0 || m == 0 {
        return Err(Error::Invalid("need n >= 1 and m >= 1".into()));
    }
    let nf = n as f64;
    let top = c(nf * m as f64 + 1.0, -nf * (m as f64 + 1.0) * p.rho);
    let bottom = c(1.0, -nf * p.rho);
    let num = ruelle(top, p, nf, RuelleMethod::Auto, target / 2.0)?;
    let den = ruelle(bottom, p, nf, RuelleMethod::Auto, target / 2.0)?;
    Ok(Evaluation {
        value: num.value / den.value,
        terms: num.terms.max(den.terms),
        tail_bound: num.tail_bound + den.tail_bound,
    })
}

/// `beta(n)` evaluated directly under either specialization convention.
pub fn beta_direct(n: u32, m: u32, p: &SpectralParams, convention: Convention) -> Scalar {
    (1..=m)
        .map(|j| {
            let e = match convention {
                Convention::Diagonal => n,
                Convention::DistinctPowers => n * j,
            };
            (real(1.0) - p.q.powu(e)).inv()
        })
        .product()
}

/// Compares `beta(n)` under `convention` with the Ruelle ratio.
pub fn beta_spectral(n: u32, m: u32, p: &SpectralParams, convention: Convention, tol: f64) -> Result<IdentityReport> {
    let spectral = beta_ratio(n, m, p, tol / 100.0)?;
    let direct = beta_direct(n, m, p, convention);
    let label = match convention {
        Convention::Diagonal => "beta[diagonal]",
        Convention::DistinctPowers => "beta[distinct-powers]",
    };
    Ok(IdentityReport::compare(label, direct, spectral.value, spectral.tail_bound, tol)
        .param("m", m)
        .param("n", n)
        .param("q", p.q)
        .truncated("spectral_terms", spectral.terms))
}

/// The specialized generating functions in spectral form:
/// `F(z) = exp(sum_n z^n/n (beta(n) - 1))` and
/// `G(z) = exp(sum_n (-1)^{n+1} z^n/n (beta(n) - 1))` with `beta(n)` the
/// Ruelle ratio. For `|z| < 1` these equal `(1 - z) exp(sum z^n beta(n)/n)` and
/// `(1 + z)^{-1} exp(-sum (-z)^n beta(n)/n)`.
pub fn gf_spectral_form(z: Scalar, m: u32, p: &SpectralParams, tol: f64) -> Result<(Evaluation, Evaluation)> {
    let zq = z.norm() * p.modulus();
    if zq >= 1.0 {
        return Err(Error::NonConvergent(format!("|z q| = {zq} is not below 1")));
    }
    let target = tol / 100.0;
    let mut log_f = real(0.0);
    let mut log_g = real(0.0);
    let mut n = 1u32;
    let mut inner_tail = 0.0;
    let tail = loop {
        let beta = beta_ratio(n, m, p, target)?;
        let term = z.powu(n) / n as f64 * (beta.value - 1.0);
        log_f += term;
        log_g += if n % 2 == 1 { term } else { -term };
        inner_tail += z.norm().powi(n as i32) / n as f64 * beta.tail_bound * 2.0;
        let rn = p.modulus().powi(n as i32 + 1);
        let bound = 8.0 * zq.powi(n as i32 + 1) / (1.0 - zq);
        if 4.0 * rn <= 1.0 && bound < target {
            break bound + inner_tail;
        }
        n += 1;
        if n as u64 > MAX_TERMS {
            return Err(Error::NonConvergent("spectral generating function does not settle".into()));
        }
    };
    Ok((
        Evaluation {
            value: log_f.exp(),
            terms: n as u64,
            tail_bound: tail,
        },
        Evaluation {
            value: log_g.exp(),
            terms: n as u64,
            tail_bound: tail,
        },
    ))
}

/// The product over nonzero `k` at numeric `z` and `q`, using the exponent
/// multiplicities of the convention.
pub fn gf_direct(z: Scalar, m: u32, p: &SpectralParams, kind: Kind, convention: Convention, target: f64) -> Result<Evaluation> {
    let r = p.modulus();
    if z.norm() * r >= 1.0 {
        return Err(Error::NonConvergent("|z q| is not below 1".into()));
    }
    // grow the exponent range until the multiplicity-weighted tail is small
    let mut top = 16u32;
    loop {
        let mult = exponent_multiplicities(m as usize, top + 64, convention);
        let tail: f64 = (top as usize + 1..mult.len())
            .map(|e| 2.0 * mult[e] as f64 * z.norm() * r.powi(e as i32))
            .sum();
        if tail < target && z.norm() * r.powi(top as i32 + 1) <= 0.5 {
            let mut log = real(0.0);
            for (e, &count) in mult.iter().enumerate().take(top as usize + 1).skip(1) {
                let x = z * p.q.powu(e as u32);
                let l = match kind {
                    Kind::Unrestricted => -(real(1.0) - x).ln(),
                    Kind::Distinct => (real(1.0) + x).ln(),
                };
                log += l * count as f64;
            }
            return Ok(Evaluation {
                value: log.exp(),
                terms: top as u64,
                tail_bound: tail,
            });
        }
        top += 16;
        if top > 4096 {
            return Err(Error::NonConvergent("direct generating function does not settle".into()));
        }
    }
}

/// Spectral form of the specialized generating function against the direct
/// product under `convention`.
pub fn gf_spectral_check(z: Scalar, m: u32, p: &SpectralParams, kind: Kind, convention: Convention, tol: f64) -> Result<IdentityReport> {
    let (f, g) = gf_spectral_form(z, m, p, tol)?;
    let spectral = match kind {
        Kind::Unrestricted => f,
        Kind::Distinct => g,
    };
    let direct = gf_direct(z, m, p, kind, convention, tol / 100.0)?;
    let label = match (kind, convention) {
        (Kind::Unrestricted, Convention::DistinctPowers) => "F1[distinct-powers]",
        (Kind::Unrestricted, Convention::Diagonal) => "F1[diagonal]",
        (Kind::Distinct, Convention::DistinctPowers) => "G1[distinct-powers]",
        (Kind::Distinct, Convention::Diagonal) => "G1[diagonal]",
    };
    Ok(IdentityReport::compare(label, direct.value, spectral.value, direct.tail_bound + spectral.tail_bound, tol)
        .param("m", m)
        .param("q", p.q)
        .param("z", z)
        .truncated("direct_exponents", direct.terms)
        .truncated("spectral_terms", spectral.terms))
}

/// `G(-z) F(z) = 1`, both through the spectral form.
pub fn euler_check(z: Scalar, m: u32, p: &SpectralParams, tol: f64) -> Result<IdentityReport> {
    let (f, _) = gf_spectral_form(z, m, p, tol)?;
    let (_, g) = gf_spectral_form(-z, m, p, tol)?;
    Ok(IdentityReport::compare("euler[G(-z)F(z)=1]", g.value * f.value, real(1.0), f.tail_bound + g.tail_bound, tol)
        .param("m", m)
        .param("q", p.q)
        .param("z", z))
}

/// `R(x (1 - i rho) + i sigma) = prod_{k>=0} (1 + q^{k+x})`.
fn plus_ruelle(x: Scalar, p: &SpectralParams, target: f64) -> Result<Evaluation> {
    ruelle(x * c(1.0, -p.rho) + c(0.0, p.sigma), p, 1.0, RuelleMethod::Auto, target)
}

/// The two difference equations for the `+` Ruelle functions with integer
/// shifts `z` and `b`:
///
/// ```text
/// R+(1+z+b) R+(-z-b) = q^{-zb - b(b+1)/2}      R+(-z) R+(1+z)
///                    = q^{-z(b+1) - b(b+1)/2}  R+(1-z) R+(z)
/// ```
///
/// where `R+(x) = R(x(1 - i rho) + i sigma)`.
pub fn de3_check(z: i64, b: i64, p: &SpectralParams, tol: f64) -> Vec<IdentityReport> {
    let target = tol / 100.0;
    let eval = || -> Result<[Evaluation; 6]> {
        let zf = z as f64;
        let bf = b as f64;
        Ok([
            plus_ruelle(real(1.0 + zf + bf), p, target)?,
            plus_ruelle(real(-zf - bf), p, target)?,
            plus_ruelle(real(-zf), p, target)?,
            plus_ruelle(real(1.0 + zf), p, target)?,
            plus_ruelle(real(1.0 - zf), p, target)?,
            plus_ruelle(real(zf), p, target)?,
        ])
    };
    let vals = match eval() {
        Ok(v) => v,
        Err(e) => {
            return ["DE3[first]", "DE3[second]"]
                .iter()
                .map(|name| {
                    IdentityReport::domain_failure(name, e.to_string(), tol)
                        .param("z", z)
                        .param("b", b)
                })
                .collect()
        }
    };
    let tail: f64 = vals.iter().map(|v| v.tail_bound).sum();
    let terms = vals.iter().map(|v| v.terms).max().unwrap_or(0);
    let lhs = vals[0].value * vals[1].value;
    let tri = (b * (b + 1) / 2) as f64;
    let first = p.qpow(real(-(z * b) as f64 - tri)) * vals[2].value * vals[3].value;
    let second = p.qpow(real(-(z * (b + 1)) as f64 - tri)) * vals[4].value * vals[5].value;
    [("DE3[first]", first), ("DE3[second]", second)]
        .into_iter()
        .map(|(name, rhs)| {
            IdentityReport::compare(name, lhs, rhs, tail, tol)
                .param("z", z)
                .param("b", b)
                .param("q", p.q)
                .truncated("ruelle_terms", terms)
        })
        .collect()
}

/// Cross-representation check of `Z(s)`: product against exponentiated log series.
pub fn zeta_cross_check(s: Scalar, p: &SpectralParams, tol: f64) -> Result<IdentityReport> {
    let prod = zeta_product(s, p, tol / 100.0)?;
    let log = zeta_log_series(s, p, tol / 100.0)?;
    Ok(IdentityReport::compare("zeta[product=exp(log)]", prod.value, log.value.exp(), prod.tail_bound + log.tail_bound, tol)
        .param("alpha", p.alpha)
        .param("beta", p.beta)
        .param("s", s)
        .truncated("product_k", prod.terms)
        .truncated("log_terms", log.terms))
}

/// `|Z(zero)| / |Z(zero + 0.1)|` must be below `tol`.
pub fn zeta_zero_check(n: i64, k1: u32, k2: u32, p: &SpectralParams, tol: f64) -> Result<IdentityReport> {
    let zero = zeta_zero(n, k1, k2, p);
    let at = zeta_product(zero, p, 1e-14)?;
    let near = zeta_product(zero + 0.1, p, 1e-14)?;
    let ratio = at.value.norm() / near.value.norm();
    Ok(IdentityReport::with_residual("zeta-zero", at.value, real(0.0), ratio, at.tail_bound, tol)
        .param("n", n)
        .param("k1", k1)
        .param("k2", k2)
        .param("zero", zero)
        .truncated("product_k", at.terms))
}
