//! Complex scalars and the `a+bi` literal format used on the command line.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Scalar = Complex64;

pub const I: Scalar = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Scalar {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Scalar {
    Complex64::new(re, 0.0)
}

pub fn is_finite(z: Scalar) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn ensure_finite(z: Scalar) -> Result<Scalar> {
    if is_finite(z) {
        Ok(z)
    } else {
        Err(Error::NonFinite(format!("{z}")))
    }
}

/// `|a - b| / |b|`, or the absolute difference when `|b|` is below `1e-30`.
pub fn relative_residual(a: Scalar, b: Scalar) -> f64 {
    let d = (a - b).norm();
    let scale = b.norm();
    if scale > 1e-30 {
        d / scale
    } else {
        d
    }
}

/// `e^{2 pi i tau}`.
pub fn nome(tau: Scalar) -> Scalar {
    (2.0 * PI * I * tau).exp()
}

/// Parses `3`, `-2.5`, `0.15+0.1i`, `2i`, `-i`, `1e-3-4.5e2i`.
pub fn parse_complex(text: &str) -> Result<Scalar> {
    let s: String = text.chars().filter(|ch| !ch.is_whitespace()).collect();
    let bad = || Error::Invalid(format!("cannot parse complex literal {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(real).map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let ch = bytes[idx];
        if (ch == b'+' || ch == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            split = Some(idx);
            break;
        }
    }
    let parse_imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(idx) => {
            let re = body[..idx].parse::<f64>().map_err(|_| bad())?;
            let im = parse_imag(&body[idx..])?;
            Ok(c(re, im))
        }
        None => Ok(c(0.0, parse_imag(body)?)),
    }
}

pub fn format_complex(z: Scalar) -> String {
    if z.im >= 0.0 {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}{}i", z.re, z.im)
    }
}
