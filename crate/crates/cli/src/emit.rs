//! Deterministic serialization of values and identity reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use qspectra_core::report::Status;
use qspectra_core::{IdentityReport, Scalar};
use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Plain,
}

/// A float written with 17 significant digits; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(format!("{:.16e}", self.0))
            .map_err(S::Error::custom)?
            .serialize(s)
    }
}

/// `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Complex {
    pub re: Num,
    pub im: Num,
}

impl From<Scalar> for Complex {
    fn from(z: Scalar) -> Self {
        Complex {
            re: Num(z.re),
            im: Num(z.im),
        }
    }
}

pub fn complex_list(values: &[Scalar]) -> Vec<Complex> {
    values.iter().map(|&v| v.into()).collect()
}

#[derive(Serialize)]
struct ReportOut<'a> {
    identity: &'a str,
    params: &'a BTreeMap<String, String>,
    lhs: Complex,
    rhs: Complex,
    residual: Num,
    tail_bound: Num,
    tolerance: Num,
    truncation: &'a BTreeMap<String, u64>,
    pass: bool,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

impl<'a> From<&'a IdentityReport> for ReportOut<'a> {
    fn from(r: &'a IdentityReport) -> Self {
        ReportOut {
            identity: &r.identity,
            params: &r.params,
            lhs: r.lhs.into(),
            rhs: r.rhs.into(),
            residual: Num(r.residual),
            tail_bound: Num(r.tail_bound),
            tolerance: Num(r.tolerance),
            truncation: &r.truncation,
            pass: r.pass,
            status: r.status,
            note: r.note.as_deref(),
        }
    }
}

/// Reports as a JSON value fragment (used inside larger documents).
pub fn reports_json(reports: &[IdentityReport]) -> Box<RawValue> {
    let out: Vec<ReportOut> = reports.iter().map(ReportOut::from).collect();
    to_raw(&out)
}

pub fn to_raw<T: Serialize>(value: &T) -> Box<RawValue> {
    let text = serde_json::to_string(value).expect("serializable value");
    RawValue::from_string(text).expect("valid json")
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    // serde_json's pretty printer would reparse and shorten the floats
    pretty_raw(&serde_json::to_string(value).expect("serializable value"))
}

/// Indents compact JSON without touching number literals.
fn pretty_raw(compact: &str) -> String {
    let mut out = String::with_capacity(compact.len() * 2);
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    let mut chars = compact.chars().peekable();
    let newline = |out: &mut String, depth: usize| {
        out.push('\n');
        for _ in 0..depth {
            out.push_str("  ");
        }
    };
    while let Some(ch) = chars.next() {
        if in_string {
            out.push(ch);
            if escaped {
                escaped = false;
            } else if ch == '\\' {
                escaped = true;
            } else if ch == '"' {
                in_string = false;
            }
            continue;
        }
        match ch {
            '"' => {
                in_string = true;
                out.push(ch);
            }
            '{' | '[' => {
                out.push(ch);
                let close = if ch == '{' { '}' } else { ']' };
                if chars.peek() == Some(&close) {
                    out.push(chars.next().unwrap());
                } else {
                    depth += 1;
                    newline(&mut out, depth);
                }
            }
            '}' | ']' => {
                depth -= 1;
                newline(&mut out, depth);
                out.push(ch);
            }
            ',' => {
                out.push(ch);
                newline(&mut out, depth);
            }
            ':' => out.push_str(": "),
            _ => out.push(ch),
        }
    }
    out.push('\n');
    out
}

/// One row of a coefficient table.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub exponents: Vec<u32>,
    pub value: Scalar,
}

fn exponents_text(e: &[u32]) -> String {
    e.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn number_text(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".into()
    }
}

pub fn rows_csv(rows: &[Row]) -> String {
    let mut out = String::from("exponents,re,im\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", exponents_text(&r.exponents), number_text(r.value.re), number_text(r.value.im));
    }
    out
}

pub fn reports_csv(reports: &[IdentityReport]) -> String {
    let mut out = String::from("identity,status,residual,tail_bound,lhs_re,lhs_im,rhs_re,rhs_im\n");
    for r in reports {
        let status = serde_json::to_value(r.status).expect("status").as_str().unwrap_or("").to_string();
        let _ = writeln!(
            out,
            "\"{}\",{},{},{},{},{},{},{}",
            r.identity.replace('"', "\"\""),
            status,
            number_text(r.residual),
            number_text(r.tail_bound),
            number_text(r.lhs.re),
            number_text(r.lhs.im),
            number_text(r.rhs.re),
            number_text(r.rhs.im)
        );
    }
    out
}

fn aligned(header: &[&str], body: Vec<Vec<String>>) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let text: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", text.join("  ").trim_end());
    };
    line(header.to_vec(), &mut out);
    for row in &body {
        line(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

pub fn rows_plain(rows: &[Row]) -> String {
    let body = rows
        .iter()
        .map(|r| vec![exponents_text(&r.exponents), format!("{:.12e}", r.value.re), format!("{:.12e}", r.value.im)])
        .collect();
    aligned(&["exponents", "re", "im"], body)
}

pub fn reports_plain(reports: &[IdentityReport]) -> String {
    let body = reports
        .iter()
        .map(|r| {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::DomainFailure => "DOMAIN",
            };
            let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            vec![
                r.identity.clone(),
                status.to_string(),
                format!("{:.3e}", r.residual),
                format!("{:.3e}", r.tail_bound),
                params.join(" "),
            ]
        })
        .collect();
    aligned(&["identity", "status", "residual", "tail", "params"], body)
}

/// What a command produced: a JSON document, an optional coefficient table,
/// and any identity reports (which decide the exit status).
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub json: String,
    pub rows: Vec<Row>,
    pub reports: Vec<IdentityReport>,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json.clone(),
            Format::Csv if !self.rows.is_empty() || self.reports.is_empty() => rows_csv(&self.rows),
            Format::Csv => reports_csv(&self.reports),
            Format::Plain if !self.rows.is_empty() => rows_plain(&self.rows),
            Format::Plain if !self.reports.is_empty() => reports_plain(&self.reports),
            Format::Plain => self.json.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qspectra_core::scalar::{c, real};

    #[test]
    fn seventeen_digits() {
        let text = serde_json::to_string(&Complex::from(c(0.1, -2.0))).unwrap();
        assert_eq!(text, r#"{"re":1.0000000000000001e-1,"im":-2.0000000000000000e0}"#);
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["re"].as_f64().unwrap(), 0.1);
        assert_eq!(serde_json::to_string(&Num(f64::NAN)).unwrap(), "null");
    }

    #[test]
    fn report_key_order_is_stable() {
        let r = IdentityReport::compare("x", real(1.0), real(1.0), 0.0, 1e-7).param("b", 2).param("a", 1);
        let text = to_pretty(&[ReportOut::from(&r)]);
        let a = text.find("\"a\"").unwrap();
        let b = text.find("\"b\"").unwrap();
        assert!(a < b);
        assert!(text.find("\"identity\"").unwrap() < text.find("\"params\"").unwrap());
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed[0]["pass"], serde_json::Value::Bool(true));
    }

    #[test]
    fn tables() {
        let rows = vec![Row {
            exponents: vec![1, 0],
            value: c(2.0, 0.5),
        }];
        let csv = rows_csv(&rows);
        assert!(csv.starts_with("exponents,re,im\n1 0,2.0000000000000000e0,5.0000000000000000e-1"));
        assert!(rows_plain(&rows).contains("exponents"));
    }
}
