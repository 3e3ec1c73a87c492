//! Structured outcome of a single identity check.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::scalar::{relative_residual, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Parameters outside the region where both sides are defined.
    DomainFailure,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub params: BTreeMap<String, String>,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub residual: f64,
    pub truncation: BTreeMap<String, u64>,
    pub tail_bound: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl IdentityReport {
    /// Compares `lhs` against `rhs`; passes when the residual is below `tol`
    /// and the tail bound below `tol / 10`.
    pub fn compare(identity: &str, lhs: Scalar, rhs: Scalar, tail_bound: f64, tol: f64) -> Self {
        let residual = relative_residual(lhs, rhs);
        Self::with_residual(identity, lhs, rhs, residual, tail_bound, tol)
    }

    pub fn with_residual(
        identity: &str,
        lhs: Scalar,
        rhs: Scalar,
        residual: f64,
        tail_bound: f64,
        tol: f64,
    ) -> Self {
        let pass = residual.is_finite() && residual < tol && tail_bound < tol / 10.0;
        IdentityReport {
            identity: identity.to_string(),
            params: BTreeMap::new(),
            lhs,
            rhs,
            residual,
            truncation: BTreeMap::new(),
            tail_bound,
            tolerance: tol,
            pass,
            status: if pass { Status::Pass } else { Status::Fail },
            note: None,
        }
    }

    pub fn domain_failure(identity: &str, reason: impl Into<String>, tol: f64) -> Self {
        IdentityReport {
            identity: identity.to_string(),
            params: BTreeMap::new(),
            lhs: Scalar::new(f64::NAN, f64::NAN),
            rhs: Scalar::new(f64::NAN, f64::NAN),
            residual: f64::NAN,
            truncation: BTreeMap::new(),
            tail_bound: f64::NAN,
            tolerance: tol,
            pass: false,
            status: Status::DomainFailure,
            note: Some(reason.into()),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn truncated(mut self, key: &str, n: u64) -> Self {
        self.truncation.insert(key.to_string(), n);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.note = Some(text.into());
        self
    }

    pub fn is_domain_failure(&self) -> bool {
        self.status == Status::DomainFailure
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;

    #[test]
    fn pass_requires_small_tail() {
        let r = IdentityReport::compare("x", real(1.0), real(1.0), 1e-9, 1e-7);
        assert!(r.pass);
        let r = IdentityReport::compare("x", real(1.0), real(1.0), 1e-8, 1e-7);
        assert!(!r.pass);
        assert_eq!(r.status, Status::Fail);
        let r = IdentityReport::compare("x", real(1.0), real(1.1), 0.0, 1e-7);
        assert!(!r.pass);
    }

    #[test]
    fn domain_failure_never_passes() {
        let r = IdentityReport::domain_failure("x", "nome on the unit circle", 1e-7);
        assert!(!r.pass);
        assert!(r.is_domain_failure());
    }
}
