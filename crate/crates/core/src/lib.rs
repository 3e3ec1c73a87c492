//! Truncated q-series, multipartite partition generating functions, Bell
//! polynomials, Ruelle-type spectral products, elliptic gamma functions,
//! symmetric functions and Chern-Simons style generating series.
//!
//! Most quantities can be computed along two independent routes (a truncated
//! product, an exponentiated series, a ratio of spectral functions); the
//! checks in this crate compare those routes and report the residual.

pub mod bell;
pub mod csgen;
pub mod error;
pub mod hierarchy;
pub mod multipartite;
pub mod report;
pub mod scalar;
pub mod series;
pub mod spectral;
pub mod symmfunc;

pub use error::{Error, Result};
pub use report::{IdentityReport, Status};
pub use scalar::Scalar;
pub use series::TruncatedSeries;
