use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable sets differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },
    #[error("truncation orders differ: {left} vs {right}")]
    OrderMismatch { left: u32, right: u32 },
    #[error("exp requires a zero constant term, got {0}")]
    NonZeroConstant(String),
    #[error("{0} requires a nonzero constant term")]
    ZeroConstant(&'static str),
    #[error("non-finite coefficient {0}")]
    NonFinite(String),
    #[error("unsupported series shape: {0}")]
    Shape(String),
    #[error("multipartite target must have a positive entry")]
    ZeroTarget,
    #[error("need at least {needed} inputs, got {got}")]
    InsufficientInput { needed: usize, got: usize },
    #[error("product or series does not converge: {0}")]
    NonConvergent(String),
    #[error("outside the domain of the identity: {0}")]
    Domain(String),
    #[error("denominator hit a zero of the spectral product at (n, k1, k2) = ({n}, {k1}, {k2})")]
    SpectralZero { n: i64, k1: u32, k2: u32 },
    #[error("pole: denominator factor {0:e} below threshold")]
    Pole(f64),
    #[error("logarithm branch failed for {0}")]
    Branch(String),
    #[error("weight mismatch: {0} vs {1}")]
    WeightMismatch(u32, u32),
    #[error("missing table entry {0}")]
    MissingEntry(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
