//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::emit::Format;

#[derive(Debug, Parser)]
#[command(name = "qspectra", version, about = "Evaluate and cross-check q-series, spectral and elliptic product identities")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand. Unset values fall back to the suite defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalOpts {
    /// Nome q, as a complex literal such as 0.2 or 0.15+0.1i
    #[arg(long, global = true, allow_hyphen_values = true, conflicts_with_all = ["theta", "alpha", "beta"])]
    pub q: Option<String>,
    /// Modular parameter theta with q = exp(2 pi i theta)
    #[arg(long, global = true, allow_hyphen_values = true, conflicts_with_all = ["alpha", "beta"])]
    pub theta: Option<String>,
    /// alpha = 2 pi Im theta (with --beta)
    #[arg(long, global = true, allow_hyphen_values = true, requires = "beta")]
    pub alpha: Option<f64>,
    /// beta = 2 pi Re theta (with --alpha)
    #[arg(long, global = true, allow_hyphen_values = true, requires = "alpha")]
    pub beta: Option<f64>,
    /// Truncation order of series output
    #[arg(long, global = true)]
    pub order: Option<u32>,
    /// Identity tolerance
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    /// Scalar class; only binary64 is available
    #[arg(long, global = true, env = "QSPECTRA_PRECISION")]
    pub precision: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized checks
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Exit with status 3 when a check is outside its domain
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count multipartite partitions of a target vector
    Partitions(PartitionsArgs),
    /// Complete Bell polynomials Y_0..Y_n
    Bell(BellArgs),
    /// Coefficients of prod_k (1 - q^k)^(-a_k)
    Prodexp(ProdexpArgs),
    /// Patterson-Selberg zeta function, product and log-series forms
    Zeta(ZetaArgs),
    /// Single-nome product identities against Ruelle functions
    RuelleCheck(RuelleArgs),
    /// Elliptic gamma functions
    Elliptic(EllipticArgs),
    /// Jackson products, elliptic gamma identities and the Bernoulli kernel
    Check(CheckArgs),
    /// Character table of the symmetric group
    Chars(CharsArgs),
    /// Schur polynomial through characters and tableaux
    Schur(SchurArgs),
    /// Chern-Simons partition functions and product forms
    Cs {
        #[command(subcommand)]
        command: CsCommand,
    },
    /// Run the identity battery
    Suite(SuiteArgs),
}

#[derive(Debug, Args)]
pub struct PartitionsArgs {
    /// Number of components; must match the target length when given
    #[arg(long)]
    pub m: Option<usize>,
    /// Target vector, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub target: Vec<u32>,
    /// Count partitions into distinct parts
    #[arg(long)]
    pub distinct: bool,
    /// List the partitions themselves
    #[arg(long)]
    pub witnesses: bool,
}

#[derive(Debug, Args)]
pub struct BellArgs {
    #[arg(long)]
    pub n: usize,
    /// Inputs g_1..g_n, comma separated complex literals
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub g: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ProdexpArgs {
    /// Exponents a_1, a_2, ..., comma separated complex literals
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub a: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ZetaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub s: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuelleIdentity {
    R1,
    R2,
    #[value(name = "RU1")]
    Ru1,
    #[value(name = "RU2")]
    Ru2,
    Beta,
    #[value(name = "DE3")]
    De3,
    F1,
    G1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Diagonal,
    DistinctPowers,
    Both,
}

#[derive(Debug, Args)]
pub struct RuelleArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub identity: RuelleIdentity,
    /// Step a of q^(an + epsilon)
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub epsilon: String,
    /// First index of the product
    #[arg(long, default_value_t = 1)]
    pub ell: u32,
    /// Weight of the weighted identities; integer shift b for DE3
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    /// Generating-function variable; integer shift z for DE3
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, value_enum, default_value = "both")]
    pub convention: ConventionArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EllipticFn {
    Gamma1,
    Gamma2,
}

#[derive(Debug, Args)]
pub struct EllipticArgs {
    #[arg(long = "fn", value_enum)]
    pub function: EllipticFn,
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    /// Second nome
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Third nome (gamma2)
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckIdentity {
    G1,
    G21,
    G22,
    #[value(name = "gamma1-reflection")]
    Gamma1Reflection,
    #[value(name = "gamma1-qq")]
    Gamma1Qq,
    #[value(name = "gamma2-qqq")]
    Gamma2Qqq,
    #[value(name = "gamma2-modularity")]
    Gamma2Modularity,
    B44,
    Hierarchy,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub identity: CheckIdentity,
    #[arg(long, default_value = "0.3", allow_hyphen_values = true)]
    pub z: String,
    /// Second nome
    #[arg(long, default_value = "0.25", allow_hyphen_values = true)]
    pub p: String,
    /// Periods of the modular relation and the kernel
    #[arg(long = "a", default_value = "0.3+1i", allow_hyphen_values = true)]
    pub period_a: String,
    #[arg(long = "b", default_value = "-0.2+0.9i", allow_hyphen_values = true)]
    pub period_b: String,
    #[arg(long = "c", default_value = "0.1+1.2i", allow_hyphen_values = true)]
    pub period_c: String,
    /// Depth of the factorized hierarchy
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Require every derived period in the upper half plane
    #[arg(long)]
    pub no_reflection: bool,
}

#[derive(Debug, Args)]
pub struct CharsArgs {
    #[arg(long)]
    pub n: u32,
}

#[derive(Debug, Args)]
pub struct SchurArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub shape: Vec<u32>,
    #[arg(long, default_value_t = 3)]
    pub vars: usize,
    /// Apply the Adams operation of this degree
    #[arg(long, default_value_t = 1)]
    pub adams: u32,
}

#[derive(Debug, Subcommand)]
pub enum CsCommand {
    /// Partition function and free energy from colored invariants
    Partition(CsPartitionArgs),
    /// Product form from an integer invariant table
    Lmov(CsLmovArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Schur,
    Powersum,
    Both,
}

#[derive(Debug, Args)]
pub struct CsPartitionArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub basis: BasisArg,
    /// Letters per component, comma separated (default 2 each)
    #[arg(long, value_delimiter = ',')]
    pub letters: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct CsLmovArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    pub t: String,
    #[arg(long, value_delimiter = ',')]
    pub letters: Vec<usize>,
    /// Take bracket indices as unordered selections
    #[arg(long)]
    pub unordered: bool,
    #[arg(long)]
    pub max_levels: Option<u32>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Run every check
    #[arg(long, conflicts_with = "identity")]
    pub all: bool,
    /// Group name or identity label; repeatable
    #[arg(long)]
    pub identity: Vec<String>,
    /// TOML or JSON configuration; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Fan the groups out over worker threads
    #[arg(long)]
    pub parallel: bool,
    /// Restrict convention-dependent checks to one dimension
    #[arg(long)]
    pub m: Option<u32>,
}
