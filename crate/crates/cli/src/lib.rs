//! Command-line front end for `qspectra-core` and the identity suite.

pub mod args;
pub mod commands;
pub mod emit;
pub mod suite;

use std::fs;

use qspectra_core::scalar::parse_complex;
use qspectra_core::spectral::SpectralParams;
use qspectra_core::{Error, IdentityReport, Status};

use args::{Cli, Command, CsCommand, GlobalOpts, SuiteArgs};
use emit::{reports_json, to_pretty, Format, Output};
use suite::{defaults, ConfigFile, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(Error),
    #[error("{0}")]
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Invalid(_) | Error::ZeroTarget | Error::InsufficientInput { .. } | Error::WeightMismatch(..) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self, strict: bool) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(Error::Domain(_) | Error::Branch(_) | Error::Pole(_) | Error::SpectralZero { .. })
                if strict =>
            {
                EXIT_DOMAIN
            }
            _ => EXIT_FAIL,
        }
    }
}

/// Global options resolved against the defaults.
#[derive(Debug, Clone)]
pub struct Settings {
    pub nome: SpectralParams,
    pub tolerance: f64,
    pub modularity_tolerance: f64,
    pub order: u32,
    pub seed: u64,
    pub format: Format,
    pub strict: bool,
}

fn check_precision(p: Option<&str>) -> Result<(), CliError> {
    match p {
        None => Ok(()),
        Some(v) if matches!(v.to_ascii_lowercase().as_str(), "f64" | "double" | "binary64") => Ok(()),
        Some(v) => Err(CliError::Usage(format!(
            "precision {v:?} is not available; this build evaluates in binary64 (f64) only"
        ))),
    }
}

fn nome_from(g: &GlobalOpts, fallback: Option<&str>) -> Result<SpectralParams, CliError> {
    let usage = |e: Error| CliError::Usage(e.to_string());
    if let Some(q) = g.q.as_deref().or(if g.theta.is_none() && g.alpha.is_none() { fallback } else { None }) {
        return SpectralParams::from_nome(parse_complex(q).map_err(usage)?).map_err(usage);
    }
    if let Some(t) = &g.theta {
        return SpectralParams::from_theta(parse_complex(t).map_err(usage)?).map_err(usage);
    }
    if let (Some(a), Some(b)) = (g.alpha, g.beta) {
        return SpectralParams::from_alpha_beta(a, b).map_err(usage);
    }
    SpectralParams::from_nome(defaults::NOME).map_err(usage)
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{name} must be a positive number, got {v}")))
    }
}

impl Settings {
    pub fn from_globals(g: &GlobalOpts) -> Result<Self, CliError> {
        check_precision(g.precision.as_deref())?;
        let order = g.order.unwrap_or(defaults::ORDER);
        if order == 0 {
            return Err(CliError::Usage("--order must be positive".into()));
        }
        Ok(Settings {
            nome: nome_from(g, None)?,
            tolerance: positive("--tol", g.tol.unwrap_or(defaults::TOLERANCE))?,
            modularity_tolerance: defaults::MODULARITY_TOLERANCE.max(g.tol.unwrap_or(0.0)),
            order,
            seed: g.seed.unwrap_or(defaults::SEED),
            format: g.format.unwrap_or_default(),
            strict: g.strict,
        })
    }
}

/// Suite configuration: defaults, then the config file, then explicit flags.
pub fn suite_config(g: &GlobalOpts, args: &SuiteArgs) -> Result<SuiteConfig, CliError> {
    let mut cfg = SuiteConfig::default();
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            ConfigFile::parse(&text, &path.to_string_lossy()).map_err(CliError::Usage)?
        }
        None => ConfigFile::default(),
    };
    check_precision(g.precision.as_deref().or(file.precision.as_deref()))?;
    cfg.nome = nome_from(g, file.q.as_deref())?;
    if let Some(t) = g.tol.or(file.tolerance) {
        cfg.tolerance = t;
    }
    if let Some(t) = file.modularity_tolerance {
        cfg.modularity_tolerance = t;
    }
    cfg.order = g.order.or(file.order).unwrap_or(cfg.order);
    cfg.max_levels = file.max_levels.unwrap_or(cfg.max_levels);
    cfg.seed = g.seed.or(file.seed).unwrap_or(cfg.seed);
    cfg.identities = if args.all {
        Vec::new()
    } else if !args.identity.is_empty() {
        args.identity.clone()
    } else {
        file.identities.unwrap_or_default()
    };
    cfg.m = args.m.or(file.m);
    cfg.output = args.output.clone().or(file.output);
    cfg.parallel = args.parallel || file.parallel.unwrap_or(false);
    cfg.validate().map_err(CliError::Usage)?;
    Ok(cfg)
}

/// Exit status implied by a set of reports.
pub fn reports_exit_code(reports: &[IdentityReport], strict: bool) -> i32 {
    if reports.iter().any(|r| r.status == Status::Fail) {
        EXIT_FAIL
    } else if strict && reports.iter().any(|r| r.status == Status::DomainFailure) {
        EXIT_DOMAIN
    } else {
        EXIT_OK
    }
}

/// Result of one invocation: text for stdout (or the output file) and an exit code.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub output_path: Option<std::path::PathBuf>,
    pub reports: Vec<IdentityReport>,
    pub exit_code: i32,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let strict = cli.global.strict;
    if let Command::Suite(args) = &cli.command {
        let cfg = suite_config(&cli.global, args)?;
        let reports = suite::run_suite(&cfg);
        let out = Output {
            json: to_pretty(&reports_json(&reports)),
            rows: Vec::new(),
            reports,
        };
        let text = out.render(cli.global.format.unwrap_or_default());
        return Ok(Outcome {
            text,
            output_path: cfg.output,
            exit_code: reports_exit_code(&out.reports, strict),
            reports: out.reports,
        });
    }
    let settings = Settings::from_globals(&cli.global)?;
    let out = match &cli.command {
        Command::Partitions(a) => commands::partitions(a)?,
        Command::Bell(a) => commands::bell(a)?,
        Command::Prodexp(a) => commands::prodexp(a, &settings)?,
        Command::Zeta(a) => commands::zeta(a, &settings)?,
        Command::RuelleCheck(a) => commands::ruelle_check(a, &settings)?,
        Command::Elliptic(a) => commands::elliptic(a, &settings)?,
        Command::Check(a) => commands::check(a, &settings)?,
        Command::Chars(a) => commands::chars(a)?,
        Command::Schur(a) => commands::schur(a, &settings)?,
        Command::Cs { command } => match command {
            CsCommand::Partition(a) => commands::cs_partition(a, &settings)?,
            CsCommand::Lmov(a) => commands::cs_lmov(a, &settings)?,
        },
        Command::Suite(_) => unreachable!("handled above"),
    };
    Ok(Outcome {
        text: out.render(settings.format),
        output_path: None,
        exit_code: reports_exit_code(&out.reports, strict),
        reports: out.reports,
    })
}
