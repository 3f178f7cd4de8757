//! `resurgence`: verification suites, series exports and point evaluations.
//!
//! Exit status: 0 when every check passes, 1 when a check fails or a
//! computation errors, 2 on usage errors.

mod config;
mod eval;
mod export;
mod report;
mod suites;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Rational;

use config::{Config, Family, FamilyConfig};
use eval::{EvalInputs, EvalKind, SideArg};
use export::ExportKind;
use report::Report;
use suites::{Suite, SuiteOptions};

/// Environment variable holding the default precision in bits.
pub const PREC_ENV: &str = "RESURGENCE_PREC";

#[derive(Debug)]
pub struct UsageError(pub String);

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e.0)
    }
}

/// Input-shaped core errors are usage errors; the rest are failures.
pub fn core_error(e: resurgence::Error) -> CliError {
    use resurgence::Error as E;
    match e {
        E::InvalidConfig(_) | E::Domain(_) | E::SingularProximity { .. } | E::BranchAmbiguity(_) | E::NoRadialLimit(_) => {
            CliError::Usage(e.to_string())
        }
        E::Consistency(_) | E::Budget(_) => CliError::Failed(e.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(name = "resurgence", version, about = "Resurgence checks for partial theta series and their q-series")]
struct Cli {
    /// Working precision in bits [default: $RESURGENCE_PREC, else 128].
    #[arg(long, global = true)]
    prec: Option<u32>,
    /// Absolute tolerance of each check [default: 1e-8].
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    General,
    Chi,
    Hikami,
    #[value(name = "t3-2k")]
    T32k,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// JSON configuration file; replaces the family flags.
    #[arg(long, conflicts_with = "family")]
    config: Option<PathBuf>,
    /// Family of the theta series [default: general, trefoil parameters].
    #[arg(long, value_enum)]
    family: Option<FamilyKind>,
    /// Scale c as a rational (general, chi).
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Period M (general).
    #[arg(long = "modulus", visible_alias = "M")]
    modulus: Option<i64>,
    #[arg(long)]
    k1: Option<i64>,
    #[arg(long)]
    k2: Option<i64>,
    /// Shift a of the exponent (n^2 - a)/b (general).
    #[arg(long, allow_hyphen_values = true)]
    a: Option<i64>,
    /// Denominator b of the exponent (general).
    #[arg(long)]
    b: Option<i64>,
    #[arg(long)]
    s: Option<i64>,
    #[arg(long)]
    t: Option<i64>,
    #[arg(long)]
    n: Option<i64>,
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    u: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    /// Exponent k of T(3, 2^k) (t3-2k).
    #[arg(long)]
    k: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a verification suite and write a report.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[command(flatten)]
        family: FamilyArgs,
        /// Rational point j/N; repeat for several [default: per suite].
        #[arg(long, allow_hyphen_values = true)]
        alpha: Vec<String>,
        /// Point x of the discontinuity check (re,im); repeatable.
        #[arg(long, allow_hyphen_values = true)]
        x: Vec<String>,
        /// Point z of the period identity (re,im), lower half-plane; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        z: Vec<String>,
        /// Number of coefficients checked by coeffs and borel.
        #[arg(long, default_value_t = 12)]
        count: usize,
        /// Record wall time per check (breaks byte-identical reports).
        #[arg(long)]
        timings: bool,
    },
    /// Export series data as CSV or JSON.
    Export {
        #[arg(long, value_enum)]
        what: ExportKind,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Evaluate one quantity at one point.
    Eval {
        #[arg(long, value_enum)]
        what: EvalKind,
        #[command(flatten)]
        family: FamilyArgs,
        /// Point tau, p or x (re,im or re+imi).
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[arg(long, value_enum)]
        side: Option<SideArg>,
    },
}

fn required<T>(v: Option<T>, family: &str, flag: &str) -> Result<T, UsageError> {
    v.ok_or_else(|| UsageError(format!("family {family} needs --{flag}")))
}

impl FamilyArgs {
    fn load(&self) -> Result<(FamilyConfig, Option<Config>), UsageError> {
        if let Some(path) = &self.config {
            let c = Config::load(path)?;
            return Ok((c.family.clone(), Some(c)));
        }
        let fc = match self.family.unwrap_or(FamilyKind::General) {
            FamilyKind::General => FamilyConfig::General {
                c: self.c.clone().unwrap_or_else(|| "-1/2".into()),
                modulus: self.modulus.unwrap_or(12),
                k1: self.k1.unwrap_or(1),
                k2: self.k2.unwrap_or(5),
                a: self.a.unwrap_or(1),
                b: self.b.unwrap_or(24),
            },
            FamilyKind::Chi => FamilyConfig::Chi {
                s: required(self.s, "chi", "s")?,
                t: required(self.t, "chi", "t")?,
                n: required(self.n, "chi", "n")?,
                m: required(self.m, "chi", "m")?,
                c: self.c.clone().unwrap_or_else(|| "1".into()),
            },
            FamilyKind::Hikami => FamilyConfig::Hikami {
                u: required(self.u, "hikami", "u")?,
                l: self.l.unwrap_or(0),
            },
            FamilyKind::T32k => FamilyConfig::T32k {
                k: required(self.k, "t3-2k", "k")?,
            },
        };
        Ok((fc, None))
    }

    fn resolve(&self) -> Result<(Family, Option<Config>), UsageError> {
        let (fc, config) = self.load()?;
        Ok((fc.resolve()?, config))
    }
}

fn env_prec() -> Result<Option<u32>, UsageError> {
    match std::env::var(PREC_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| UsageError(format!("{PREC_ENV}={v} is not a bit count"))),
        Err(_) => Ok(None),
    }
}

/// Precision: flag, then config file, then the environment, then 128 bits.
fn context(cli: &Cli, config: Option<&Config>) -> Result<resurgence::PrecisionContext, UsageError> {
    let prec = cli.prec.or(config.and_then(|c| c.precision));
    let prec = match prec {
        Some(p) => Some(p),
        None => env_prec()?,
    };
    config::context(prec, cli.tol, config)
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match out {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::Failed(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

fn parse_alphas(raw: &[String]) -> Result<Option<Vec<Rational>>, UsageError> {
    if raw.is_empty() {
        return Ok(None);
    }
    let v = raw.iter().map(|s| config::parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
    if v.iter().any(|a| a.cmp0().is_eq()) {
        return Err(UsageError("alpha must be nonzero".into()));
    }
    Ok(Some(v))
}

fn parse_points(raw: &[String], prec: u32) -> Result<Option<Vec<resurgence::Cx>>, UsageError> {
    if raw.is_empty() {
        return Ok(None);
    }
    raw.iter().map(|s| eval::parse_complex(s, prec)).collect::<Result<Vec<_>, _>>().map(Some)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    match &cli.command {
        Command::Verify {
            suite,
            family,
            alpha,
            x,
            z,
            count,
            timings,
        } => {
            if *count == 0 {
                return Err(UsageError("--count must be at least 1".into()).into());
            }
            let (family, config) = family.resolve()?;
            let ctx = context(cli, config.as_ref())?;
            let opts = SuiteOptions {
                alphas: parse_alphas(alpha)?,
                xs: parse_points(x, ctx.prec)?,
                zs: parse_points(z, ctx.prec)?,
                count: *count,
                timings: *timings,
            };
            let (checks, skipped) = suites::run_suite(*suite, &family, &ctx, &opts)?;
            let report = Report::new(suite.name(), family.label(), ctx.prec, ctx.tol, checks, skipped);
            let mut w = writer(&cli.out)?;
            match cli.format {
                Format::Json => report.write_json(&mut w).map_err(io_err)?,
                Format::Csv => report.write_csv(&mut w).map_err(io_err)?,
            }
            w.flush().map_err(io_err)?;
            for line in report.summary_lines() {
                eprintln!("{line}");
            }
            Ok(report.all_pass())
        }
        Command::Export { what, family, count } => {
            let (family, config) = family.resolve()?;
            let ctx = context(cli, config.as_ref())?;
            let table = export::export(*what, &family, *count, &ctx)?;
            let mut w = writer(&cli.out)?;
            match cli.format {
                Format::Json => table.write_json(&mut w).map_err(io_err)?,
                Format::Csv => table.write_csv(&mut w).map_err(io_err)?,
            }
            w.flush().map_err(io_err)?;
            Ok(true)
        }
        Command::Eval {
            what,
            family,
            at,
            alpha,
            side,
        } => {
            let (family, config) = family.resolve()?;
            let ctx = context(cli, config.as_ref())?;
            let inputs = EvalInputs {
                at: at.as_deref().map(|s| eval::parse_complex(s, ctx.prec)).transpose()?,
                alpha: alpha.as_deref().map(config::parse_rational).transpose()?,
                side: *side,
            };
            let e = eval::evaluate(*what, &family, &inputs, &ctx)?;
            let mut w = writer(&cli.out)?;
            match cli.format {
                Format::Json => e.write_json(&mut w).map_err(io_err)?,
                Format::Csv => e.write_csv(&mut w).map_err(io_err)?,
            }
            w.flush().map_err(io_err)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
