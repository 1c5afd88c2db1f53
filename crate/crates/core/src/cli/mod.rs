//! The `fpt-height` command line.
//!
//! Exit codes: 0 on success, 1 on a domain error (a violated precondition),
//! 2 on a usage error. Output is deterministic for fixed arguments; per-prime
//! work runs on a pool of `--threads` workers and is assembled in prime order.
//!
//! Settings can also come from a file named by `FPTH_CONFIG`, holding
//! `key=value` lines whose keys are the long global flags (`format`, `out`,
//! `threads`, `override-theorem-range`, `attest-general-position`). Flags
//! given on the command line take precedence.

mod commands;
mod report;
mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use report::{Format, Report};
pub use verify::{verify_rows, VerifyRow};

use crate::arith::{is_prime, primes_between};

/// Environment variable naming the optional configuration file.
pub const CONFIG_ENV: &str = "FPTH_CONFIG";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 1,
        }
    }
}

macro_rules! domain_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        }
    )*};
}

domain_errors!(
    crate::poly::PolyError,
    crate::frobenius::FrobeniusError,
    crate::stienstra::StienstraError,
    crate::formalgroup::SeriesError,
    crate::delsarte::DelsarteError,
    crate::singularity::SingularityError
);

#[derive(Debug, Parser)]
#[command(
    name = "fpt-height",
    version,
    about = "F-pure thresholds and formal-group heights of quasi-homogeneous polynomials"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for per-prime tasks.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Compute results for primes below the proven range, or past failed
    /// admissibility conditions, and label them.
    #[arg(long, global = true)]
    override_theorem_range: bool,
    /// Record that the hypersurface is in general position relative to the
    /// singular locus of the weighted projective space.
    #[arg(long, global = true)]
    attest_general_position: bool,
    #[command(subcommand)]
    command: Command,
}

/// The polynomial and its grading.
#[derive(Debug, Clone, Args)]
pub(crate) struct PolyArgs {
    /// Polynomial, e.g. "x^2+y^5+z^5+w^10".
    #[arg(long)]
    pub poly: String,
    /// Comma-separated weights in variable order (default: all 1).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<u64>>,
    /// Comma-separated variable order (default: order of first appearance).
    #[arg(long, value_delimiter = ',')]
    pub vars: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Builtin {
    Additive,
    Multiplicative,
    Honda,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// μ_f(p^e) = min{n : f^n ∈ m^[p^e]}.
    Mu {
        #[command(flatten)]
        poly: PolyArgs,
        /// A prime, a comma-separated list, or a range "a..b".
        #[arg(long, alias = "primes")]
        prime: String,
        /// e in q = p^e.
        #[arg(long, default_value_t = 1)]
        exp: u32,
    },
    /// F-pure threshold: exact when inferable, otherwise a bracket.
    Fpt {
        #[command(flatten)]
        poly: PolyArgs,
        /// A prime, a comma-separated list, or a range "a..b".
        #[arg(long, alias = "primes")]
        prime: String,
        /// Report the bracket at q = p^exp instead of inferring.
        #[arg(long)]
        exp: Option<u32>,
    },
    /// Log canonical threshold w/d (or 1 when d < w).
    Lct {
        /// Comma-separated weights.
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<u64>,
        /// Weighted degree d.
        #[arg(long, required_unless_present = "poly")]
        degree: Option<u64>,
        /// Read the degree off this polynomial.
        #[arg(long)]
        poly: Option<String>,
    },
    /// Logarithm coefficients, or the height-one test at given primes.
    Stienstra {
        #[command(flatten)]
        poly: PolyArgs,
        /// Run the height-one test at these primes instead of printing coefficients.
        #[arg(long, alias = "primes")]
        prime: Option<String>,
        /// Largest m in the coefficient table (default 1 + 3d).
        #[arg(long)]
        m_max: Option<u64>,
        /// Reduce table entries modulo this prime.
        #[arg(long)]
        modulus: Option<u64>,
    },
    /// Height of a formal group from its logarithm via the [p]-series.
    FgHeight {
        /// File of "m b_{m-1}" lines.
        #[arg(long, group = "source")]
        log_file: Option<PathBuf>,
        /// A built-in logarithm.
        #[arg(long, value_enum, group = "source")]
        builtin: Option<Builtin>,
        /// Use the logarithm of the Artin–Mazur formal group of this polynomial (d = w).
        #[arg(long, group = "source", requires = "weights")]
        poly: Option<String>,
        /// Comma-separated weights for --poly.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<u64>>,
        /// Comma-separated variable order.
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
        /// A prime, a comma-separated list, or a range "a..b".
        #[arg(long, alias = "primes")]
        prime: String,
        /// Heights above this are reported as inf; precision is p^h_max.
        #[arg(long, default_value_t = 2)]
        h_max: u32,
    },
    /// e_A and heights of a weighted Delsarte surface.
    Delsarte {
        /// A polynomial with one monomial per variable, all with coefficient 1.
        #[arg(long, required_unless_present = "matrix", conflicts_with = "matrix")]
        poly: Option<String>,
        /// Exponent matrix as JSON rows or "a,b;c,d".
        #[arg(long)]
        matrix: Option<String>,
        /// Comma-separated weights.
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<u64>,
        /// Comma-separated variable order.
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
        /// A prime, a comma-separated list, or a range "a..b".
        #[arg(long, alias = "primes")]
        prime: String,
        /// Also require p ∤ a_ij for zero entries.
        #[arg(long)]
        strict: bool,
    },
    /// Whether √J(f) = (x_0, ..., x_N).
    SingularCheck {
        #[command(flatten)]
        poly: PolyArgs,
        /// 0 for the rationals, or a prime.
        #[arg(long = "char", default_value_t = 0)]
        characteristic: u64,
        /// Largest power tried per variable (default (N+1)·d).
        #[arg(long)]
        k_max: Option<u32>,
    },
    /// μ, fpt and heights side by side, with a consistency verdict per prime.
    Verify {
        #[command(flatten)]
        poly: PolyArgs,
        /// A prime, a comma-separated list, or a range "a..b".
        #[arg(long, alias = "primes")]
        prime: String,
    },
}

/// Global settings after merging the configuration file and flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: usize,
    pub override_range: bool,
    pub attest_general_position: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            format: Format::Table,
            out: None,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            override_range: false,
            attest_general_position: false,
        }
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::Usage(format!(
            "config key `{key}` expects true or false, got `{v}`"
        ))),
    }
}

/// Applies `key=value` lines on top of `base`.
pub fn apply_config_text(base: RunConfig, text: &str) -> Result<RunConfig, CliError> {
    let mut cfg = base;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected key=value",
                n + 1
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "format" => cfg.format = value.parse()?,
            "out" => cfg.out = Some(PathBuf::from(value)),
            "threads" => {
                cfg.threads = value.parse().map_err(|_| {
                    CliError::Usage(format!(
                        "config key `threads` expects a positive integer, got `{value}`"
                    ))
                })?
            }
            "override-theorem-range" => cfg.override_range = parse_bool(key, value)?,
            "attest-general-position" => cfg.attest_general_position = parse_bool(key, value)?,
            other => {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key `{other}`",
                    n + 1
                )))
            }
        }
    }
    Ok(cfg)
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = std::env::var_os(CONFIG_ENV) {
        let text = std::fs::read_to_string(&path).map_err(|e| {
            CliError::Usage(format!(
                "cannot read config file {}: {e}",
                PathBuf::from(&path).display()
            ))
        })?;
        cfg = apply_config_text(cfg, &text)?;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    cfg.override_range |= cli.override_theorem_range;
    cfg.attest_general_position |= cli.attest_general_position;
    if cfg.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    Ok(cfg)
}

/// Primes from "p", "p1,p2,...", or an inclusive range "a..b" (filtered to primes).
pub fn parse_primes(text: &str) -> Result<Vec<u64>, CliError> {
    let t = text.trim();
    let num = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("`{}` is not a non-negative integer", s.trim())))
    };
    let primes = if let Some((a, b)) = t.split_once("..") {
        primes_between(num(a)?, num(b)?)
    } else {
        let list = t.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
        if let Some(bad) = list.iter().find(|&&p| !is_prime(p)) {
            return Err(CliError::Domain(format!("{bad} is not a prime")));
        }
        list
    };
    if primes.is_empty() {
        return Err(CliError::Usage(format!("no primes in `{t}`")));
    }
    Ok(primes)
}

/// Runs the command line and returns the exit code, writing to the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// As [`run`], with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok((cfg, text, warnings)) => {
            for w in warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let written = match &cfg.out {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
                None => out
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::Io(e.to_string())),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Diagnostics that accompany a successful run.
pub(crate) type Warnings = Vec<String>;

fn execute(cli: &Cli) -> Result<(RunConfig, String, Warnings), CliError> {
    let cfg = resolve_config(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let mut warnings = Warnings::new();
    let report = pool.install(|| dispatch(&cli.command, &cfg, &mut warnings))?;
    let text = report.render(cfg.format)?;
    Ok((cfg, text, warnings))
}

fn dispatch(cmd: &Command, cfg: &RunConfig, warnings: &mut Warnings) -> Result<Report, CliError> {
    use commands as c;
    match cmd {
        Command::Mu { poly, prime, exp } => c::mu(poly, &parse_primes(prime)?, *exp),
        Command::Fpt { poly, prime, exp } => c::fpt(poly, &parse_primes(prime)?, *exp, cfg),
        Command::Lct {
            weights,
            degree,
            poly,
        } => c::lct(weights, *degree, poly.as_deref()),
        Command::Stienstra {
            poly,
            prime,
            m_max,
            modulus,
        } => match prime {
            Some(list) => c::stienstra_height(poly, &parse_primes(list)?),
            None => c::stienstra_table(poly, *m_max, *modulus),
        },
        Command::FgHeight {
            log_file,
            builtin,
            poly,
            weights,
            vars,
            prime,
            h_max,
        } => {
            let source = match (log_file, builtin, poly) {
                (Some(path), _, _) => c::LogSource::File(path.clone()),
                (_, Some(b), _) => c::LogSource::Builtin(*b),
                (_, _, Some(text)) => c::LogSource::Poly(PolyArgs {
                    poly: text.clone(),
                    weights: weights.clone(),
                    vars: vars.clone(),
                }),
                _ => {
                    return Err(CliError::Usage(
                        "give one of --log-file, --builtin or --poly".into(),
                    ))
                }
            };
            c::fg_height(&source, &parse_primes(prime)?, *h_max)
        }
        Command::Delsarte {
            poly,
            matrix,
            weights,
            vars,
            prime,
            strict,
        } => {
            let source = match (poly, matrix) {
                (Some(p), _) => c::MatrixSource::Poly(p.clone(), vars.clone()),
                (None, Some(m)) => c::MatrixSource::Matrix(m.clone()),
                (None, None) => return Err(CliError::Usage("give --poly or --matrix".into())),
            };
            c::delsarte(
                &source,
                weights,
                &parse_primes(prime)?,
                *strict,
                cfg,
                warnings,
            )
        }
        Command::SingularCheck {
            poly,
            characteristic,
            k_max,
        } => c::singular_check(poly, *characteristic, *k_max, cfg),
        Command::Verify { poly, prime } => {
            verify::verify(poly, &parse_primes(prime)?, cfg, warnings)
        }
    }
}
