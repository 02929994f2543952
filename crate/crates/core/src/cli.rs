//! Command-line front end.
//!
//! Every subcommand builds a [`Report`] (a header plus typed rows) which is
//! then rendered as CSV, JSON or an aligned text table. Rendering is a pure
//! function of the rows, and rows come out in input order even when the
//! evaluation runs in parallel, so the same [`RunConfig`] always yields the
//! same bytes. The one exception is the `elapsed_ns` column, which is only
//! measured when `--timing` is given and is 0 otherwise.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, ZetaError};
use crate::kernel::{
    euler_factor, explicit_exclusion_points, in_exclusion_set, prime_power_term, singular_points,
    ComplexValue, ExclusionPoint, DEFAULT_SINGULAR_TOL,
};
use crate::methods::{
    converge, euler_partial, induction_step_check, prepare_eval, reform_partial, zeta_eval_in,
    Budget, EvalOptions, Method, Summation, TruncationSpec, MIN_EVAL_TOLERANCE,
};
use crate::oracle::{coefficient_crosscheck_with, spf_partition_sum};
use crate::primes::PrimeCache;

/// `Re(s)` at or below this (but above 1) gets a cost warning.
const NEAR_BOUNDARY: f64 = 1.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Eval,
    IdentityCheck,
    Converge,
    Exclusion,
    OracleCompare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Human,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub s_values: Vec<ComplexValue>,
    pub spec: TruncationSpec,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub methods: Vec<Method>,
    pub k_range: RangeInclusive<i64>,
    pub compare: bool,
    pub timing: bool,
    pub opts: EvalOptions,
}

/// Bad command line or config file; maps to exit status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(
    name = "primezeta",
    version,
    about = "Evaluate and cross-check the Riemann zeta function through prime products",
    args_override_self = true
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Evaluate zeta(s) for Re(s) > 1 with certified truncation
    Eval(Flags),
    /// Measure |Z_i(s) - 1 - S_i(s)| and the induction-step residual
    IdentityCheck(Flags),
    /// Print Z_i, 1 + S_i and the Dirichlet sum at i = 1, 2, 4, ...
    Converge(Flags),
    /// List points where p^-s = 1, or test s values for membership
    Exclusion(Flags),
    /// Compare a_k(s) p_k^-s with smallest-prime-factor partition sums
    OracleCompare(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    /// Complex argument(s) as a+bi; repeat the flag or separate with commas
    #[arg(
        long = "s",
        value_name = "COMPLEX",
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    s: Vec<String>,
    /// dirichlet, euler_product, reformulated, or all (comma-separated)
    #[arg(long, default_value = "reformulated")]
    method: String,
    /// Target truncation tolerance
    #[arg(long = "tol", default_value_t = 1e-6)]
    tol: f64,
    /// Prime index i (identity-check, exclusion) or largest k (oracle-compare)
    #[arg(long = "i", default_value_t = 20)]
    i: usize,
    /// Dirichlet / partition cutoff N
    #[arg(long = "n", default_value_t = 10_000)]
    n: u64,
    /// Integer range a..b for exclusion points
    #[arg(long = "k-range", default_value = "-2..2", allow_hyphen_values = true)]
    k_range: String,
    /// Also list the (1+2k)pi/ln p points next to the singular ones
    #[arg(long)]
    compare: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Write the report here instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
    /// key=value file mirroring these flags; flags given here win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Compensated summation (double-double for the sum-of-products form)
    #[arg(long)]
    compensated: bool,
    /// Threshold on |1 - p^-s| below which a factor is singular
    #[arg(long = "singular-tol", default_value_t = DEFAULT_SINGULAR_TOL)]
    singular_tol: f64,
    /// Largest integer the prime sieve may reach
    #[arg(long = "max-prime")]
    max_prime: Option<u64>,
    /// Largest number of Dirichlet terms
    #[arg(long = "max-terms")]
    max_terms: Option<u64>,
    /// Fill the elapsed_ns column (makes output run-dependent)
    #[arg(long)]
    timing: bool,
}

const BOOL_FLAGS: [&str; 3] = ["compare", "compensated", "timing"];

/// Parse `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i` (no spaces).
pub fn parse_complex(text: &str) -> std::result::Result<ComplexValue, String> {
    let bad = || format!("not a complex literal: {text:?} (expected a+bi)");
    if text.is_empty() || text.chars().any(char::is_whitespace) {
        return Err(bad());
    }
    let real = |t: &str| -> std::result::Result<f64, String> {
        let v = match t {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => t.parse::<f64>().map_err(|_| bad())?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    };
    let Some(body) = text.strip_suffix('i') else {
        if text
            .chars()
            .any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        {
            return Err(bad());
        }
        let re = text.parse::<f64>().map_err(|_| bad())?;
        return if re.is_finite() {
            Ok(Complex64::new(re, 0.0))
        } else {
            Err(bad())
        };
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&idx| matches!(bytes[idx], b'+' | b'-') && !matches!(bytes[idx - 1], b'e' | b'E'));
    match split {
        Some(idx) => {
            let re_text = &body[..idx];
            if re_text.is_empty() || re_text.ends_with(['+', '-']) {
                return Err(bad());
            }
            let re = re_text.parse::<f64>().map_err(|_| bad())?;
            if !re.is_finite() {
                return Err(bad());
            }
            Ok(Complex64::new(re, real(&body[idx..])?))
        }
        None => Ok(Complex64::new(0.0, real(body)?)),
    }
}

fn parse_k_range(text: &str) -> std::result::Result<RangeInclusive<i64>, UsageError> {
    let bad = || {
        UsageError(format!(
            "invalid value '{text}' for '--k-range' (expected a..b)"
        ))
    };
    let (lo, hi) = text.split_once("..").ok_or_else(bad)?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: i64 = lo.parse().map_err(|_| bad())?;
    let hi: i64 = hi.parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn parse_methods(text: &str) -> std::result::Result<Vec<Method>, UsageError> {
    if text == "all" {
        return Ok(Method::ALL.to_vec());
    }
    text.split(',')
        .map(|m| {
            m.parse::<Method>()
                .map_err(|_| UsageError(format!("invalid value '{m}' for '--method'")))
        })
        .collect()
}

impl RunConfig {
    fn from_flags(command: Command, flags: Flags) -> std::result::Result<Self, UsageError> {
        let s_values = flags
            .s
            .iter()
            .map(|lit| {
                parse_complex(lit)
                    .map_err(|e| UsageError(format!("invalid value '{lit}' for '--s': {e}")))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let spec = TruncationSpec::new(flags.i.max(1), flags.n.max(1), flags.tol).map_err(|e| {
            let msg = match e {
                ZetaError::InvalidArgument(m) => m,
                other => other.to_string(),
            };
            UsageError(format!(
                "invalid value '{:e}' for '--tol': {msg}",
                flags.tol
            ))
        })?;
        if flags.i == 0 {
            return Err(UsageError(
                "invalid value '0' for '--i': must be at least 1".into(),
            ));
        }
        if flags.n < 2 && command == Command::OracleCompare {
            return Err(UsageError(format!(
                "invalid value '{}' for '--n': must be at least 2",
                flags.n
            )));
        }
        if !(flags.singular_tol > 0.0) || !flags.singular_tol.is_finite() {
            return Err(UsageError(format!(
                "invalid value '{}' for '--singular-tol': must be positive",
                flags.singular_tol
            )));
        }
        let mut budget = Budget::default();
        if let Some(p) = flags.max_prime {
            budget.max_prime = p;
        }
        if let Some(t) = flags.max_terms {
            budget.max_dirichlet_terms = t;
        }
        let config = RunConfig {
            command,
            s_values,
            spec,
            output_format: flags.format,
            output_path: flags.output,
            methods: parse_methods(&flags.method)?,
            k_range: parse_k_range(&flags.k_range)?,
            compare: flags.compare,
            timing: flags.timing,
            opts: EvalOptions {
                singular_tol: flags.singular_tol,
                summation: if flags.compensated {
                    Summation::Compensated
                } else {
                    Summation::Plain
                },
                budget,
            },
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> std::result::Result<(), UsageError> {
        if self.s_values.is_empty() && self.command != Command::Exclusion {
            return Err(UsageError("missing required flag '--s'".into()));
        }
        if matches!(self.command, Command::Eval | Command::Converge)
            && self.spec.tolerance < MIN_EVAL_TOLERANCE
        {
            return Err(UsageError(format!(
                "invalid value '{}' for '--tol': must be at least {MIN_EVAL_TOLERANCE:e}",
                self.spec.tolerance
            )));
        }
        Ok(())
    }

    /// Parse a full argument vector (program name first), merging the
    /// `--config` file if one is named.
    pub fn from_args<I, T>(args: I) -> std::result::Result<Self, ParseOutcome>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let mut argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
        merge_config_file(&mut argv).map_err(ParseOutcome::Usage)?;
        let cli = Cli::try_parse_from(argv).map_err(ParseOutcome::Clap)?;
        let (command, flags) = match cli.command {
            Sub::Eval(f) => (Command::Eval, f),
            Sub::IdentityCheck(f) => (Command::IdentityCheck, f),
            Sub::Converge(f) => (Command::Converge, f),
            Sub::Exclusion(f) => (Command::Exclusion, f),
            Sub::OracleCompare(f) => (Command::OracleCompare, f),
        };
        Self::from_flags(command, flags).map_err(ParseOutcome::Usage)
    }
}

#[derive(Debug)]
pub enum ParseOutcome {
    Clap(clap::Error),
    Usage(UsageError),
}

/// Append flags from a `key=value` config file for every key not already on
/// the command line.
fn merge_config_file(argv: &mut Vec<OsString>) -> std::result::Result<(), UsageError> {
    let strs: Vec<String> = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let mut path = None;
    for (idx, arg) in strs.iter().enumerate() {
        if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else if arg == "--config" {
            path = strs.get(idx + 1).map(PathBuf::from);
        }
    }
    let Some(path) = path else {
        return Ok(());
    };
    let text = std::fs::read_to_string(&path).map_err(|e| {
        UsageError(format!(
            "invalid value '{}' for '--config': {e}",
            path.display()
        ))
    })?;
    let given = |key: &str| {
        let flag = format!("--{key}");
        let with_eq = format!("--{key}=");
        strs.iter().any(|a| a == &flag || a.starts_with(&with_eq))
    };
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            UsageError(format!(
                "{}:{}: expected key=value, got {line:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key == "config" || given(key) {
            continue;
        }
        if BOOL_FLAGS.contains(&key) {
            match value {
                "true" | "1" | "yes" => argv.push(format!("--{key}").into()),
                "false" | "0" | "no" => {}
                _ => {
                    return Err(UsageError(format!(
                        "invalid value '{value}' for '--{key}' in {}",
                        path.display()
                    )))
                }
            }
        } else {
            argv.push(format!("--{key}={value}").into());
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Uint(u64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Uint(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(t) => csv_quote(t),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn human(&self) -> String {
        match self {
            Cell::Float(v) => format!("{v:.12e}"),
            Cell::Empty => "-".into(),
            other => other.csv(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => (*v).into(),
            Cell::Uint(v) => (*v).into(),
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Text(t) => t.clone().into(),
            Cell::Bool(b) => (*b).into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

fn csv_quote(t: &str) -> String {
    if t.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", t.replace('"', "\"\""))
    } else {
        t.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    fn new(columns: &[&'static str]) -> Self {
        Report {
            columns: columns.to_vec(),
            ..Report::default()
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            OutputFormat::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: serde_json::Map<String, serde_json::Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), v.json()))
                            .collect();
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                let mut out = serde_json::to_string_pretty(&rows).expect("rows serialize");
                out.push('\n');
                out
            }
            OutputFormat::Human => {
                let cells: Vec<Vec<String>> = self
                    .rows
                    .iter()
                    .map(|r| r.iter().map(Cell::human).collect())
                    .collect();
                let widths: Vec<usize> = self
                    .columns
                    .iter()
                    .enumerate()
                    .map(|(j, c)| cells.iter().map(|r| r[j].len()).fold(c.len(), usize::max))
                    .collect();
                let mut out = String::new();
                let line = |out: &mut String, items: Vec<&str>| {
                    let padded: Vec<String> = items
                        .iter()
                        .zip(&widths)
                        .map(|(s, w)| format!("{s:>w$}"))
                        .collect();
                    let _ = writeln!(out, "{}", padded.join("  ").trim_end());
                };
                line(&mut out, self.columns.clone());
                for row in &cells {
                    line(&mut out, row.iter().map(String::as_str).collect());
                }
                out
            }
        }
    }
}

fn float(v: f64) -> Cell {
    Cell::Float(v)
}

/// Cost warnings for `s` values just right of `Re(s) = 1`.
pub fn boundary_warnings(config: &RunConfig) -> Vec<String> {
    if !matches!(
        config.command,
        Command::Eval | Command::Converge | Command::OracleCompare
    ) {
        return Vec::new();
    }
    config
        .s_values
        .iter()
        .filter(|s| s.re > 1.0 && s.re <= NEAR_BOUNDARY)
        .map(|s| {
            format!(
                "warning: Re(s) = {} is within 0.01 of 1; certified term counts grow like \
                 tol^(-1/(Re(s)-1)) and may exhaust the budget",
                s.re
            )
        })
        .collect()
}

/// Build the report for `config`.
pub fn execute(config: &RunConfig, cache: &mut PrimeCache) -> Result<Report> {
    match config.command {
        Command::Eval => run_eval(config, cache),
        Command::IdentityCheck => run_identity(config, cache),
        Command::Converge => run_converge(config, cache),
        Command::Exclusion => run_exclusion(config, cache),
        Command::OracleCompare => run_oracle(config, cache),
    }
}

fn run_eval(config: &RunConfig, cache: &mut PrimeCache) -> Result<Report> {
    let mut report = Report::new(&[
        "s_re",
        "s_im",
        "method",
        "value_re",
        "value_im",
        "terms_used",
        "tail_error_bound",
        "elapsed_ns",
    ]);
    let tol = config.spec.tolerance;
    let jobs: Vec<(ComplexValue, Method)> = config
        .s_values
        .iter()
        .flat_map(|&s| config.methods.iter().map(move |&m| (s, m)))
        .collect();
    for &(s, method) in &jobs {
        prepare_eval(cache, s, method, tol, &config.opts)?;
    }
    let primes = cache.primes();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(s, method)| {
            let start = Instant::now();
            let r = zeta_eval_in(primes, s, method, tol, &config.opts);
            (r, start.elapsed().as_nanos() as u64)
        })
        .collect();
    for (&(s, _), (r, nanos)) in jobs.iter().zip(results) {
        let r = r?;
        report.push(vec![
            float(s.re),
            float(s.im),
            Cell::Text(r.method.to_string()),
            float(r.value.re),
            float(r.value.im),
            Cell::Uint(r.terms_used),
            float(r.tail_error_bound),
            Cell::Uint(if config.timing { nanos } else { 0 }),
        ]);
    }
    Ok(report)
}

fn run_identity(config: &RunConfig, cache: &mut PrimeCache) -> Result<Report> {
    let mut report = Report::new(&[
        "s_re",
        "s_im",
        "i",
        "z_re",
        "z_im",
        "one_plus_s_re",
        "one_plus_s_im",
        "residual",
        "relative_residual",
        "induction_residual",
    ]);
    let i = config.spec.prime_index;
    let tol = config.opts.singular_tol;
    let primes = cache.first(i);
    let results: Vec<Result<_>> = config
        .s_values
        .par_iter()
        .map(|&s| {
            let z = euler_partial(primes, s, tol)?;
            let one_plus =
                Complex64::new(1.0, 0.0) + reform_partial(primes, s, tol, config.opts.summation)?;
            let step = induction_step_check(primes, i - 1, s, tol)?;
            Ok((s, z, one_plus, step))
        })
        .collect();
    for r in results {
        let (s, z, one_plus, step) = r?;
        let residual = (z - one_plus).norm();
        report.push(vec![
            float(s.re),
            float(s.im),
            Cell::Uint(i as u64),
            float(z.re),
            float(z.im),
            float(one_plus.re),
            float(one_plus.im),
            float(residual),
            float(residual / z.norm().max(1.0)),
            float(step),
        ]);
    }
    Ok(report)
}

fn run_converge(config: &RunConfig, cache: &mut PrimeCache) -> Result<Report> {
    let mut report = Report::new(&[
        "s_re",
        "s_im",
        "i",
        "prime",
        "euler_re",
        "euler_im",
        "reformulated_re",
        "reformulated_im",
        "method_gap",
        "product_bound",
        "dirichlet_n",
        "dirichlet_re",
        "dirichlet_im",
        "dirichlet_bound",
    ]);
    for &s in &config.s_values {
        for step in converge(cache, s, config.spec.tolerance, &config.opts)? {
            report.push(vec![
                float(s.re),
                float(s.im),
                Cell::Uint(step.i as u64),
                Cell::Uint(step.prime),
                float(step.euler.re),
                float(step.euler.im),
                float(step.reformulated.re),
                float(step.reformulated.im),
                float((step.euler - step.reformulated).norm()),
                float(step.product_bound),
                Cell::Uint(step.prime),
                float(step.dirichlet.re),
                float(step.dirichlet.im),
                float(step.dirichlet_bound),
            ]);
        }
    }
    Ok(report)
}

fn run_exclusion(config: &RunConfig, cache: &mut PrimeCache) -> Result<Report> {
    let primes = cache.first(config.spec.prime_index);
    let tol = config.opts.singular_tol;
    if !config.s_values.is_empty() {
        let mut report = Report::new(&["s_re", "s_im", "member", "prime", "k", "distance"]);
        for &s in &config.s_values {
            let w = in_exclusion_set(s, primes, tol);
            report.push(vec![
                float(s.re),
                float(s.im),
                Cell::Bool(w.is_some()),
                w.map_or(Cell::Empty, |w| Cell::Uint(w.prime)),
                w.map_or(Cell::Empty, |w| Cell::Int(w.k)),
                w.map_or(Cell::Empty, |w| float(w.distance)),
            ]);
        }
        return Ok(report);
    }

    let mut report = Report::new(&[
        "kind", "prime", "k", "s_re", "s_im", "term_re", "term_im", "gap", "singular",
    ]);
    let mut emit = |kind: &str, points: Vec<ExclusionPoint>| -> Result<()> {
        for pt in points {
            let term = prime_power_term(pt.prime, pt.s)?;
            let singular = match euler_factor(pt.prime, pt.s, tol) {
                Err(ZetaError::Singular { .. }) => true,
                Err(e) => return Err(e),
                Ok(_) => false,
            };
            report.push(vec![
                Cell::Text(kind.into()),
                Cell::Uint(pt.prime),
                Cell::Int(pt.k),
                float(pt.s.re),
                float(pt.s.im),
                float(term.re),
                float(term.im),
                float((Complex64::new(1.0, 0.0) - term).norm()),
                Cell::Bool(singular),
            ]);
        }
        Ok(())
    };
    emit(
        "definitional",
        singular_points(primes, config.k_range.clone()),
    )?;
    if config.compare {
        emit(
            "explicit",
            explicit_exclusion_points(primes, config.k_range.clone()),
        )?;
    }
    Ok(report)
}

fn run_oracle(config: &RunConfig, cache: &mut PrimeCache) -> Result<Report> {
    let mut report = Report::new(&[
        "s_re",
        "s_im",
        "n",
        "k",
        "prime",
        "coefficient_re",
        "coefficient_im",
        "weighted_re",
        "weighted_im",
        "row_re",
        "row_im",
        "residual",
        "allowance",
        "pass",
    ]);
    for &s in &config.s_values {
        if !(s.re > 1.0) {
            return Err(ZetaError::NonConvergent { sigma: s.re });
        }
        let table = spf_partition_sum(cache, s, config.spec.dirichlet_cutoff)?;
        for k in 1..=config.spec.prime_index {
            let x = coefficient_crosscheck_with(cache, &table, k, &config.spec, &config.opts)?;
            report.push(vec![
                float(s.re),
                float(s.im),
                Cell::Uint(table.cutoff),
                Cell::Uint(k as u64),
                Cell::Uint(x.prime),
                float(x.coefficient.value.re),
                float(x.coefficient.value.im),
                float(x.weighted.re),
                float(x.weighted.im),
                float(x.row.re),
                float(x.row.im),
                float(x.residual),
                float(x.allowance),
                Cell::Bool(x.passed()),
            ]);
        }
    }
    Ok(report)
}

fn write_report(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

/// Run with a prepared config; returns the exit status.
pub fn run(
    config: &RunConfig,
    cache: &mut PrimeCache,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    for w in boundary_warnings(config) {
        let _ = writeln!(stderr, "{w}");
    }
    match execute(config, cache) {
        Ok(report) => {
            let text = report.render(config.output_format);
            match write_report(config.output_path.as_deref(), &text, stdout) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "error: writing report: {e}");
                    1
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if matches!(e, ZetaError::InvalidArgument(_)) {
                2
            } else {
                1
            }
        }
    }
}

/// Whole program: parse, load the prime cache named by `ZETA_PRIME_CACHE`,
/// run, and save the cache back if it grew.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(ParseOutcome::Clap(e)) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            return e.exit_code();
        }
        Err(ParseOutcome::Usage(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    let mut cache = match PrimeCache::from_env() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    };
    let before = cache.len();
    let status = run(&config, &mut cache, stdout, stderr);
    if let Some(path) = PrimeCache::env_path() {
        if cache.len() > before || !path.exists() {
            if let Err(e) = cache.save(&path) {
                let _ = writeln!(stderr, "warning: {e}");
            }
        }
    }
    status
}
