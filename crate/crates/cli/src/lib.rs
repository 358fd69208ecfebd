//! Front end for `toledo-core`: argument parsing, dispatch and exit codes.
//!
//! Exit codes are 0 on success, 2 for parse and validation errors and 3 when
//! an internal consistency check fails (completeness margin, report self
//! check or oracle mismatch).

pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use toledo_core::cech::lemma_equivalence_scan;
use toledo_core::divisor::{star_certificate, star_certificate_floorform, star_divisible, PairSum};
use toledo_core::families::{check_reducible_ternary, check_stable_binary, check_stable_ternary, Family, Verdict};
use toledo_core::spectrum::{toledo_spectrum_with, GroupVariant, SpectrumOptions};
use toledo_core::{SeifertSignature, VerticalDivisor};

use report::ReportJson;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] toledo_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Inconsistent(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Inconsistent(_) => EXIT_INCONSISTENT,
            _ => EXIT_INVALID,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "toledo", version, about = "Orbifold Toledo invariants of Seifert homology-sphere bases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate the Toledo spectrum of a signature.
    Enumerate(EnumerateArgs),
    /// Check one parameter tuple against a family's conditions.
    Check(CheckArgs),
    /// Decide (★) for a pair sum in both forms.
    Star(StarArgs),
    /// Cohomology dimensions of a vertical divisor.
    Cohomology(CohomologyArgs),
    /// Compare exact-rank injectivity with the combinatorial criterion.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Group {
    U21,
    Pu21,
}

impl From<Group> for GroupVariant {
    fn from(g: Group) -> Self {
        match g {
            Group::U21 => GroupVariant::U21,
            Group::Pu21 => GroupVariant::PU21,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleFormat {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckFamily {
    StableTernary,
    StableBinary,
    ReducibleTernary,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    /// Multiplicities, e.g. 2,3,11.
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
    #[arg(long, value_enum, default_value_t = Group::U21)]
    pub group: Group,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Witnesses stored per value; counts stay exact.
    #[arg(long, default_value_t = toledo_core::spectrum::DEFAULT_WITNESS_CAP)]
    pub witness_cap: usize,
    #[arg(long, default_value_t = toledo_core::spectrum::DEFAULT_MARGIN_DELTA, allow_hyphen_values = true)]
    pub margin_delta: i64,
    /// Worker threads; output does not depend on it.
    #[arg(long, env = "TOLEDO_JOBS")]
    pub jobs: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub family: CheckFamily,
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
    /// First divisor literal `a:a1,...,an`; the only one for reducible-ternary
    /// when --b is absent.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
}

#[derive(Debug, Args)]
pub struct StarArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
    /// Pair sum literal `t:t1,...,tn`.
    #[arg(long, allow_hyphen_values = true)]
    pub sum: String,
}

#[derive(Debug, Args)]
pub struct CohomologyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
    #[arg(long, allow_hyphen_values = true)]
    pub divisor: String,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub d2: i64,
    #[arg(long)]
    pub d1_max: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of seeded random vectors for the necessity half.
    #[arg(long, default_value_t = 20)]
    pub random: usize,
    #[arg(long, value_enum, default_value_t = OracleFormat::Json)]
    pub format: OracleFormat,
}

/// Runs the CLI against the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Enumerate(args) => enumerate(args, out),
        Command::Check(args) => check(args, out),
        Command::Star(args) => star(args, out),
        Command::Cohomology(args) => cohomology(args, out),
        Command::Oracle(args) => oracle(args, out),
    }
}

fn signature(literal: &str) -> Result<SeifertSignature, CliError> {
    Ok(literal.parse::<SeifertSignature>()?)
}

fn enumerate(args: EnumerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let sig = signature(&args.m)?;
    if args.margin_delta < 0 {
        return Err(CliError::Usage(format!("--margin-delta must be >= 0, got {}", args.margin_delta)));
    }
    let options = SpectrumOptions {
        witness_cap: args.witness_cap,
        margin_delta: args.margin_delta,
    };
    let group = GroupVariant::from(args.group);
    let compute = || toledo_spectrum_with(&sig, group, options);
    let report = match args.jobs {
        Some(0) => return Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(compute)?,
        None => compute()?,
    };

    let json = ReportJson::from_report(&report);
    let rendered = match args.format {
        Format::Json => json.to_json(),
        Format::Csv => json.to_csv(),
        Format::Table => json.to_table(),
    };
    match &args.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => out.write_all(rendered.as_bytes())?,
    }

    if !report.margin_check_passed {
        return Err(CliError::Inconsistent(format!(
            "widening the search windows by {} admits new tuples",
            args.margin_delta
        )));
    }
    let problems = report.self_check(false);
    if let Some(first) = problems.first() {
        return Err(CliError::Inconsistent(format!("report self check: {first} ({} issues)", problems.len())));
    }
    Ok(())
}

fn write_verdict(out: &mut dyn Write, family: Family, verdict: &Verdict) -> std::io::Result<()> {
    for id in family.conditions() {
        let status = if verdict.failed_conditions.contains(id) { "fail" } else { "pass" };
        writeln!(out, "  {:<11} {:<42} {status}", id.label(), id.description())?;
    }
    writeln!(out, "verdict: {}", if verdict.ok { "ok" } else { "rejected" })
}

fn check(args: CheckArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let sig = signature(&args.m)?;
    let parse = |lit: &Option<String>| lit.as_deref().map(|l| VerticalDivisor::parse(&sig, l)).transpose();
    let a = parse(&args.a)?;
    let b = parse(&args.b)?;
    let missing = |flag: &str| CliError::Usage(format!("{flag} is required for this family"));

    if args.family == CheckFamily::ReducibleTernary {
        let b = b.or(a).ok_or_else(|| missing("--b"))?;
        let verdict = check_reducible_ternary(&b);
        writeln!(out, "family reducible-ternary over {sig}")?;
        writeln!(out, "b = {}  B = {}", b.to_literal(), b.a_value())?;
        write_verdict(out, Family::ReducibleTernary, &verdict)?;
        if verdict.ok {
            writeln!(out, "tau = +/-{}", b.a_value())?;
        }
        return Ok(());
    }

    let a = a.ok_or_else(|| missing("--a"))?;
    let b = b.ok_or_else(|| missing("--b"))?;
    let (family, verdict) = match args.family {
        CheckFamily::StableTernary => (Family::StableTernary, check_stable_ternary(&a, &b)?),
        _ => (Family::StableBinary, check_stable_binary(&a, &b)?),
    };
    writeln!(out, "family {family} over {sig}")?;
    writeln!(out, "a = {}  A = {}", a.to_literal(), a.a_value())?;
    writeln!(out, "b = {}  B = {}", b.to_literal(), b.a_value())?;
    write_verdict(out, family, &verdict)?;
    let sum = a.pair_sum(&b)?;
    match star_certificate(&sig, &sum)? {
        Some(c) => writeln!(out, "star: y={} y_res={:?} s={:?}", c.y, c.y_res, c.s)?,
        None => writeln!(out, "star: none")?,
    }
    writeln!(out, "tau = {}", a.a_value() + b.a_value())?;
    Ok(())
}

fn star(args: StarArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let sig = signature(&args.m)?;
    let sum = PairSum::parse(&args.sum)?;
    let s_form = star_certificate(&sig, &sum)?;
    let floor_form = star_certificate_floorform(&sig, &sum)?;
    let divisible = star_divisible(&sig, &sum)?;
    if s_form.is_some() != divisible || floor_form.is_some() != divisible {
        return Err(CliError::Inconsistent(format!("the forms of (★) disagree on {}", sum.to_literal())));
    }
    match s_form {
        Some(c) => writeln!(out, "s-form: y={} y_res={:?} s={:?}", c.y, c.y_res, c.s)?,
        None => writeln!(out, "s-form: none")?,
    }
    match floor_form {
        Some(w) => writeln!(out, "floor form: y={} y_res={:?}", w.y, w.y_res)?,
        None => writeln!(out, "floor form: none")?,
    }
    Ok(())
}

fn cohomology(args: CohomologyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let sig = signature(&args.m)?;
    let d = VerticalDivisor::parse(&sig, &args.divisor)?;
    let (h0, h1) = d.cohomology_dims();
    writeln!(out, "divisor {}  value {}", d.to_literal(), d.a_value())?;
    writeln!(out, "h0 = {h0}")?;
    writeln!(out, "h1 = {h1}")?;
    writeln!(out, "twisted one-form h0 = {}", d.twisted_one_form_h0())?;
    Ok(())
}

fn oracle(args: OracleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let report = lemma_equivalence_scan(args.d2, args.d1_max, args.random, args.seed)?;
    match args.format {
        OracleFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("scan report serializes");
            s.push('\n');
            out.write_all(s.as_bytes())?;
        }
        OracleFormat::Table => {
            let sigma: Vec<String> = report.sigma.iter().map(ToString::to_string).collect();
            writeln!(out, "d2 = {}  sigma = ({})", report.d2, sigma.join(", "))?;
            writeln!(out, "{:>4} {:>4} {:>10} {:>10}", "d1", "d3", "predicate", "injective")?;
            for c in &report.cells {
                writeln!(out, "{:>4} {:>4} {:>10} {:>10}", c.d1, c.d3, c.predicate, c.injective)?;
            }
            writeln!(
                out,
                "mismatches = {}  random necessity failures = {} ({} vectors, seed {})",
                report.mismatches, report.random_necessity_failures, report.random_sigmas, report.seed
            )?;
        }
    }
    if !report.is_clean() {
        return Err(CliError::Inconsistent(format!(
            "{} mismatches, {} random necessity failures",
            report.mismatches, report.random_necessity_failures
        )));
    }
    Ok(())
}
