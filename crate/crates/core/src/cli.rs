//! Command-line front end. [`run`] parses arguments, executes one command and
//! returns the process exit code:
//!
//! * `0` positive result (eigenfunction, minimal, all checks passed)
//! * `1` negative result
//! * `2` undetermined (inconclusive verdict, insufficient sampling yield)
//! * `3` invalid input or unmet precondition
//! * `4` I/O failure

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::eigen::verify_eigenfunction;
use crate::error::{Error, Result};
use crate::geometry::{export_cloud, sample_lenient, NewtonOptions, VarietySpec};
use crate::minimality::{check_minimal_codim1, check_minimal_codim2, classify_lawson, MinimalityOptions, MinimalityStatus};
use crate::parser::parse;
use crate::search::{search_eigen_with, SearchOptions, ACCEPT_RESIDUAL, DEFAULT_DENOMINATOR_BOUND};
use crate::selftest;

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNDETERMINED: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "eigensphere", version, about = "Eigenfunctions on spheres and minimality of their level sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact test for a harmonic homogeneous polynomial with isotropic gradient.
    EigenCheck(EigenCheckArgs),
    /// Minimality of the preimage of a line through the origin.
    MinimalLine(MinimalLineArgs),
    /// Minimality of the zero fiber.
    MinimalZero(MinimalZeroArgs),
    /// Sample a real variety intersected with the unit sphere and export CSV.
    Sample(SampleArgs),
    /// Topological type of a Lawson surface.
    Lawson(LawsonArgs),
    /// Numerical search for eigenfunctions of a given degree.
    Search(SearchArgs),
    /// Run the exact identity suites.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Serialize)]
struct PolyArgs {
    /// Number of real variables N.
    #[arg(long)]
    vars: usize,
    /// Sphere dimension n; must equal N - 1.
    #[arg(long)]
    sphere_dim: usize,
    /// Polynomial in x1..xN, z1..z(N/2), i, conj(...).
    #[arg(long)]
    poly: String,
}

impl PolyArgs {
    fn polynomial(&self) -> Result<crate::Polynomial> {
        if self.vars != self.sphere_dim + 1 {
            return Err(Error::DimensionMismatch { expected: self.sphere_dim + 1, found: self.vars });
        }
        parse(&self.poly, self.vars)
    }
}

#[derive(Args, Debug, Serialize)]
struct SamplingArgs {
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Criterion magnitude above which a sample refutes minimality.
    #[arg(long, default_value_t = 1e-3)]
    reject: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the sampling cross-check when an exact certificate exists.
    #[arg(long)]
    no_cross_check: bool,
}

impl SamplingArgs {
    fn options(&self) -> MinimalityOptions {
        MinimalityOptions {
            samples: self.samples,
            tol: self.tol,
            reject: self.reject,
            seed: self.seed,
            cross_check: !self.no_cross_check,
            newton: NewtonOptions::default(),
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct EigenCheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    poly: PolyArgs,
    #[arg(long)]
    #[serde(skip)]
    json: bool,
}

#[derive(Args, Debug, Serialize)]
struct MinimalLineArgs {
    #[command(flatten)]
    #[serde(flatten)]
    poly: PolyArgs,
    /// Line direction `a,b` with rational entries, e.g. `1,0` or `1/2,-3`.
    #[arg(long)]
    line: String,
    #[command(flatten)]
    #[serde(flatten)]
    sampling: SamplingArgs,
    #[arg(long)]
    #[serde(skip)]
    json: bool,
}

#[derive(Args, Debug, Serialize)]
struct MinimalZeroArgs {
    #[command(flatten)]
    #[serde(flatten)]
    poly: PolyArgs,
    #[command(flatten)]
    #[serde(flatten)]
    sampling: SamplingArgs,
    #[arg(long)]
    #[serde(skip)]
    json: bool,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[arg(long)]
    vars: usize,
    /// Real polynomial constraint; repeatable. The unit sphere is always included.
    #[arg(long = "constraint", required = true)]
    constraints: Vec<String>,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Append stereographic coordinates from the given pole index (1-based).
    #[arg(long)]
    stereo: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    json: bool,
}

#[derive(Args, Debug, Serialize)]
struct LawsonArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    #[serde(skip)]
    json: bool,
}

#[derive(Args, Debug, Serialize)]
struct SearchArgs {
    #[arg(long)]
    vars: usize,
    #[arg(long)]
    degree: u32,
    #[arg(long, default_value_t = 50)]
    attempts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_DENOMINATOR_BOUND)]
    denominator_bound: u64,
    #[arg(long)]
    #[serde(skip)]
    json: bool,
}

#[derive(Args, Debug, Serialize)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    #[serde(skip)]
    json: bool,
}

#[derive(Serialize)]
struct RunReport<'a> {
    command: &'a str,
    inputs: Value,
    verdict: Value,
    timings: Value,
    version: &'static str,
    rng_seed: Option<u64>,
}

/// What a command produced: exit code, JSON verdict and a human summary.
struct Outcome {
    code: i32,
    verdict: Value,
    summary: String,
}

fn parse_line(text: &str) -> Result<(BigRational, BigRational)> {
    let bad = |message: &str| Error::Syntax { position: 0, message: format!("--line {text:?}: {message}") };
    let (a, b) = text.split_once(',').ok_or_else(|| bad("expected a,b"))?;
    let a: BigRational = a.trim().parse().map_err(|_| bad("a is not a rational number"))?;
    let b: BigRational = b.trim().parse().map_err(|_| bad("b is not a rational number"))?;
    Ok((a, b))
}

fn status_code(status: MinimalityStatus) -> i32 {
    match status {
        MinimalityStatus::ExactMinimal | MinimalityStatus::NumericMinimal => EXIT_POSITIVE,
        MinimalityStatus::NotMinimal => EXIT_NEGATIVE,
        MinimalityStatus::Inconclusive => EXIT_UNDETERMINED,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn eigen_check(args: &EigenCheckArgs) -> Result<Outcome> {
    let p = args.poly.polynomial()?;
    let report = verify_eigenfunction(&p, args.poly.sphere_dim)?;
    let summary = match (&report.failure, &report.lambda, &report.mu) {
        (None, Some(l), Some(m)) => format!("eigenfunction: k = {}, lambda = {l}, mu = {m}", report.k),
        (Some(f), _, _) => format!("not an eigenfunction: {:?} fails, residual {}", f.condition, f.residual),
        _ => "not an eigenfunction".into(),
    };
    let code = if report.is_eigen { EXIT_POSITIVE } else { EXIT_NEGATIVE };
    Ok(Outcome { code, verdict: to_value(&report), summary })
}

fn verdict_summary(v: &crate::minimality::MinimalityVerdict) -> String {
    let mut s = format!("{:?}", v.status);
    if let Some(c) = &v.certificate {
        s += &format!("; certificate {c}");
    }
    if let (Some(n), Some(r)) = (v.samples, v.max_residual) {
        s += &format!("; {n} samples, max criterion {r:e}");
    }
    if let Some(f) = v.flat_section_residual {
        s += &format!("; flat-section residual {f:e}");
    }
    if let Some(w) = &v.witness {
        s += &format!("; witness {:?} criterion {:e}", w.point, w.criterion);
    }
    if let Some(r) = &v.reason {
        s += &format!("; {r}");
    }
    s
}

fn minimal_line(args: &MinimalLineArgs) -> Result<Outcome> {
    let p = args.poly.polynomial()?;
    let (a, b) = parse_line(&args.line)?;
    let v = check_minimal_codim1(&p, &a, &b, args.poly.sphere_dim, &args.sampling.options())?;
    Ok(Outcome { code: status_code(v.status), summary: verdict_summary(&v), verdict: to_value(&v) })
}

fn minimal_zero(args: &MinimalZeroArgs) -> Result<Outcome> {
    let p = args.poly.polynomial()?;
    let v = check_minimal_codim2(&p, args.poly.sphere_dim, &args.sampling.options())?;
    Ok(Outcome { code: status_code(v.status), summary: verdict_summary(&v), verdict: to_value(&v) })
}

fn sample(args: &SampleArgs, err: &mut dyn Write) -> Result<Outcome> {
    let constraints = args
        .constraints
        .iter()
        .map(|c| parse(c, args.vars))
        .collect::<Result<Vec<_>>>()?;
    let spec = VarietySpec::on_sphere(args.vars, constraints)?;
    let opts = NewtonOptions::default();
    let mut cloud = sample_lenient(&spec, args.count, args.seed, &opts)?;
    if let Some(pole) = args.stereo {
        cloud.attach_stereo(pole)?;
    }
    export_cloud(&cloud, &args.out)?;
    let short = 2 * cloud.len() < args.count;
    if short {
        let _ = writeln!(err, "{}", Error::InsufficientYield { requested: args.count, found: cloud.len() });
    }
    let summary = format!("wrote {} of {} points to {}", cloud.len(), args.count, args.out.display());
    let verdict = json!({
        "points": cloud.len(),
        "stats": to_value(&cloud.stats),
        "out": args.out.display().to_string(),
    });
    Ok(Outcome { code: if short { EXIT_UNDETERMINED } else { EXIT_POSITIVE }, verdict, summary })
}

fn lawson(args: &LawsonArgs) -> Result<Outcome> {
    let t = classify_lawson(args.n, args.m)?;
    Ok(Outcome { code: EXIT_POSITIVE, verdict: to_value(&t), summary: format!("{t:?}") })
}

fn search(args: &SearchArgs) -> Result<Outcome> {
    let opts = SearchOptions {
        attempts: args.attempts,
        seed: args.seed,
        denominator_bound: args.denominator_bound,
        ..Default::default()
    };
    let results = search_eigen_with(args.vars, args.degree, &opts)?;
    let found = results.first().is_some_and(|r| r.residual < ACCEPT_RESIDUAL);
    let verdict = to_value(&results);
    let summary = serde_json::to_string_pretty(&verdict).expect("serializable");
    Ok(Outcome { code: if found { EXIT_POSITIVE } else { EXIT_UNDETERMINED }, verdict, summary })
}

fn run_selftest(args: &SelftestArgs) -> Result<Outcome> {
    let report = selftest::run(args.seed)?;
    let summary = report
        .checks
        .iter()
        .map(|c| format!("{} {} ({} cases)", if c.passed() { "ok  " } else { "FAIL" }, c.name, c.cases))
        .collect::<Vec<_>>()
        .join("\n");
    let code = if report.passed { EXIT_POSITIVE } else { EXIT_NEGATIVE };
    Ok(Outcome { code, verdict: to_value(&report), summary })
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_POSITIVE };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{rendered}") } else { write!(out, "{rendered}") };
            return code;
        }
    };

    let start = Instant::now();
    let (name, inputs, seed, json, result) = match &cli.command {
        Command::EigenCheck(a) => ("eigen-check", to_value(a), None, a.json, eigen_check(a)),
        Command::MinimalLine(a) => ("minimal-line", to_value(a), Some(a.sampling.seed), a.json, minimal_line(a)),
        Command::MinimalZero(a) => ("minimal-zero", to_value(a), Some(a.sampling.seed), a.json, minimal_zero(a)),
        Command::Sample(a) => ("sample", to_value(a), Some(a.seed), a.json, sample(a, err)),
        Command::Lawson(a) => ("lawson", to_value(a), None, a.json, lawson(a)),
        Command::Search(a) => ("search", to_value(a), Some(a.seed), a.json, search(a)),
        Command::Selftest(a) => ("selftest", to_value(a), Some(a.seed), a.json, run_selftest(a)),
    };
    let elapsed = start.elapsed().as_secs_f64();

    match result {
        Ok(outcome) => {
            let written = if json {
                let report = RunReport {
                    command: name,
                    inputs,
                    verdict: outcome.verdict,
                    timings: json!({ "total_seconds": elapsed }),
                    version: env!("CARGO_PKG_VERSION"),
                    rng_seed: seed,
                };
                writeln!(out, "{}", serde_json::to_string(&report).expect("serializable"))
            } else {
                writeln!(out, "{}", outcome.summary)
            };
            if written.is_err() {
                return EXIT_IO;
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("eigensphere").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn line_parsing() {
        let (a, b) = parse_line("1/2, -3").unwrap();
        assert_eq!(a, BigRational::new(1.into(), 2.into()));
        assert_eq!(b, BigRational::from_integer((-3).into()));
        assert!(parse_line("1;0").is_err());
        assert!(parse_line("x,0").is_err());
    }

    #[test]
    fn eigen_check_codes() {
        let (code, out, _) = run_capture(&["eigen-check", "--vars", "4", "--sphere-dim", "3", "--poly", "z1^2+z2^2", "--json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verdict"]["lambda"], json!(-8));
        assert_eq!(v["verdict"]["mu"], json!(-4));
        assert_eq!(v["inputs"]["poly"], json!("z1^2+z2^2"));
        let (code, _, _) = run_capture(&["eigen-check", "--vars", "4", "--sphere-dim", "3", "--poly", "x1^2"]);
        assert_eq!(code, 1);
        let (code, _, err) = run_capture(&["eigen-check", "--vars", "4", "--sphere-dim", "2", "--poly", "x1"]);
        assert_eq!(code, 3);
        assert!(err.contains("error"));
    }

    #[test]
    fn usage_errors_and_help() {
        assert_eq!(run_capture(&["no-such-command"]).0, 3);
        assert_eq!(run_capture(&["--help"]).0, 0);
        assert_eq!(run_capture(&["lawson", "--n", "0", "--m", "0"]).0, 3);
        let (code, out, _) = run_capture(&["lawson", "--n", "1", "--m", "3"]);
        assert_eq!((code, out.trim()), (0, "Torus"));
    }
}
