//! Command-line front end.
//!
//! Exit codes: 0 success or VERIFIED, 2 INCONCLUSIVE (or a reproduction
//! mismatch), 3 domain errors, 4 numerical failures, 64 malformed arguments.

pub mod report;
mod repro;

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::bounds::{beta_gap, endpoint_bound_power, in_decay_range, q0_upper, threshold_residual, u_bound, u_bound_power};
use crate::error::{Error, Result};
use crate::lambda::{
    lambda, lambda4_closed, lambda_inf, Exponent, ProblemSpec, DEFAULT_CUTOFF, DEFAULT_TOL,
};
use crate::verify::{sharp_constant, trunc3, verify_hierarchy_with, Verdict};
use report::{emit, Format, Report, Row, LAMBDA_CSV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

/// Grid step for `q0` when `--tol` is not given.
const Q0_DEFAULT_STEP: f64 = 0.01;

#[derive(Debug, Parser)]
#[command(name = "vega-sharp", version, about = "Certified weighted Bessel norms and sharp-constant checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Output {
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for per-k sweeps (default: available cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, Args)]
struct Numerics {
    /// Head integral cutoff R.
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    cutoff: f64,
    /// Absolute quadrature tolerance for the head integral.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certified Λ_{d,q}(k) and its q-th power.
    Lambda {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        q: Exponent,
        #[arg(long, default_value = "0")]
        k: KRange,
        /// Closed form for q = 4, k = 0 instead of quadrature.
        #[arg(long)]
        closed_form: bool,
        #[command(flatten)]
        numerics: Numerics,
        #[command(flatten)]
        output: Output,
    },
    /// Closed-form upper bound U_{d,q}(k), or the three-region bound at q = 2d/(d - 4/3).
    Ubound {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        q: Exponent,
        #[arg(long, default_value = "0")]
        k: KRange,
        #[command(flatten)]
        output: Output,
    },
    /// Gap ratio U_{d,∞}(1)/U_{d,∞}(0).
    Beta {
        #[arg(long)]
        d: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Certified upper bound for the threshold exponent q0(d).
    Q0 {
        #[arg(long)]
        d: u32,
        /// Grid step for q (default 0.01).
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Check Λ_{d,q}(0) > Λ_{d,q}(k) for all k >= 1.
    Verify {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        q: Exponent,
        #[command(flatten)]
        numerics: Numerics,
        #[command(flatten)]
        output: Output,
    },
    /// Sharp constant (2π)^{d/2} max_k Λ_{d,q}(k).
    Constant {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        q: Exponent,
        #[command(flatten)]
        output: Output,
    },
    /// Recompute a published set of numbers next to the certified ones.
    Repro {
        #[arg(value_enum)]
        section: Section,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Section {
    Thm3,
    Thm4D4,
    Thm4D5,
    LandauTable,
}

/// `INT` or an inclusive range `A..B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub first: u32,
    pub last: u32,
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("bad k '{t}': {e}"));
        match s.split_once("..") {
            Some((a, b)) => {
                let (first, last) = (parse(a)?, parse(b.trim_start_matches('='))?);
                if first > last {
                    return Err(format!("empty k range {s}"));
                }
                Ok(Self { first, last })
            }
            None => {
                let k = parse(s)?;
                Ok(Self { first: k, last: k })
            }
        }
    }
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Domain(_) | Error::Range(_) => EXIT_DOMAIN,
        Error::Overflow(_) | Error::NonFinite(_) | Error::Convergence { .. } => EXIT_NUMERIC,
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Verified => EXIT_OK,
        Verdict::Inconclusive | Verdict::Refuted => EXIT_INCONCLUSIVE,
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let output = cli.command.output().clone();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(output.jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_NUMERIC;
        }
    };
    let outcome = pool.install(|| dispatch(&cli.command)).and_then(|(report, code)| {
        emit(&report.render(output.format)?, output.out.as_deref())?;
        Ok(code)
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

impl Command {
    fn output(&self) -> &Output {
        match self {
            Self::Lambda { output, .. }
            | Self::Ubound { output, .. }
            | Self::Beta { output, .. }
            | Self::Q0 { output, .. }
            | Self::Verify { output, .. }
            | Self::Constant { output, .. }
            | Self::Repro { output, .. } => output,
        }
    }
}

fn dispatch(cmd: &Command) -> Result<(Report, i32)> {
    match cmd {
        Command::Lambda { d, q, k, closed_form, numerics, .. } => lambda_cmd(*d, *q, *k, *closed_form, numerics),
        Command::Ubound { d, q, k, .. } => ubound_cmd(*d, *q, *k),
        Command::Beta { d, .. } => {
            let mut r = Report::new("beta").param("d", d);
            r.results.push(Row::new().with("d", *d).with("beta", beta_gap(*d)?));
            Ok((r, EXIT_OK))
        }
        Command::Q0 { d, tol, .. } => q0_cmd(*d, tol.unwrap_or(Q0_DEFAULT_STEP)),
        Command::Verify { d, q, numerics, .. } => verify_cmd(*d, *q, numerics),
        Command::Constant { d, q, .. } => constant_cmd(*d, *q),
        Command::Repro { section, .. } => repro::run(*section),
    }
}

pub(crate) fn lambda_row(res: &crate::lambda::LambdaResult) -> Row {
    Row::new()
        .with("d", res.spec.d)
        .with("q", res.spec.q.to_string())
        .with("k", res.spec.k)
        .with("power", res.power)
        .with("lambda", res.lambda)
        .with("head", res.head)
        .with("head_3dp", format!("{:.3}", trunc3(res.head.lo)))
        .with("tail_hi", res.tail_hi)
        .with("cutoff_R", res.cutoff_r)
        .with("cutoff_raised", res.cutoff_raised)
}

fn lambda_cmd(d: u32, q: Exponent, k: KRange, closed_form: bool, numerics: &Numerics) -> Result<(Report, i32)> {
    let mut report = Report::new("lambda")
        .param("d", d)
        .param("q", q.to_string())
        .param("k", format!("{}..{}", k.first, k.last))
        .param("cutoff", numerics.cutoff)
        .param("tol", numerics.tol);
    if closed_form {
        if q != Exponent::integer(4)? || k.first != 0 || k.last != 0 {
            return Err(Error::Domain("--closed-form is available for q = 4, k = 0 only".into()));
        }
        let power = lambda4_closed(d)?;
        report = report.param("closed_form", true);
        report.results.push(
            Row::new()
                .with("d", d)
                .with("q", q.to_string())
                .with("k", 0u32)
                .with("power", power)
                .with("lambda", power.powf(0.25)),
        );
        return Ok((report, EXIT_OK));
    }
    report.csv_columns = Some(LAMBDA_CSV);
    let rows: Vec<Row> = (k.first..=k.last)
        .into_par_iter()
        .map(|k| {
            if q.is_finite() {
                Ok(lambda_row(&lambda(&ProblemSpec::new(d, q, k)?, numerics.cutoff, numerics.tol)?))
            } else {
                ProblemSpec::new(d, q, k)?;
                let value = lambda_inf(d, k, None)?;
                Ok(Row::new()
                    .with("d", d)
                    .with("q", q.to_string())
                    .with("k", k)
                    .with("power", value)
                    .with("lambda", value)
                    .with("tail_hi", 0.0)
                    .with("cutoff_R", None::<f64>))
            }
        })
        .collect::<Result<_>>()?;
    report.results = rows;
    Ok((report, EXIT_OK))
}

fn ubound_cmd(d: u32, q: Exponent, k: KRange) -> Result<(Report, i32)> {
    ProblemSpec::new(d, q, 0)?;
    let mut report = Report::new("ubound").param("d", d).param("q", q.to_string()).param("k", format!("{}..{}", k.first, k.last));
    let endpoint = !in_decay_range(d, q) && endpoint_bound_power(d, q, 1).is_ok();
    for k in k.first..=k.last {
        let row = Row::new().with("d", d).with("q", q.to_string()).with("k", k);
        report.results.push(if endpoint {
            let b = endpoint_bound_power(d, q, k)?;
            row.with("power_part", b.power_part)
                .with("landau_part", b.landau_part)
                .with("tail_part", b.tail_part)
                .with("bound_power", b.total())
        } else {
            row.with("u_bound", u_bound(d, q, k)?).with("bound_power", u_bound_power(d, q, k)?)
        });
    }
    Ok((report.param("method", if endpoint { "endpoint-split" } else { "decreasing-bound" }), EXIT_OK))
}

fn q0_cmd(d: u32, step: f64) -> Result<(Report, i32)> {
    let rep = q0_upper(d, step)?;
    let trace = serde_json::to_value(&rep.grid_checked).map_err(|e| Error::Range(e.to_string()))?;
    let mut report = Report::new("q0").param("d", d).param("tol", step);
    report.results.push(
        Row::new()
            .with("d", d)
            .with("q0_upper", rep.q0_upper)
            .with("residual_at_q0", threshold_residual(d, rep.q0_upper)?)
            .with("min_residual", rep.min_residual)
            .with("samples_checked", rep.samples_checked)
            .with("method", rep.method_note.clone())
            .with("trace", report::Cell::Json(trace)),
    );
    Ok((report, EXIT_OK))
}

fn verify_cmd(d: u32, q: Exponent, numerics: &Numerics) -> Result<(Report, i32)> {
    let rep = verify_hierarchy_with(d, q, numerics.cutoff, numerics.tol)?;
    let mut report = Report::new("verify")
        .param("d", d)
        .param("q", q.to_string())
        .param("cutoff", numerics.cutoff)
        .param("tol", numerics.tol);
    report.csv_columns = Some(LAMBDA_CSV);
    report.verdict = Some(rep.verdict.to_string());
    report.results.push(
        Row::new()
            .with("method", serde_json::to_value(rep.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())
            .with("lambda0_power_lo", rep.lambda0_power_lo)
            .with("display_threshold", rep.display_threshold)
            .with("K", rep.cutoff_k)
            .with("K_certified", rep.certified_cutoff_k)
            .with("bound_after_cutoff", rep.bound_after_cutoff)
            .with("offending_k", rep.offending_k),
    );
    report.results.push(lambda_row(&rep.lambda0));
    for b in &rep.per_k {
        let spec = ProblemSpec::new(d, q, b.k)?;
        let power = crate::Enclosure::new(b.power_lo, b.power_hi)?;
        report.results.push(lambda_row(&crate::lambda::LambdaResult {
            spec,
            power,
            lambda: power.powf_nonneg(1.0 / q.value()),
            cutoff_r: b.cutoff_r,
            head: b.head,
            tail_hi: b.tail_hi,
            cutoff_raised: b.cutoff_r > numerics.cutoff,
        }));
    }
    Ok((report, verdict_code(rep.verdict)))
}

fn constant_cmd(d: u32, q: Exponent) -> Result<(Report, i32)> {
    let c = sharp_constant(d, q)?;
    let mut report = Report::new("constant").param("d", d).param("q", q.to_string());
    report.verdict = c.verdict.map(|v| v.to_string());
    report.results.push(
        Row::new()
            .with("d", d)
            .with("q", q.to_string())
            .with("constant", c.constant)
            .with("lambda", c.lambda)
            .with("argmax_k", c.argmax_k)
            .with("certified", c.certified)
            .with("cutoff_R", c.cutoff_r.is_finite().then_some(c.cutoff_r)),
    );
    Ok((report, if c.certified { EXIT_OK } else { EXIT_INCONCLUSIVE }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_ranges() {
        assert_eq!("3".parse::<KRange>().unwrap(), KRange { first: 3, last: 3 });
        assert_eq!("1..28".parse::<KRange>().unwrap(), KRange { first: 1, last: 28 });
        assert!("5..2".parse::<KRange>().is_err());
        assert!("x".parse::<KRange>().is_err());
    }

    #[test]
    fn usage_and_help_codes() {
        assert_eq!(run(["vega-sharp", "lambda", "--d"]), EXIT_USAGE);
        assert_eq!(run(["vega-sharp", "bogus"]), EXIT_USAGE);
        assert_eq!(run(["vega-sharp", "--help"]), EXIT_OK);
        assert_eq!(run(["vega-sharp", "lambda", "--d", "3", "--q", "3/0"]), EXIT_USAGE);
    }

    #[test]
    fn domain_code() {
        assert_eq!(run(["vega-sharp", "lambda", "--d", "3", "--q", "2"]), EXIT_DOMAIN);
    }
}
