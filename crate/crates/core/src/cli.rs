//! Command-line front end: every experiment in the crate behind one binary.
//!
//! Each subcommand prints a short human summary on stdout and, when `--out`
//! is given, writes the machine artifact there (JSON or CSV per `--format`).
//! The exit status is the verdict: 0 for pass (or for commands that have
//! nothing to judge), 1 for a statistical fail or a scan that found no
//! witness, 2 for a configuration error, with a message on stderr naming
//! the violated invariant.
//!
//! Every command is a deterministic function of its flags. Rerunning the
//! same invocation produces byte-identical machine output at any thread
//! count: parallel scans merge by scan order, JSON fields serialize in
//! declaration order, and floats print shortest-roundtrip.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::criterion::{scan_criterion, stickelberger_element, StickelbergerElement};
use crate::equidist::{
    genericity_test, lead_len, measure_check, reduction_check, GenericityReport,
    MeasureCheckReport, ReductionReport, ReductionThresholds,
};
use crate::padic::{PadicInt, Prime};
use crate::prng::CounterRng;
use crate::{Error, Result};

/// Version stamp on every JSON artifact; bump on any shape change.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "padic-dynamics",
    version,
    about = "Digit dynamics for odd primes: orbit dumps, equidistribution \
             verdicts, measure checks, criterion scans"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dump orbit rows: step, partial-sum value, leading p-adic digits
    Orbit(OrbitArgs),
    /// Digit-statistics battery on one orbit, with a pass/fail verdict
    Genericity(GenericityArgs),
    /// Monte Carlo check that uniform digit words push forward to the
    /// interval and cylinder measures
    MeasureCheck(MeasureCheckArgs),
    /// Evaluate the twisted digit-sum criterion over a range of integer
    /// starting points and levels
    Criterion(CriterionArgs),
    /// Compare the joint box test of r coupled orbits against every
    /// integer-combination line
    Reduction(ReductionArgs),
    /// Emit the table of Stickelberger coefficients at one level
    Stickelberger(StickelbergerArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    fn name(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Odd prime p
    #[arg(long)]
    pub prime: u64,
    /// Machine output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write machine output to this path; stdout stays a human summary
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exactly one source must be given; a literal digit list is padded with
/// zeros up to the working precision.
#[derive(Args, Debug, Clone)]
pub struct AlphaArgs {
    /// Base-p digits of alpha, least significant first, comma separated
    #[arg(long, value_delimiter = ',')]
    pub alpha_digits: Option<Vec<u64>>,
    /// Draw alpha's digits uniformly from this seed
    #[arg(long)]
    pub alpha_seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub alpha: AlphaArgs,
    /// Number of orbit rows
    #[arg(long, default_value_t = 1000)]
    pub length: usize,
    /// Digit precision [default: length, or the digit count if larger]
    #[arg(long)]
    pub precision: Option<usize>,
}

#[derive(Args, Debug)]
pub struct GenericityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub alpha: AlphaArgs,
    /// Orbit length M
    #[arg(long, default_value_t = 100_000)]
    pub length: usize,
    /// Test every cylinder depth up to this
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    /// Digit precision [default: length + depth, or the digit count if larger]
    #[arg(long)]
    pub precision: Option<usize>,
    /// Per-block z-score bound
    #[arg(long, default_value_t = 5.0)]
    pub z_threshold: f64,
    /// Star-discrepancy bound
    #[arg(long, default_value_t = 0.02)]
    pub dstar_threshold: f64,
}

#[derive(Args, Debug)]
pub struct MeasureCheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of sampled words
    #[arg(long, default_value_t = 100_000)]
    pub length: usize,
    /// Intervals and cylinder blocks are tested to this depth
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    /// Sampling seed
    #[arg(long)]
    pub seed: u64,
    /// Per-test z-score bound
    #[arg(long, default_value_t = 5.0)]
    pub z_threshold: f64,
}

#[derive(Args, Debug)]
pub struct CriterionArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Twisting degree d (odd, 3 <= d <= p-2)
    #[arg(long, conflicts_with = "all_d")]
    pub d: Option<u64>,
    /// Scan every odd degree 3 <= d <= p-2
    #[arg(long)]
    pub all_d: bool,
    /// Starting points are the integers 1..=alpha-max
    #[arg(long, default_value_t = 20)]
    pub alpha_max: u64,
    /// Levels scanned are n = 0..=n-max
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
    /// Digit precision [default: n-max + 1]
    #[arg(long)]
    pub precision: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ReductionArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub alpha: AlphaArgs,
    /// Number of lines; beta_1 = 1 and each later beta_j is drawn from
    /// seed stream j
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    /// Coefficient bound: combinations range over 0 < max|m_i| <= bound
    #[arg(long, default_value_t = 2)]
    pub v_bound: i64,
    /// Orbit length M
    #[arg(long, default_value_t = 100_000)]
    pub length: usize,
    /// Per-line tests use cylinder depths up to this
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    /// Digit precision [default: length + depth, or the digit count if larger]
    #[arg(long)]
    pub precision: Option<usize>,
    /// Seed for the random betas; required when r >= 2
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-line z-score bound
    #[arg(long, default_value_t = 5.0)]
    pub z_threshold: f64,
    /// Per-line star-discrepancy bound
    #[arg(long, default_value_t = 0.02)]
    pub dstar_threshold: f64,
}

#[derive(Args, Debug)]
pub struct StickelbergerArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Table level n
    #[arg(long, default_value_t = 1)]
    pub n_max: usize,
    /// Digit precision [default: n-max + 1]
    #[arg(long)]
    pub precision: Option<usize>,
}

/// What the run concluded; the process exit code.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

/// Parse std::env::args and run. Usage errors exit 2, --help and
/// --version exit 0, verdicts map to 0/1, config errors to 2.
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(2);
        }
    };
    match execute(&cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Orbit(args) => cmd_orbit(args),
        Command::Genericity(args) => cmd_genericity(args),
        Command::MeasureCheck(args) => cmd_measure_check(args),
        Command::Criterion(args) => cmd_criterion(args),
        Command::Reduction(args) => cmd_reduction(args),
        Command::Stickelberger(args) => cmd_stickelberger(args),
    }
}

// ---- shared plumbing ----

/// Echo of where alpha came from, for the config block of the artifact.
#[derive(Serialize, Debug, Clone, PartialEq)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum AlphaSource {
    Digits { digits: Vec<u64> },
    Seed { seed: u64 },
}

fn resolve_alpha(args: &AlphaArgs, p: Prime, precision: usize) -> Result<(PadicInt, AlphaSource)> {
    match (&args.alpha_digits, args.alpha_seed) {
        (Some(digits), None) => {
            if digits.is_empty() {
                return Err(Error::EmptyInput("alpha digit list"));
            }
            if digits.len() > precision {
                return Err(Error::InvalidParameter(format!(
                    "invariant violated: precision >= alpha digit count \
                     ({precision} < {})",
                    digits.len()
                )));
            }
            let mut padded = digits.clone();
            padded.resize(precision, 0);
            let alpha = PadicInt::from_digits(p, padded)?;
            let source = AlphaSource::Digits {
                digits: digits.clone(),
            };
            Ok((alpha, source))
        }
        (None, Some(seed)) => Ok((
            PadicInt::random(seed, p, precision),
            AlphaSource::Seed { seed },
        )),
        _ => Err(Error::InvalidParameter(
            "invariant violated: exactly one alpha source, \
             --alpha-digits or --alpha-seed"
                .into(),
        )),
    }
}

/// Default precision for orbit-walking commands, never below the literal
/// digit count so a fully spelled-out alpha is always accepted.
fn default_precision(length: usize, depth: u32, alpha: &AlphaArgs) -> usize {
    let digits = alpha.alpha_digits.as_ref().map_or(0, Vec::len);
    (length + depth as usize).max(digits)
}

fn require_window(precision: usize, length: usize, depth: u32) -> Result<()> {
    if precision < length + depth as usize {
        return Err(Error::InvalidParameter(format!(
            "invariant violated: precision >= length + depth \
             ({precision} < {length} + {depth})"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    schema: u32,
    command: &'a str,
    config: &'a C,
    report: &'a R,
}

/// Write the machine artifact if --out was given; JSON is the versioned
/// envelope, CSV comes from the per-command body.
fn write_machine<C, R, F>(
    common: &CommonArgs,
    command: &str,
    config: &C,
    report: &R,
    csv_body: F,
) -> Result<()>
where
    C: Serialize,
    R: Serialize,
    F: FnOnce() -> Result<String>,
{
    let Some(path) = &common.out else {
        return Ok(());
    };
    let bytes = match common.format {
        OutputFormat::Json => {
            let envelope = Envelope {
                schema: SCHEMA_VERSION,
                command,
                config,
                report,
            };
            let mut text = serde_json::to_string_pretty(&envelope)
                .map_err(|e| Error::InvalidParameter(format!("serialization: {e}")))?;
            text.push('\n');
            text
        }
        OutputFormat::Csv => csv_body()?,
    };
    fs::write(path, bytes)
        .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display())))?;
    println!(
        "machine output: {} ({})",
        path.display(),
        common.format.name()
    );
    Ok(())
}

fn csv_to_string<F>(write: F) -> Result<String>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf)?;
    String::from_utf8(buf).map_err(|_| Error::InvalidParameter("csv not utf-8".into()))
}

fn describe_alpha(source: &AlphaSource) -> String {
    match source {
        AlphaSource::Digits { digits } => {
            let joined: Vec<String> = digits.iter().map(u64::to_string).collect();
            format!("digits [{}]", joined.join(","))
        }
        AlphaSource::Seed { seed } => format!("seed {seed}"),
    }
}

// ---- orbit ----

#[derive(Serialize)]
struct OrbitConfig {
    p: u64,
    length: usize,
    precision: usize,
    alpha: AlphaSource,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
struct OrbitRow {
    n: usize,
    digit: u64,
    value: f64,
    padic_lead: Vec<u64>,
}

#[derive(Serialize)]
struct OrbitReport {
    rows: Vec<OrbitRow>,
}

/// How many digits of the p-adic coordinate each orbit row shows.
const ORBIT_LEAD_DIGITS: usize = 8;

/// Row n: the digit consumed at step n, the partial-sum value
/// s_n / p^(n+1) = 0.t_n t_(n-1) ..., and the next few digits of the
/// p-adic coordinate (digits n+1 and up, truncated at the precision end).
fn orbit_rows(alpha: &PadicInt, len: usize) -> Result<Vec<OrbitRow>> {
    if len == 0 {
        return Err(Error::EmptyInput("orbit length"));
    }
    if alpha.precision() < len {
        return Err(Error::PrecisionExhausted {
            wanted: len,
            available: alpha.precision(),
        });
    }
    let p = alpha.prime().get();
    let ll = lead_len(alpha.prime());
    let top = p.pow(ll as u32 - 1);
    let scale = top as f64 * p as f64;
    let digits = alpha.digits();
    let mut rows = Vec::with_capacity(len);
    let mut lead = 0u64;
    for n in 0..len {
        lead = digits[n] * top + lead / p;
        let tail_end = (n + 1 + ORBIT_LEAD_DIGITS).min(digits.len());
        rows.push(OrbitRow {
            n,
            digit: digits[n],
            value: lead as f64 / scale,
            padic_lead: digits[n + 1..tail_end].to_vec(),
        });
    }
    Ok(rows)
}

fn orbit_csv(rows: &[OrbitRow]) -> Result<String> {
    csv_to_string(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["n", "digit", "value", "padic_lead"])
            .and_then(|()| {
                for row in rows {
                    let joined: Vec<String> =
                        row.padic_lead.iter().map(u64::to_string).collect();
                    w.write_record([
                        row.n.to_string(),
                        row.digit.to_string(),
                        row.value.to_string(),
                        joined.join(" "),
                    ])?;
                }
                w.flush().map_err(csv::Error::from)
            })
            .map_err(|e| Error::InvalidParameter(format!("csv: {e}")))
    })
}

fn cmd_orbit(args: &OrbitArgs) -> Result<Outcome> {
    let p = Prime::new(args.common.prime)?;
    let precision = args
        .precision
        .unwrap_or_else(|| default_precision(args.length, 0, &args.alpha));
    require_window(precision, args.length, 0)?;
    let (alpha, source) = resolve_alpha(&args.alpha, p, precision)?;
    let rows = orbit_rows(&alpha, args.length)?;

    println!(
        "orbit: p={}, length={}, precision={}, alpha={}",
        p.get(),
        args.length,
        precision,
        describe_alpha(&source)
    );
    for row in rows.iter().take(3) {
        println!("  n={} digit={} value={:.6}", row.n, row.digit, row.value);
    }
    if rows.len() > 3 {
        println!("  ... {} rows total", rows.len());
    }

    let config = OrbitConfig {
        p: p.get(),
        length: args.length,
        precision,
        alpha: source,
    };
    let report = OrbitReport { rows };
    write_machine(&args.common, "orbit", &config, &report, || {
        orbit_csv(&report.rows)
    })?;
    Ok(Outcome::Pass)
}

// ---- genericity ----

#[derive(Serialize)]
struct GenericityConfig {
    p: u64,
    length: usize,
    depth: u32,
    precision: usize,
    z_threshold: f64,
    dstar_threshold: f64,
    alpha: AlphaSource,
}

fn cmd_genericity(args: &GenericityArgs) -> Result<Outcome> {
    let p = Prime::new(args.common.prime)?;
    let precision = args
        .precision
        .unwrap_or_else(|| default_precision(args.length, args.depth, &args.alpha));
    require_window(precision, args.length, args.depth)?;
    let (alpha, source) = resolve_alpha(&args.alpha, p, precision)?;
    let report = genericity_test(
        &alpha,
        args.length,
        args.depth,
        args.z_threshold,
        args.dstar_threshold,
    )?;

    println!(
        "genericity: p={}, M={}, depth<={}, alpha={}",
        p.get(),
        args.length,
        args.depth,
        describe_alpha(&source)
    );
    println!(
        "star discrepancy {:.6} (threshold {})",
        report.star_discrepancy, report.dstar_threshold
    );
    println!("box discrepancy  {:.6}", report.box_discrepancy);
    println!(
        "max |z|          {:.3} over {} blocks (threshold {})",
        report.max_abs_z,
        report.cylinders.len(),
        report.z_threshold
    );
    println!("verdict: {}", if report.pass { "PASS" } else { "FAIL" });

    let config = GenericityConfig {
        p: p.get(),
        length: args.length,
        depth: args.depth,
        precision,
        z_threshold: args.z_threshold,
        dstar_threshold: args.dstar_threshold,
        alpha: source,
    };
    write_machine(&args.common, "genericity", &config, &report, || {
        genericity_csv(&report)
    })?;
    Ok(if report.pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn genericity_csv(report: &GenericityReport) -> Result<String> {
    csv_to_string(|buf| report.to_csv(buf))
}

// ---- measure-check ----

#[derive(Serialize)]
struct MeasureConfig {
    p: u64,
    length: usize,
    depth: u32,
    seed: u64,
    z_threshold: f64,
}

fn cmd_measure_check(args: &MeasureCheckArgs) -> Result<Outcome> {
    let p = Prime::new(args.common.prime)?;
    let report = measure_check(p, args.length, args.depth, args.seed, args.z_threshold)?;

    println!(
        "measure-check: p={}, M={}, depth<={}, seed={}",
        p.get(),
        args.length,
        args.depth,
        args.seed
    );
    println!(
        "{} tests, max |z| = {:.3} (threshold {})",
        report.tests.len(),
        report.max_abs_z,
        report.z_threshold
    );
    println!("verdict: {}", if report.pass { "PASS" } else { "FAIL" });

    let config = MeasureConfig {
        p: p.get(),
        length: args.length,
        depth: args.depth,
        seed: args.seed,
        z_threshold: args.z_threshold,
    };
    write_machine(&args.common, "measure-check", &config, &report, || {
        measure_csv(&report)
    })?;
    Ok(if report.pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn measure_csv(report: &MeasureCheckReport) -> Result<String> {
    csv_to_string(|buf| report.to_csv(buf))
}

// ---- criterion ----

#[derive(Serialize)]
struct CriterionConfig {
    p: u64,
    degrees: Vec<u64>,
    alpha_max: u64,
    n_max: usize,
    precision: usize,
}

/// The witness pair (alpha digits, level), shaped as a JSON 2-array.
#[derive(Serialize, Debug, Clone, PartialEq)]
struct WitnessPair(Vec<u64>, usize);

#[derive(Serialize)]
struct CriterionScanResult {
    p: u64,
    d: u64,
    witness: Option<WitnessPair>,
    alpha: Option<u64>,
    residue: Option<u64>,
    scanned: ScanCounts,
}

#[derive(Serialize)]
struct ScanCounts {
    alphas: u64,
    levels: usize,
}

#[derive(Serialize)]
struct CriterionAllReport {
    p: u64,
    results: Vec<CriterionScanResult>,
}

/// Digits of alpha with the zero tail trimmed, at least one digit kept.
fn trimmed_digits(alpha: &PadicInt) -> Vec<u64> {
    let digits = alpha.digits();
    let end = digits.iter().rposition(|&d| d != 0).map_or(1, |i| i + 1);
    digits[..end].to_vec()
}

fn degrees_for(args: &CriterionArgs, p: Prime) -> Result<Vec<u64>> {
    match (args.d, args.all_d) {
        (Some(d), false) => Ok(vec![d]),
        (None, true) => {
            let degrees: Vec<u64> = (3..=p.get().saturating_sub(2)).step_by(2).collect();
            if degrees.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "no odd degrees in 3..=p-2 for p={}",
                    p.get()
                )));
            }
            Ok(degrees)
        }
        _ => Err(Error::InvalidParameter(
            "invariant violated: exactly one degree source, --d or --all-d".into(),
        )),
    }
}

fn cmd_criterion(args: &CriterionArgs) -> Result<Outcome> {
    let p = Prime::new(args.common.prime)?;
    let degrees = degrees_for(args, p)?;
    let precision = args.precision.unwrap_or(args.n_max + 1);
    if precision < args.n_max + 1 {
        return Err(Error::InvalidParameter(format!(
            "invariant violated: precision >= n-max + 1 ({} < {})",
            precision,
            args.n_max + 1
        )));
    }
    let alphas: Vec<PadicInt> = (1..=args.alpha_max)
        .map(|a| PadicInt::from_integer(a, p, precision))
        .collect::<Result<_>>()?;

    println!(
        "criterion: p={}, alpha in 1..={}, n in 0..={}",
        p.get(),
        args.alpha_max,
        args.n_max
    );
    let mut results = Vec::with_capacity(degrees.len());
    let mut all_found = true;
    for &d in &degrees {
        let hit = scan_criterion(p, d, &alphas, args.n_max)?;
        match &hit {
            Some(w) => println!(
                "  d={}: witness alpha={} n={} sum={} (mod {})",
                d,
                w.index + 1,
                w.n,
                w.residue,
                p.get()
            ),
            None => {
                println!("  d={d}: no witness in range");
                all_found = false;
            }
        }
        results.push(CriterionScanResult {
            p: p.get(),
            d,
            witness: hit
                .as_ref()
                .map(|w| WitnessPair(trimmed_digits(&alphas[w.index]), w.n)),
            alpha: hit.as_ref().map(|w| w.index as u64 + 1),
            residue: hit.as_ref().map(|w| w.residue),
            scanned: ScanCounts {
                alphas: args.alpha_max,
                levels: args.n_max + 1,
            },
        });
    }
    println!(
        "verdict: {}",
        if all_found {
            "witness for every degree"
        } else {
            "NoneFound"
        }
    );

    let config = CriterionConfig {
        p: p.get(),
        degrees: degrees.clone(),
        alpha_max: args.alpha_max,
        n_max: args.n_max,
        precision,
    };
    if args.all_d {
        let report = CriterionAllReport {
            p: p.get(),
            results,
        };
        write_machine(&args.common, "criterion", &config, &report, || {
            criterion_csv(&report.results)
        })?;
    } else {
        write_machine(&args.common, "criterion", &config, &results[0], || {
            criterion_csv(&results)
        })?;
    }
    Ok(if all_found {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn criterion_csv(results: &[CriterionScanResult]) -> Result<String> {
    csv_to_string(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["p", "d", "alpha", "n", "residue"])
            .and_then(|()| {
                for r in results {
                    let blank = String::new;
                    w.write_record([
                        r.p.to_string(),
                        r.d.to_string(),
                        r.alpha.map_or_else(blank, |a| a.to_string()),
                        r.witness
                            .as_ref()
                            .map_or_else(blank, |pair| pair.1.to_string()),
                        r.residue.map_or_else(blank, |v| v.to_string()),
                    ])?;
                }
                w.flush().map_err(csv::Error::from)
            })
            .map_err(|e| Error::InvalidParameter(format!("csv: {e}")))
    })
}

// ---- reduction ----

#[derive(Serialize)]
struct ReductionConfig {
    p: u64,
    r: usize,
    v_bound: i64,
    length: usize,
    depth: u32,
    precision: usize,
    seed: Option<u64>,
    z_threshold: f64,
    dstar_threshold: f64,
    box_depth: u32,
    box_threshold: f64,
    alpha: AlphaSource,
}

fn cmd_reduction(args: &ReductionArgs) -> Result<Outcome> {
    let p = Prime::new(args.common.prime)?;
    if args.r == 0 {
        return Err(Error::EmptyInput("line count r"));
    }
    if args.r >= 2 && args.seed.is_none() {
        return Err(Error::InvalidParameter(
            "invariant violated: seed is mandatory for stochastic commands \
             (--seed required when r >= 2)"
                .into(),
        ));
    }
    let precision = args
        .precision
        .unwrap_or_else(|| default_precision(args.length, args.depth, &args.alpha));
    require_window(precision, args.length, args.depth)?;
    let (alpha, source) = resolve_alpha(&args.alpha, p, precision)?;

    let mut betas = vec![PadicInt::from_integer(1, p, precision)?];
    for j in 2..=args.r {
        let stream_seed = CounterRng::with_stream(args.seed.unwrap_or(0), j as u64).next_u64();
        betas.push(PadicInt::random(stream_seed, p, precision));
    }

    let thresholds = ReductionThresholds {
        max_depth: args.depth,
        z_threshold: args.z_threshold,
        dstar_threshold: args.dstar_threshold,
        ..ReductionThresholds::default()
    };
    let report = reduction_check(&alpha, &betas, args.v_bound, args.length, &thresholds)?;

    println!(
        "reduction: p={}, r={}, bound={}, M={}, alpha={}",
        p.get(),
        args.r,
        args.v_bound,
        args.length,
        describe_alpha(&source)
    );
    println!(
        "joint box discrepancy {:.6} (threshold {}) -> {}",
        report.joint_box_discrepancy,
        report.thresholds.box_threshold,
        if report.joint_pass { "pass" } else { "fail" }
    );
    let passed = report.sigma.iter().filter(|s| s.pass).count();
    println!(
        "per-line: {}/{} pass -> {}",
        passed,
        report.sigma.len(),
        if report.sigma_all_pass { "pass" } else { "fail" }
    );
    println!("agreement: {}", if report.agree { "yes" } else { "no" });

    let config = ReductionConfig {
        p: p.get(),
        r: args.r,
        v_bound: args.v_bound,
        length: args.length,
        depth: args.depth,
        precision,
        seed: args.seed,
        z_threshold: thresholds.z_threshold,
        dstar_threshold: thresholds.dstar_threshold,
        box_depth: thresholds.box_depth,
        box_threshold: thresholds.box_threshold,
        alpha: source,
    };
    write_machine(&args.common, "reduction", &config, &report, || {
        reduction_csv(&report)
    })?;
    Ok(if report.agree {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn reduction_csv(report: &ReductionReport) -> Result<String> {
    csv_to_string(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        let mut rows = || -> csv::Result<()> {
            w.write_record(["kind", "coefficients", "discrepancy", "max_abs_z", "pass"])?;
            w.write_record([
                "joint".to_string(),
                String::new(),
                report.joint_box_discrepancy.to_string(),
                String::new(),
                report.joint_pass.to_string(),
            ])?;
            for s in &report.sigma {
                let joined: Vec<String> = s.coefficients.iter().map(i64::to_string).collect();
                w.write_record([
                    "sigma".to_string(),
                    joined.join(" "),
                    s.star_discrepancy.to_string(),
                    s.max_abs_z.to_string(),
                    s.pass.to_string(),
                ])?;
            }
            w.write_record([
                "agreement".to_string(),
                String::new(),
                String::new(),
                String::new(),
                report.agree.to_string(),
            ])?;
            w.flush()?;
            Ok(())
        };
        rows().map_err(|e| Error::InvalidParameter(format!("csv: {e}")))
    })
}

// ---- stickelberger ----

#[derive(Serialize)]
struct StickelbergerConfig {
    p: u64,
    n: usize,
    precision: usize,
}

#[derive(Serialize)]
struct CoefficientJson {
    u: u64,
    a: u64,
    numerator: String,
    denominator: String,
}

#[derive(Serialize)]
struct StickelbergerJson {
    p: u64,
    n: usize,
    coefficients: Vec<CoefficientJson>,
}

fn cmd_stickelberger(args: &StickelbergerArgs) -> Result<Outcome> {
    let p = Prime::new(args.common.prime)?;
    let precision = args.precision.unwrap_or(args.n_max + 1);
    if precision < args.n_max + 1 {
        return Err(Error::InvalidParameter(format!(
            "invariant violated: precision >= n-max + 1 ({} < {})",
            precision,
            args.n_max + 1
        )));
    }
    let element = stickelberger_element(p, args.n_max, precision)?;

    println!(
        "stickelberger: p={}, n={}, {} coefficients, denominators divide p^{}",
        p.get(),
        args.n_max,
        element.coefficients().len(),
        args.n_max + 1
    );

    let config = StickelbergerConfig {
        p: p.get(),
        n: args.n_max,
        precision,
    };
    let report = StickelbergerJson {
        p: p.get(),
        n: args.n_max,
        coefficients: element
            .coefficients()
            .iter()
            .map(|c| CoefficientJson {
                u: c.u,
                a: c.a,
                numerator: c.value.numer().to_string(),
                denominator: c.value.denom().to_string(),
            })
            .collect(),
    };
    write_machine(&args.common, "stickelberger", &config, &report, || {
        stickelberger_csv(&element)
    })?;
    Ok(Outcome::Pass)
}

fn stickelberger_csv(element: &StickelbergerElement) -> Result<String> {
    csv_to_string(|buf| element.to_csv(buf))
}
