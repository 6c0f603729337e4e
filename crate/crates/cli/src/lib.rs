//! Argument parsing, report assembly and emission for the `abelianity` binary.
//!
//! Exit codes: 0 success, 1 an exact verdict and its independent witness
//! disagree, 2 invalid input.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use abelianity::elliptic::{
    centrality_ratio, grid, standard_grid, yfunc_half_nomes, EllipticContext,
};
use abelianity::lattice::{
    classify_intersection, classify_lambda, gcd, intersect_surfaces, lambda_of_intersection,
    realize_line_as_intersections, solve_condition2, super_abelianity_check, surfaces_through_line,
    AbelianityVerdict, Intersection, LambdaFamily, LambdaPair, LineParams, Realization,
    SideVerdict, SuperOutcome, Surface, TheoremCase, VerdictTag, Witness,
};
use abelianity::oracle::{centrality_exponents, exchange_exponents, is_abelian, ExponentMultiset};
use abelianity::poisson::{f_kk, PoissonLine, PoissonParamsA, PoissonParamsB};
use abelianity::{Error, Rational};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_INVALID: u8 = 2;

/// Relative agreement required between the two Poisson routes.
const ROUTE_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(
    name = "abelianity",
    version,
    about = "Abelianity lines on critical surfaces S_(m,n)"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Also write the output stream to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; csv is available for `poisson` (its default) and `scan`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Level {
    /// Rank N of the algebra.
    #[arg(long = "N", default_value_t = 3, value_parser = clap::value_parser!(u32).range(2..))]
    n: u32,
}

#[derive(Args, Debug)]
struct Numeric {
    #[command(flatten)]
    level: Level,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    /// Evaluation grid "r1,r2,count" (default 0.8,1.25,20).
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    /// Threshold separating "identically 1" from "not 1".
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Intersect two surfaces and classify the line on each.
    Intersect {
        #[arg(long, value_parser = parse_surface, allow_hyphen_values = true)]
        s1: Surface,
        #[arg(long, value_parser = parse_surface, allow_hyphen_values = true)]
        s2: Surface,
        #[command(flatten)]
        level: Level,
    },
    /// Classify the line with coordinate λ on a surface.
    Classify {
        #[arg(long, value_parser = parse_surface, allow_hyphen_values = true)]
        s1: Surface,
        /// Not needed on S_(0,n) and S_(m,0).
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        lambda: Option<Rational>,
        #[command(flatten)]
        level: Level,
    },
    /// List the lines cut on a surface by every partner in a box.
    EnumerateLines {
        #[arg(long, value_parser = parse_surface, allow_hyphen_values = true)]
        s1: Surface,
        #[arg(long = "box", default_value_t = 6, value_parser = clap::value_parser!(i64).range(1..))]
        bound: i64,
        #[command(flatten)]
        level: Level,
    },
    /// Surfaces through a line given by two surfaces, or by a surface and λ.
    SurfacesThrough {
        #[arg(long, value_parser = parse_surface, allow_hyphen_values = true)]
        s1: Surface,
        #[arg(long, value_parser = parse_surface, allow_hyphen_values = true, conflicts_with = "lambda")]
        s2: Option<Surface>,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        lambda: Option<Rational>,
        /// Steps "lo,hi" along the line, used with --s2.
        #[arg(long, value_parser = parse_int_range, allow_hyphen_values = true, default_value = "-5,5")]
        t_range: IntRange,
        /// Number of surfaces, used with --lambda.
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Classify a line and check max|Y - 1| on the grid against the verdict.
    VerifyY {
        #[arg(long, value_parser = parse_surface, allow_hyphen_values = true)]
        s1: Surface,
        #[arg(long, value_parser = parse_surface, allow_hyphen_values = true, conflicts_with = "lambda")]
        s2: Option<Surface>,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        lambda: Option<Rational>,
        #[command(flatten)]
        numeric: Numeric,
    },
    /// Super-abelianity of S_(m,-m) at integer λ, with the centrality ratio.
    VerifySuper {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: i64,
        #[command(flatten)]
        numeric: Numeric,
    },
    /// Poisson structure function f(x) on an abelianity line, as CSV rows.
    Poisson {
        #[arg(long, value_parser = parse_surface, allow_hyphen_values = true)]
        s1: Surface,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        lambda: Rational,
        #[command(flatten)]
        numeric: Numeric,
        /// Sample x = exp(2πit) for t in "t0,t1" instead of the grid.
        #[arg(long, value_parser = parse_float_range, allow_hyphen_values = true)]
        t_range: Option<FloatRange>,
        /// Number of samples along --t-range.
        #[arg(long, default_value_t = 64)]
        count: usize,
        /// Evaluate f^(k,k') instead of f.
        #[arg(long, requires = "kp")]
        k: Option<u32>,
        #[arg(long, requires = "k")]
        kp: Option<u32>,
    },
    /// Classify every intersecting pair of surfaces with |m|, |n| <= box.
    Scan {
        #[arg(long = "box", default_value_t = 6, value_parser = clap::value_parser!(i64).range(1..))]
        bound: i64,
        #[command(flatten)]
        level: Level,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub r1: f64,
    pub r2: f64,
    pub count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntRange {
    pub lo: i64,
    pub hi: i64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatRange {
    pub lo: f64,
    pub hi: f64,
}

fn pair(s: &str) -> Result<(&str, &str), String> {
    s.split_once(',')
        .ok_or_else(|| format!("expected two comma-separated values, got {s:?}"))
}

pub fn parse_surface(s: &str) -> Result<Surface, String> {
    let (m, n) = pair(s)?;
    let m = m.parse().map_err(|_| format!("invalid integer {m:?}"))?;
    let n = n.parse().map_err(|_| format!("invalid integer {n:?}"))?;
    Surface::new(m, n).map_err(|e| e.to_string())
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<_> = s.split(',').collect();
    let [r1, r2, count] = parts[..] else {
        return Err(format!("expected \"r1,r2,count\", got {s:?}"));
    };
    let radius = |r: &str| match r.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("invalid radius {r:?}")),
    };
    let count = match count.parse::<usize>() {
        Ok(c) if c > 0 => c,
        _ => return Err(format!("invalid point count {count:?}")),
    };
    Ok(GridSpec {
        r1: radius(r1)?,
        r2: radius(r2)?,
        count,
    })
}

fn parse_int_range(s: &str) -> Result<IntRange, String> {
    let (lo, hi) = pair(s)?;
    let lo = lo.parse().map_err(|_| format!("invalid integer {lo:?}"))?;
    let hi = hi.parse().map_err(|_| format!("invalid integer {hi:?}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(IntRange { lo, hi })
}

fn parse_float_range(s: &str) -> Result<FloatRange, String> {
    let (lo, hi) = pair(s)?;
    let num = |v: &str| match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("invalid number {v:?}")),
    };
    Ok(FloatRange {
        lo: num(lo)?,
        hi: num(hi)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LineReport {
    pub e_p: Rational,
    pub e_pstar: Rational,
    #[serde(rename = "c_over_N")]
    pub c_over_n: Rational,
}

impl From<&LineParams> for LineReport {
    fn from(l: &LineParams) -> Self {
        LineReport {
            e_p: l.e_p(),
            e_pstar: l.e_pstar(),
            c_over_n: l.c_over_n(),
        }
    }
}

/// Lattice verdict on one surface, with the cancellation oracle alongside.
#[derive(Clone, Debug, Serialize)]
pub struct SideReport {
    pub surface: Surface,
    pub lambda: Option<Rational>,
    pub lambda_star: Option<Rational>,
    pub verdict: VerdictTag,
    pub case: Option<TheoremCase>,
    pub witness: Option<Witness>,
    pub n_caveat: bool,
    pub oracle_abelian: bool,
    /// Exponents left uncancelled in Y; empty exactly when Y = 1.
    pub oracle_residual: ExponentMultiset,
}

impl SideReport {
    fn new(
        surface: Surface,
        lam: Option<LambdaPair>,
        verdict: AbelianityVerdict,
        case: Option<TheoremCase>,
    ) -> Self {
        // on S_(0,n) and S_(m,0) the exponents do not depend on λ
        let residual =
            exchange_exponents(&surface, &lam.unwrap_or(LambdaPair::new(Rational::ZERO)));
        SideReport {
            surface,
            lambda: lam.map(|l| l.lambda()),
            lambda_star: lam.map(|l| l.lambda_star()),
            verdict: verdict.tag,
            case,
            witness: verdict.witness,
            n_caveat: verdict.n_caveat,
            oracle_abelian: is_abelian(&residual),
            oracle_residual: residual,
        }
    }

    fn from_side(side: &SideVerdict) -> Self {
        SideReport::new(side.surface, side.lambda, side.verdict, side.case)
    }

    fn agrees(&self) -> bool {
        self.oracle_abelian == self.verdict.is_abelian()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionReport {
    pub line: LineReport,
    pub sides: [SideReport; 2],
}

/// Output of one command: the data stream plus diagnostics for stderr.
#[derive(Debug, Default)]
pub struct Output {
    pub bytes: Vec<u8>,
    pub mismatches: Vec<String>,
    pub notes: Vec<String>,
}

enum Failure {
    Invalid(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CrossCheck(msg) => Failure::Mismatch(msg),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Parse `args` (including the program name), run the command and write its
/// output. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let line = rendered
                .lines()
                .next()
                .unwrap_or("error: invalid arguments");
            let _ = writeln!(stderr, "{line}");
            return EXIT_INVALID;
        }
    };
    let output = match execute(&cli) {
        Ok(output) => output,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_INVALID;
        }
        Err(Failure::Mismatch(msg)) => Output {
            bytes: json_line(&serde_json::json!({ "cross_check_failure": msg })),
            mismatches: vec![msg],
            notes: Vec::new(),
        },
    };
    if stdout
        .write_all(&output.bytes)
        .and_then(|_| stdout.flush())
        .is_err()
    {
        return EXIT_INVALID;
    }
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &output.bytes) {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
            return EXIT_INVALID;
        }
    }
    for note in &output.notes {
        let _ = writeln!(stderr, "note: {note}");
    }
    for m in &output.mismatches {
        let _ = writeln!(stderr, "mismatch: {m}");
    }
    if output.mismatches.is_empty() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

/// Serialize one report as a single JSON line.
pub fn json_line<T: Serialize>(report: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec(report).expect("reports serialize to JSON");
    bytes.push(b'\n');
    bytes
}

/// Serialize rows as CSV with a header taken from the row's field names.
pub fn csv_rows<T: Serialize>(rows: &[T]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("rows serialize to CSV");
    }
    w.into_inner().expect("in-memory CSV writer")
}

/// Emit a report in the requested format.
pub fn emit<T: Serialize, R: Serialize>(report: &T, rows: Option<&[R]>, format: Format) -> Vec<u8> {
    match (format, rows) {
        (Format::Csv, Some(rows)) => csv_rows(rows),
        _ => json_line(report),
    }
}

fn json_only(format: Option<Format>) -> Outcome<()> {
    match format {
        Some(Format::Csv) => Err(Failure::Invalid(
            "csv output is available for poisson and scan only".into(),
        )),
        _ => Ok(()),
    }
}

fn execute(cli: &Cli) -> Outcome<Output> {
    match &cli.command {
        Command::Intersect { s1, s2, level } => {
            json_only(cli.format)?;
            intersect(s1, s2, level.n)
        }
        Command::Classify { s1, lambda, level } => {
            json_only(cli.format)?;
            classify(s1, *lambda, level.n)
        }
        Command::EnumerateLines { s1, bound, level } => {
            json_only(cli.format)?;
            enumerate_lines(s1, *bound, level.n)
        }
        Command::SurfacesThrough {
            s1,
            s2,
            lambda,
            t_range,
            count,
        } => {
            json_only(cli.format)?;
            surfaces_through(s1, *s2, *lambda, *t_range, *count)
        }
        Command::VerifyY {
            s1,
            s2,
            lambda,
            numeric,
        } => {
            json_only(cli.format)?;
            verify_y(s1, *s2, *lambda, numeric)
        }
        Command::VerifySuper { m, lambda, numeric } => {
            json_only(cli.format)?;
            verify_super(*m, *lambda, numeric)
        }
        Command::Poisson {
            s1,
            lambda,
            numeric,
            t_range,
            count,
            k,
            kp,
        } => poisson(
            s1,
            *lambda,
            numeric,
            *t_range,
            *count,
            k.zip(*kp),
            cli.format.unwrap_or(Format::Csv),
        ),
        Command::Scan { bound, level } => scan(*bound, level.n, cli.format.unwrap_or(Format::Json)),
    }
}

fn box_surfaces(bound: i64) -> Vec<Surface> {
    let mut out = Vec::new();
    for m in -bound..=bound {
        for n in -bound..=bound {
            if let Ok(s) = Surface::new(m, n) {
                out.push(s);
            }
        }
    }
    out
}

/// Classify `a ∩ b`, or `None` when the surfaces are disjoint.
fn classify_pair(a: &Surface, b: &Surface, n: u32) -> Outcome<Option<IntersectionReport>> {
    if let Intersection::Empty(_) = intersect_surfaces(a, b) {
        return Ok(None);
    }
    let v = classify_intersection(a, b, n)?;
    Ok(Some(IntersectionReport {
        line: LineReport::from(&v.line),
        sides: [
            SideReport::from_side(&v.first),
            SideReport::from_side(&v.second),
        ],
    }))
}

fn oracle_mismatches(sides: &[SideReport], out: &mut Vec<String>) {
    for side in sides.iter().filter(|s| !s.agrees()) {
        out.push(format!(
            "{} λ={:?}: lattice says {:?}, oracle abelian = {}",
            side.surface, side.lambda, side.verdict, side.oracle_abelian
        ));
    }
}

fn intersect(s1: &Surface, s2: &Surface, n: u32) -> Outcome<Output> {
    #[derive(Serialize)]
    struct Report {
        intersection: Option<IntersectionReport>,
    }
    let mut output = Output::default();
    let intersection = classify_pair(s1, s2, n)?;
    match (&intersection, intersect_surfaces(s1, s2)) {
        (Some(r), _) => oracle_mismatches(&r.sides, &mut output.mismatches),
        (None, Intersection::Empty(why)) => output.notes.push(format!("no intersection: {why}")),
        (None, Intersection::Line(_)) => {
            unreachable!("classify_pair returns a report for every line")
        }
    }
    output.bytes = json_line(&Report { intersection });
    Ok(output)
}

/// λ on a surface with non-zero indices, excluding the boundary values 0 and 1
/// where a nome lands on the unit circle.
fn line_coordinate(s: &Surface, lambda: Option<Rational>) -> Outcome<LambdaPair> {
    if s.has_zero_index() {
        return Err(Failure::Invalid(format!(
            "λ does not parametrize lines on {s}; give a partner surface instead"
        )));
    }
    let lambda = lambda.ok_or_else(|| Failure::Invalid("--lambda is required".into()))?;
    if lambda.is_zero() || lambda == Rational::ONE {
        return Err(Failure::Invalid(format!(
            "λ = {lambda} puts a nome on the unit circle"
        )));
    }
    Ok(LambdaPair::new(lambda))
}

fn classify(s1: &Surface, lambda: Option<Rational>, n: u32) -> Outcome<Output> {
    #[derive(Serialize)]
    struct Report {
        line: Option<LineReport>,
        #[serde(flatten)]
        side: SideReport,
    }
    let (lam, line) = if s1.has_zero_index() {
        (None, None)
    } else {
        let lam = line_coordinate(s1, lambda)?;
        (Some(lam), Some(LineReport::from(&lam.line_params(s1)?)))
    };
    let verdict = classify_lambda(s1, &lam.unwrap_or(LambdaPair::new(Rational::ZERO)), n);
    let side = SideReport::new(*s1, lam, verdict, None);
    let mut output = Output::default();
    oracle_mismatches(std::slice::from_ref(&side), &mut output.mismatches);
    output.bytes = json_line(&Report { line, side });
    Ok(output)
}

fn enumerate_lines(s1: &Surface, bound: i64, n: u32) -> Outcome<Output> {
    #[derive(Serialize)]
    struct Entry {
        line: LineReport,
        #[serde(flatten)]
        side: SideReport,
        partners: Vec<Surface>,
    }
    #[derive(Serialize)]
    struct Report {
        surface: Surface,
        #[serde(rename = "box")]
        bound: i64,
        line_count: usize,
        abelian_count: usize,
        lines: Vec<Entry>,
        condition2_families: Vec<LambdaFamily>,
    }
    let mut lines: Vec<(LineParams, Entry)> = Vec::new();
    for partner in box_surfaces(bound) {
        let Some(line) = intersect_surfaces(s1, &partner).line().copied() else {
            continue;
        };
        if let Some((_, entry)) = lines.iter_mut().find(|(l, _)| *l == line) {
            entry.partners.push(partner);
            continue;
        }
        let v = classify_intersection(s1, &partner, n)?;
        let mut side = SideReport::from_side(&v.first);
        // the clause that fired depends on the partner, not on the line
        side.case = None;
        lines.push((
            line,
            Entry {
                line: LineReport::from(&line),
                side,
                partners: vec![partner],
            },
        ));
    }
    lines.sort_by_key(|(line, _)| *line);
    let lines: Vec<Entry> = lines.into_iter().map(|(_, e)| e).collect();
    let mut output = Output::default();
    let sides: Vec<_> = lines.iter().map(|e| e.side.clone()).collect();
    oracle_mismatches(&sides, &mut output.mismatches);
    let condition2_families = match solve_condition2(s1) {
        Ok(f) => f,
        Err(
            Error::EmptyFamily(_) | Error::Precondition(_) | Error::DegenerateParametrization(_),
        ) => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    output.bytes = json_line(&Report {
        surface: *s1,
        bound,
        line_count: lines.len(),
        abelian_count: lines.iter().filter(|e| e.side.verdict.is_abelian()).count(),
        lines,
        condition2_families,
    });
    Ok(output)
}

fn surfaces_through(
    s1: &Surface,
    s2: Option<Surface>,
    lambda: Option<Rational>,
    t_range: IntRange,
    count: usize,
) -> Outcome<Output> {
    #[derive(Serialize)]
    struct ThroughPair {
        line: LineReport,
        surfaces: Vec<Surface>,
    }
    #[derive(Serialize)]
    struct ThroughLambda {
        surface: Surface,
        lambda: Rational,
        lambda_star: Rational,
        line: LineReport,
        verdict: VerdictTag,
        realization: Realization,
    }
    let mut output = Output::default();
    if let Some(s2) = s2 {
        let line = intersect_surfaces(s1, &s2).into_result()?;
        let surfaces = surfaces_through_line(s1, &s2, t_range.lo..=t_range.hi)?;
        for s in &surfaces {
            let partner = if s == s1 { s2 } else { *s1 };
            if intersect_surfaces(s, &partner).line() != Some(&line) {
                output
                    .mismatches
                    .push(format!("{s} does not contain the line"));
            }
        }
        output.bytes = json_line(&ThroughPair {
            line: LineReport::from(&line),
            surfaces,
        });
        return Ok(output);
    }
    if lambda.is_none() {
        return Err(Failure::Invalid("give --s2 or --lambda".into()));
    }
    let lam = line_coordinate(s1, lambda)?;
    let realization = realize_line_as_intersections(s1, &lam, count)?;
    for s in realization.surfaces.iter().chain(&realization.constructed) {
        if lambda_of_intersection(s1, s).as_ref() != Ok(&lam) {
            output
                .mismatches
                .push(format!("{s} does not cut {s1} at λ = {}", lam.lambda()));
        }
    }
    output.bytes = json_line(&ThroughLambda {
        surface: *s1,
        lambda: lam.lambda(),
        lambda_star: lam.lambda_star(),
        line: LineReport::from(&lam.line_params(s1)?),
        verdict: classify_lambda(s1, &lam, 3).tag,
        realization,
    });
    Ok(output)
}

fn context(numeric: &Numeric) -> Outcome<(EllipticContext, Vec<Complex64>)> {
    if numeric.tol.is_nan() || numeric.tol <= 0.0 {
        return Err(Failure::Invalid(format!(
            "tolerance {} must be positive",
            numeric.tol
        )));
    }
    let ctx = EllipticContext::new(numeric.level.n, numeric.q)?;
    let points = match numeric.grid {
        Some(g) => grid(g.r1, g.r2, g.count),
        None => standard_grid(),
    };
    Ok((ctx, points))
}

/// Maximum of `|value(x) - 1|` over the points that are not poles.
fn max_deviation(
    points: &[Complex64],
    mut value: impl FnMut(Complex64) -> abelianity::Result<Complex64>,
) -> Outcome<(f64, usize)> {
    let mut worst = 0.0f64;
    let mut skipped = 0;
    for &x in points {
        match value(x) {
            Ok(v) => worst = worst.max((v - 1.0).norm()),
            Err(Error::Pole(_)) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    if skipped == points.len() {
        return Err(Failure::Invalid("every grid point is a pole".into()));
    }
    Ok((worst, skipped))
}

fn verify_y(
    s1: &Surface,
    s2: Option<Surface>,
    lambda: Option<Rational>,
    numeric: &Numeric,
) -> Outcome<Output> {
    #[derive(Serialize)]
    struct Report {
        line: LineReport,
        #[serde(flatten)]
        side: SideReport,
        #[serde(rename = "N")]
        n: u32,
        q: f64,
        grid_points: usize,
        skipped_poles: usize,
        max_abs_y_minus_1: f64,
        tolerance: f64,
        pass: bool,
    }
    let (ctx, points) = context(numeric)?;
    let n = numeric.level.n;
    let (line, side) = match s2 {
        Some(s2) => {
            let v = classify_intersection(s1, &s2, n)?;
            (v.line, SideReport::from_side(&v.first))
        }
        None => {
            let lam = line_coordinate(s1, lambda)?;
            let verdict = classify_lambda(s1, &lam, n);
            (
                lam.line_params(s1)?,
                SideReport::new(*s1, Some(lam), verdict, None),
            )
        }
    };
    // raw half-nomes of the line, with no periodicity reduction
    let half = Complex64::new(ctx.q_pow_n(line.e_p()), 0.0);
    let half_star = Complex64::new(ctx.q_pow_n(line.e_pstar()), 0.0);
    let (worst, skipped) =
        max_deviation(&points, |x| yfunc_half_nomes(&ctx, s1, half, half_star, x))?;
    let numeric_abelian = worst < numeric.tol;
    let pass = side.agrees() && numeric_abelian == side.verdict.is_abelian();
    let mut output = Output::default();
    if !pass {
        output.mismatches.push(format!(
            "{s1}: verdict {:?}, oracle abelian = {}, max|Y-1| = {worst:e}",
            side.verdict, side.oracle_abelian
        ));
    }
    output.bytes = json_line(&Report {
        line: LineReport::from(&line),
        side,
        n,
        q: ctx.q(),
        grid_points: points.len(),
        skipped_poles: skipped,
        max_abs_y_minus_1: worst,
        tolerance: numeric.tol,
        pass,
    });
    Ok(output)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum NumericCall {
    Confirms,
    Contradicts,
    /// Ratio is 1 although the line is not super-abelian; happens only when
    /// `gcd(m, N) > 1`, where the multiplication formula for θ collapses the products.
    Inconclusive,
}

fn verify_super(m: i64, lambda: i64, numeric: &Numeric) -> Outcome<Output> {
    #[derive(Serialize)]
    struct Report {
        m: i64,
        lambda: i64,
        outcome: SuperOutcome,
        failing_condition: Option<u8>,
        beta0: Option<i64>,
        beta0_prime: Option<i64>,
        reduced_from_negative: bool,
        oracle_super_abelian: bool,
        #[serde(rename = "N")]
        n: u32,
        q: f64,
        grid_points: usize,
        skipped_poles: usize,
        max_abs_ratio_minus_1: f64,
        tolerance: f64,
        numeric: NumericCall,
        pass: bool,
    }
    if m == 0 {
        return Err(Failure::Invalid("m must be non-zero".into()));
    }
    let (ctx, points) = context(numeric)?;
    let v = super_abelianity_check(m, lambda)?;
    let oracle = centrality_exponents(v.m, lambda)?.is_empty();
    let (worst, skipped) = max_deviation(&points, |x| centrality_ratio(&ctx, v.m, lambda, x))?;
    let n = numeric.level.n;
    let call = match (v.is_super_abelian(), worst < numeric.tol) {
        (true, true) | (false, false) => NumericCall::Confirms,
        (false, true) if gcd(v.m, n as i64) > 1 => NumericCall::Inconclusive,
        _ => NumericCall::Contradicts,
    };
    let pass = oracle == v.is_super_abelian() && call != NumericCall::Contradicts;
    let mut output = Output::default();
    if call == NumericCall::Inconclusive {
        output.notes.push(format!(
            "gcd(m, N) = {} > 1: the centrality ratio is 1 at this N and cannot witness the verdict",
            gcd(v.m, n as i64)
        ));
    }
    if !pass {
        output.mismatches.push(format!(
            "m={m} λ={lambda}: {:?}, oracle super-abelian = {oracle}, max|ratio-1| = {worst:e}",
            v.outcome
        ));
    }
    output.bytes = json_line(&Report {
        m,
        lambda,
        outcome: v.outcome,
        failing_condition: v.outcome.failing_condition(),
        beta0: v.beta0,
        beta0_prime: v.beta0_prime,
        reduced_from_negative: v.reduced_from_negative,
        oracle_super_abelian: oracle,
        n,
        q: ctx.q(),
        grid_points: points.len(),
        skipped_poles: skipped,
        max_abs_ratio_minus_1: worst,
        tolerance: numeric.tol,
        numeric: call,
        pass,
    });
    Ok(output)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PoissonRow {
    pub x_re: f64,
    pub x_im: f64,
    pub f_re: f64,
    pub f_im: f64,
}

fn poisson(
    s1: &Surface,
    lambda: Rational,
    numeric: &Numeric,
    t_range: Option<FloatRange>,
    count: usize,
    levels: Option<(u32, u32)>,
    format: Format,
) -> Outcome<Output> {
    #[derive(Serialize)]
    struct Report<'a> {
        line: PoissonLine,
        #[serde(rename = "N")]
        n: u32,
        q: f64,
        k: Option<u32>,
        kp: Option<u32>,
        points: &'a [PoissonRow],
    }
    let (ctx, grid_points) = context(numeric)?;
    let lam = line_coordinate(s1, Some(lambda))?;
    let line = if lam.lambda().is_integer() {
        PoissonLine::A(PoissonParamsA::new(*s1, lam.lambda().numer())?)
    } else {
        PoissonLine::B(PoissonParamsB::new(*s1, lam.lambda())?)
    };
    let points = match t_range {
        Some(r) => {
            if count == 0 {
                return Err(Failure::Invalid("--count must be positive".into()));
            }
            let step = if count > 1 {
                (r.hi - r.lo) / (count - 1) as f64
            } else {
                0.0
            };
            (0..count)
                .map(|j| {
                    Complex64::from_polar(1.0, std::f64::consts::TAU * (r.lo + step * j as f64))
                })
                .collect()
        }
        None => grid_points,
    };
    let mut output = Output::default();
    let mut rows = Vec::with_capacity(points.len());
    for x in points {
        let value = match levels {
            Some((k, kp)) => f_kk(&ctx, &line, k, kp, x),
            None => line.f(&ctx, x),
        };
        let f = match value {
            Ok(f) => f,
            Err(Error::Pole(_)) => {
                output.notes.push(format!("skipped pole at x = {x}"));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        if levels.is_none() {
            let series = line.f_series(&ctx, x)?;
            let rel = (f - series).norm() / (1.0 + f.norm());
            if rel > ROUTE_TOL {
                output.mismatches.push(format!(
                    "x = {x}: compact route {f}, series route {series}, relative gap {rel:e}"
                ));
            }
        }
        rows.push(PoissonRow {
            x_re: x.re,
            x_im: x.im,
            f_re: f.re,
            f_im: f.im,
        });
    }
    let report = Report {
        line,
        n: ctx.n(),
        q: ctx.q(),
        k: levels.map(|l| l.0),
        kp: levels.map(|l| l.1),
        points: &rows,
    };
    output.bytes = emit(&report, Some(&rows), format);
    Ok(output)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub s1: Surface,
    pub s2: Surface,
    pub line: LineReport,
    pub sides: [SideReport; 2],
}

#[derive(Clone, Debug, Serialize)]
struct ScanCsvRow {
    m: i64,
    n: i64,
    m2: i64,
    n2: i64,
    e_p: Rational,
    e_pstar: Rational,
    #[serde(rename = "c_over_N")]
    c_over_n: Rational,
    lambda1: Option<Rational>,
    verdict1: VerdictTag,
    lambda2: Option<Rational>,
    verdict2: VerdictTag,
}

/// Every unordered pair of distinct surfaces in the box that intersect,
/// sorted by `(m, n, m', n')` with `(m, n) < (m', n')`.
pub fn scan_rows(bound: i64, n: u32) -> abelianity::Result<Vec<ScanRow>> {
    let surfaces = box_surfaces(bound);
    let mut rows = Vec::new();
    for (i, a) in surfaces.iter().enumerate() {
        for b in &surfaces[i + 1..] {
            if intersect_surfaces(a, b).line().is_none() {
                continue;
            }
            let v = classify_intersection(a, b, n)?;
            rows.push(ScanRow {
                s1: *a,
                s2: *b,
                line: LineReport::from(&v.line),
                sides: [
                    SideReport::from_side(&v.first),
                    SideReport::from_side(&v.second),
                ],
            });
        }
    }
    rows.sort_by_key(|r| (r.s1, r.s2));
    Ok(rows)
}

fn scan(bound: i64, n: u32, format: Format) -> Outcome<Output> {
    let rows = scan_rows(bound, n)?;
    let mut output = Output::default();
    for row in &rows {
        oracle_mismatches(&row.sides, &mut output.mismatches);
    }
    output.bytes = match format {
        Format::Json => rows.iter().flat_map(json_line).collect(),
        Format::Csv => {
            let flat: Vec<_> = rows
                .iter()
                .map(|r| ScanCsvRow {
                    m: r.s1.m(),
                    n: r.s1.n(),
                    m2: r.s2.m(),
                    n2: r.s2.n(),
                    e_p: r.line.e_p,
                    e_pstar: r.line.e_pstar,
                    c_over_n: r.line.c_over_n,
                    lambda1: r.sides[0].lambda,
                    verdict1: r.sides[0].verdict,
                    lambda2: r.sides[1].lambda,
                    verdict2: r.sides[1].verdict,
                })
                .collect();
            csv_rows(&flat)
        }
    };
    Ok(output)
}
