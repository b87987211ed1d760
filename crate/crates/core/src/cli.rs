//! Command-line front end.
//!
//! Every run prints one report (JSON by default) and returns an exit code:
//! `0` when the computation ran, even if no symmetry exists; `1` for usage
//! errors; `2` for numeric failures.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::expr::{parse, Expr};
use crate::roots::{critical_points, CriticalPoint, RootError, SearchBox};
use crate::series::SeriesError;
use crate::symmetry::{
    find_symmetries_at, group_closure, orbit, verify, AffineMap, AnchorSearch, Closure,
    OrbitReport, RationalAngle, SymmetryError, VerificationPolicy, VerificationReport,
    VerificationStatus,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "automorph", version, about = "Affine automorphic functions of entire functions")]
struct Cli {
    #[command(subcommand)]
    mode: ModeArgs,
}

#[derive(Subcommand, Debug)]
enum ModeArgs {
    /// Find the affine maps Φ with f(Φ(z)) = f(z) anchored at critical points
    Symmetries(Flags),
    /// Check one map Φ(z) = e^{iπθ}z + b
    Verify(Flags),
    /// Orbit of a point under the discovered symmetries
    Orbit(Flags),
    /// Critical points of f
    Roots(Flags),
}

#[derive(Args, Debug, Clone)]
struct Flags {
    /// Entire function of z, e.g. "z^4 + z^2" or "cos(z)"
    #[arg(long = "f", value_name = "EXPR")]
    function: String,
    /// Anchor point (symmetries) or base point (orbit), written a+bi
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    /// Search box re0,im0,re1,im1 for transcendental f
    #[arg(long = "box", value_name = "RE0,IM0,RE1,IM1", allow_hyphen_values = true)]
    search_box: Option<String>,
    /// Newton seeds per box axis
    #[arg(long, default_value_t = 40)]
    grid: usize,
    /// Truncation order for zero orders
    #[arg(long)]
    order: Option<usize>,
    /// Truncation order for series comparison
    #[arg(long = "compare-order")]
    compare_order: Option<usize>,
    /// Random samples per numeric verification
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "accept-tol")]
    accept_tol: Option<f64>,
    #[arg(long = "reject-tol")]
    reject_tol: Option<f64>,
    #[arg(long, conflicts_with = "text")]
    json: bool,
    #[arg(long)]
    text: bool,
    /// Rational angle p/q of the map, multiplier e^{iπp/q}
    #[arg(long, allow_hyphen_values = true)]
    map: Option<String>,
    /// Translation part b of the map
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Word length for orbits
    #[arg(long, default_value_t = 6)]
    depth: usize,
    /// Maximum closure size
    #[arg(long, default_value_t = 64)]
    cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Symmetries,
    Verify,
    Orbit,
    Roots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

/// A validated invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub function_text: String,
    pub function: Expr,
    pub anchor: Option<Complex64>,
    pub search_box: Option<SearchBox>,
    pub policy: VerificationPolicy,
    pub map: Option<AffineMap>,
    pub depth: usize,
    pub cap: usize,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    fn usage(kind: &'static str, message: impl ToString) -> Self {
        Self {
            code: EXIT_USAGE,
            kind,
            message: message.to_string(),
        }
    }

    fn numeric(kind: &'static str, message: impl ToString) -> Self {
        Self {
            code: EXIT_NUMERIC,
            kind,
            message: message.to_string(),
        }
    }
}

impl From<RootError> for CliError {
    fn from(e: RootError) -> Self {
        match e {
            RootError::NoConvergence { .. } => Self::numeric("no_convergence", e),
            RootError::Series(s) => s.into(),
            RootError::BoxRequired => Self::usage("box_required", e),
            RootError::InvalidBox(_) => Self::usage("invalid_box", e),
            RootError::ConstantPolynomial | RootError::ConstantFunction => {
                Self::usage("constant_function", e)
            }
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::AllCoefficientsVanish { .. } => Self::numeric("all_coefficients_vanish", e),
            SeriesError::Overflow { .. } => Self::numeric("overflow", e),
            _ => Self::numeric("series", e),
        }
    }
}

impl From<SymmetryError> for CliError {
    fn from(e: SymmetryError) -> Self {
        match e {
            SymmetryError::Series(s) => s.into(),
            SymmetryError::Eval(_) => Self::numeric("overflow", e),
            SymmetryError::NotCriticalPoint { .. } => Self::usage("not_critical_point", e),
            SymmetryError::OrderOne { .. } => Self::usage("order_one", e),
            _ => Self::numeric("symmetry", e),
        }
    }
}

/// Parses `a+bi`, `a`, `bi`, `i`, `-i`, with optional exponents.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number `{text}`; expected a+bi");
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
    };
    let re = if re_part.is_empty() {
        0.0
    } else {
        re_part.parse::<f64>().map_err(|_| bad())?
    };
    Ok(Complex64::new(re, im))
}

fn parse_box(text: &str, grid: usize) -> Result<SearchBox, CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::usage("invalid_box", format!("cannot parse box `{text}`")))?;
    let [a, b, c, d] = parts[..] else {
        return Err(CliError::usage(
            "invalid_box",
            format!("box `{text}` needs four comma-separated numbers"),
        ));
    };
    Ok(SearchBox::new(Complex64::new(a, b), Complex64::new(c, d), grid)?)
}

impl RunConfig {
    fn from_flags(mode: Mode, flags: Flags) -> Result<Self, CliError> {
        let function = parse(&flags.function).map_err(|e| CliError::usage("parse_error", e))?;
        let complex = |s: &Option<String>, what: &str| -> Result<Option<Complex64>, CliError> {
            s.as_deref()
                .map(|t| parse_complex(t).map_err(|e| CliError::usage("invalid_argument", format!("--{what}: {e}"))))
                .transpose()
        };
        let anchor = complex(&flags.at, "at")?;
        let b = complex(&flags.b, "b")?;
        let angle = flags
            .map
            .as_deref()
            .map(|t| t.parse::<RationalAngle>())
            .transpose()
            .map_err(|e| CliError::usage("invalid_argument", format!("--map: {e}")))?;
        let search_box = flags
            .search_box
            .as_deref()
            .map(|t| parse_box(t, flags.grid))
            .transpose()?;

        let mut policy = VerificationPolicy::default();
        if let Some(n) = flags.order {
            policy.series_order = n;
        }
        if let Some(m) = flags.compare_order {
            policy.comparison_order = m;
        }
        if let Some(s) = flags.samples {
            policy.samples = s;
        }
        if let Some(seed) = flags.seed {
            policy.seed = seed;
        }
        if let Some(t) = flags.accept_tol {
            policy.accept_tol = t;
        }
        if let Some(t) = flags.reject_tol {
            policy.reject_tol = t;
        }
        if policy.series_order < 1 || policy.comparison_order < 1 {
            return Err(CliError::usage("invalid_argument", "truncation orders must be at least 1"));
        }
        if !(policy.accept_tol > 0.0 && policy.reject_tol >= policy.accept_tol) {
            return Err(CliError::usage(
                "invalid_argument",
                "tolerances must satisfy 0 < accept-tol <= reject-tol",
            ));
        }

        let map = match (angle, b) {
            (None, None) => None,
            (angle, b) => {
                let m = AffineMap::new(
                    angle.unwrap_or(RationalAngle::ZERO),
                    b.unwrap_or(Complex64::new(0.0, 0.0)),
                );
                Some(match anchor {
                    Some(a) if mode == Mode::Verify => m.with_provenance(a),
                    _ => m,
                })
            }
        };

        match mode {
            Mode::Verify if flags.map.is_none() => {
                return Err(CliError::usage("missing_argument", "verify requires --map"));
            }
            Mode::Orbit if anchor.is_none() => {
                return Err(CliError::usage("missing_argument", "orbit requires --at"));
            }
            Mode::Orbit if flags.depth < 1 => {
                return Err(CliError::usage("invalid_argument", "--depth must be at least 1"));
            }
            _ => {}
        }

        Ok(Self {
            mode,
            function_text: flags.function,
            function,
            anchor,
            search_box,
            policy,
            map,
            depth: flags.depth,
            cap: flags.cap.max(1),
            format: if flags.text { OutputFormat::Text } else { OutputFormat::Json },
        })
    }
}

#[derive(Serialize)]
struct AnchorOutput<'a> {
    #[serde(flatten)]
    search: &'a AnchorSearch,
    symmetries: Vec<AffineMap>,
    message: Option<&'static str>,
}

#[derive(Serialize)]
struct SymmetriesOutput<'a> {
    command: Mode,
    function: &'a str,
    policy: &'a VerificationPolicy,
    #[serde(skip_serializing_if = "Option::is_none")]
    critical_points: Option<&'a [CriticalPoint]>,
    anchors: Vec<AnchorOutput<'a>>,
    closure: ClosureOutput<'a>,
}

#[derive(Serialize)]
struct ClosureOutput<'a> {
    size: usize,
    truncated: bool,
    elements: &'a [AffineMap],
}

impl<'a> From<&'a Closure> for ClosureOutput<'a> {
    fn from(c: &'a Closure) -> Self {
        Self {
            size: c.elements.len(),
            truncated: c.truncated,
            elements: &c.elements,
        }
    }
}

struct SymmetryRun {
    critical_points: Option<Vec<CriticalPoint>>,
    anchors: Vec<AnchorSearch>,
    closure: Closure,
}

fn discover(config: &RunConfig) -> Result<SymmetryRun, CliError> {
    let (critical, anchors) = match config.anchor {
        Some(z0) if config.mode == Mode::Symmetries => (None, vec![z0]),
        _ => {
            let pts = critical_points(&config.function, config.search_box.as_ref())?;
            let anchors = pts.iter().map(|p| p.location).collect();
            (Some(pts), anchors)
        }
    };
    let searches = anchors
        .into_iter()
        .map(|z0| find_symmetries_at(&config.function, z0, &config.policy))
        .collect::<Result<Vec<_>, _>>()?;
    let generators: Vec<AffineMap> = searches.iter().flat_map(AnchorSearch::symmetries).collect();
    Ok(SymmetryRun {
        critical_points: critical,
        closure: group_closure(&generators, config.cap),
        anchors: searches,
    })
}

fn fmt_c(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn fmt_map(m: &AffineMap) -> String {
    format!("θ = {}, b = {}", m.angle, fmt_c(m.b))
}

fn fmt_report(r: &VerificationReport) -> String {
    match &r.status {
        VerificationStatus::VerifiedExact => "verified (exact)".to_string(),
        VerificationStatus::VerifiedNumeric { max_residual, .. } => {
            format!("verified (numeric, max residual {max_residual:e})")
        }
        VerificationStatus::Refuted { witness, residual } => {
            format!("refuted (witness {}, residual {residual:e})", fmt_c(*witness))
        }
        VerificationStatus::Indeterminate { max_residual } => {
            format!("indeterminate (max residual {max_residual:e})")
        }
    }
}

fn render<T: Serialize>(config: &RunConfig, value: &T, text: impl FnOnce() -> String) -> String {
    match config.format {
        OutputFormat::Json => serde_json::to_string_pretty(value).expect("reports serialize"),
        OutputFormat::Text => text(),
    }
}

fn run_symmetries(config: &RunConfig) -> Result<String, CliError> {
    let result = discover(config)?;
    let out = SymmetriesOutput {
        command: Mode::Symmetries,
        function: &config.function_text,
        policy: &config.policy,
        critical_points: result.critical_points.as_deref(),
        anchors: result
            .anchors
            .iter()
            .map(|s| AnchorOutput {
                search: s,
                symmetries: s.symmetries(),
                message: s.message(),
            })
            .collect(),
        closure: (&result.closure).into(),
    };
    Ok(render(config, &out, || {
        let mut t = String::new();
        let _ = writeln!(t, "f(z) = {}", config.function_text);
        if result.anchors.is_empty() {
            let _ = writeln!(t, "no critical points found");
        }
        for s in &result.anchors {
            let _ = writeln!(t, "anchor {} (zero order {})", fmt_c(s.anchor), s.order);
            for r in &s.reports {
                let _ = writeln!(t, "  {}: {}", fmt_map(&r.map), fmt_report(r));
            }
            if let Some(msg) = s.message() {
                let _ = writeln!(t, "  {msg}");
            }
        }
        let _ = writeln!(
            t,
            "closure: {} element(s){}",
            result.closure.elements.len(),
            if result.closure.truncated { " (truncated)" } else { "" }
        );
        for m in &result.closure.elements {
            let _ = writeln!(t, "  {}", fmt_map(m));
        }
        t
    }))
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    command: Mode,
    function: &'a str,
    policy: &'a VerificationPolicy,
    report: &'a VerificationReport,
}

fn run_verify(config: &RunConfig) -> Result<String, CliError> {
    let map = config.map.expect("validated");
    let report = verify(&config.function, &map, &config.policy);
    let out = VerifyOutput {
        command: Mode::Verify,
        function: &config.function_text,
        policy: &config.policy,
        report: &report,
    };
    Ok(render(config, &out, || {
        format!(
            "f(z) = {}\n{}: {} [{} tier]\n",
            config.function_text,
            fmt_map(&map),
            fmt_report(&report),
            match report.tier {
                crate::symmetry::Tier::Exact => "exact",
                crate::symmetry::Tier::Numeric => "numeric",
            }
        )
    }))
}

#[derive(Serialize)]
struct OrbitOutput<'a> {
    command: Mode,
    function: &'a str,
    #[serde(flatten)]
    orbit: &'a OrbitReport,
}

fn run_orbit(config: &RunConfig) -> Result<String, CliError> {
    let base = config.anchor.expect("validated");
    let mut generators: Vec<AffineMap> = if config.function.contains_primitive() && config.search_box.is_none() {
        Vec::new()
    } else {
        discover(config)?
            .anchors
            .iter()
            .flat_map(AnchorSearch::symmetries)
            .collect()
    };
    if let Some(m) = config.map {
        generators.push(m);
    }
    let report = orbit(base, &generators, config.depth);
    let out = OrbitOutput {
        command: Mode::Orbit,
        function: &config.function_text,
        orbit: &report,
    };
    Ok(render(config, &out, || {
        let mut t = String::new();
        let _ = writeln!(t, "f(z) = {}", config.function_text);
        let _ = writeln!(t, "orbit of {} at depth {}: {} point(s)", fmt_c(base), config.depth, report.points.len());
        for p in &report.points {
            let _ = writeln!(t, "  {}", fmt_c(*p));
        }
        let _ = writeln!(t, "min pairwise distance: {}", report.min_pairwise_distance);
        t
    }))
}

#[derive(Serialize)]
struct RootsOutput<'a> {
    command: Mode,
    function: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    search_box: Option<&'a SearchBox>,
    critical_points: &'a [CriticalPoint],
}

fn run_roots(config: &RunConfig) -> Result<String, CliError> {
    let pts = critical_points(&config.function, config.search_box.as_ref())?;
    let out = RootsOutput {
        command: Mode::Roots,
        function: &config.function_text,
        search_box: config.search_box.as_ref(),
        critical_points: &pts,
    };
    Ok(render(config, &out, || {
        let mut t = String::new();
        let _ = writeln!(t, "f(z) = {}", config.function_text);
        let _ = writeln!(t, "{} critical point(s)", pts.len());
        for p in &pts {
            let _ = writeln!(
                t,
                "  {}  multiplicity {}  |f'| = {:e}",
                fmt_c(p.location),
                p.multiplicity,
                p.residual
            );
        }
        t
    }))
}

#[derive(Serialize)]
struct ErrorOutput<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    command: Option<Mode>,
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
    exit_code: i32,
}

fn render_error(mode: Option<Mode>, format: OutputFormat, e: &CliError) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(&ErrorOutput {
            command: mode,
            error: ErrorBody {
                kind: e.kind,
                message: &e.message,
                exit_code: e.code,
            },
        })
        .expect("errors serialize"),
        OutputFormat::Text => format!("error ({}): {}\n", e.kind, e.message),
    }
}

/// Executes a validated configuration.
pub fn run(config: &RunConfig) -> (i32, String) {
    let result = match config.mode {
        Mode::Symmetries => run_symmetries(config),
        Mode::Verify => run_verify(config),
        Mode::Orbit => run_orbit(config),
        Mode::Roots => run_roots(config),
    };
    match result {
        Ok(out) => (EXIT_OK, out),
        Err(e) => (e.code, render_error(Some(config.mode), config.format, &e)),
    }
}

/// Parses `argv` (program name first) and runs it.
pub fn run_args<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return (EXIT_OK, e.to_string());
            }
            let err = CliError::usage("usage", e.to_string());
            return (EXIT_USAGE, render_error(None, OutputFormat::Json, &err));
        }
    };
    let (mode, flags) = match cli.mode {
        ModeArgs::Symmetries(f) => (Mode::Symmetries, f),
        ModeArgs::Verify(f) => (Mode::Verify, f),
        ModeArgs::Orbit(f) => (Mode::Orbit, f),
        ModeArgs::Roots(f) => (Mode::Roots, f),
    };
    let format = if flags.text { OutputFormat::Text } else { OutputFormat::Json };
    match RunConfig::from_flags(mode, flags) {
        Ok(config) => run(&config),
        Err(e) => (e.code, render_error(Some(mode), format, &e)),
    }
}
