//! Command-line front end: problem files and the `tropicount` subcommands.
//!
//! Output is assembled in memory and only written once a command has
//! succeeded, so error paths leave stdout and output files untouched.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::ch::{self, ch_invariant, degree_table, InvariantKey};
use crate::curve::{Degree, End};
use crate::enumerate::{count_invariant, count_random, invariance_experiment, CountReport, Exec, Mode, Problem, DEFAULT_BOX};
use crate::error::Error;
use crate::geometry::Conditions;
use crate::lattice::{fmt_rat, parse_rat, LatticeVec, Point, Rational};
use crate::seq::WeightSeq;
use crate::svg::render_svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GENERICITY: i32 = 3;
pub const EXIT_LONG: i32 = 4;

/// A parsed problem file. `seed` and `bound` request random conditions in
/// place of the listed coordinates.
#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub problem: Problem,
    pub seed: Option<u64>,
    pub bound: Option<i64>,
}

fn perr(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Problem { path: path.into(), msg: msg.into() }
}

fn rat_at(v: &Value, path: &str) -> Result<Rational, Error> {
    match v {
        Value::String(s) => parse_rat(s).map_err(|_| perr(path, format!("bad rational {s:?}"))),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap().into())),
        _ => Err(perr(path, "expected a rational string \"p/q\"")),
    }
}

fn int_at(v: &Value, path: &str) -> Result<i64, Error> {
    v.as_i64().ok_or_else(|| perr(path, "expected an integer"))
}

fn points_at(doc: &Value, key: &str) -> Result<Vec<Point>, Error> {
    let Some(v) = doc.get(key) else { return Ok(Vec::new()) };
    let arr = v.as_array().ok_or_else(|| perr(key, "expected a list of points"))?;
    arr.iter()
        .enumerate()
        .map(|(i, p)| {
            let path = format!("{key}[{i}]");
            match p.as_array().map(|a| a.as_slice()) {
                Some([x, y]) => Ok(Point::new(rat_at(x, &format!("{path}[0]"))?, rat_at(y, &format!("{path}[1]"))?)),
                _ => Err(perr(path, "expected a pair [\"x\", \"y\"]")),
            }
        })
        .collect()
}

/// Parse a problem document. Ends are put in canonical order, the fixed
/// offsets follow that order, and the dimension condition is checked.
pub fn parse_problem_str(text: &str) -> Result<ProblemFile, Error> {
    let doc: Value = serde_json::from_str(text).map_err(|e| perr("$", format!("malformed JSON: {e}")))?;
    if !doc.is_object() {
        return Err(perr("$", "expected a JSON object"));
    }
    let entries = doc.get("degree").and_then(Value::as_array).ok_or_else(|| perr("degree", "missing list of ends"))?;
    let mut ends = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        let path = format!("degree[{i}]");
        let dir = match e.get("dir").and_then(Value::as_array).map(|a| a.as_slice()) {
            Some([x, y]) => LatticeVec::new(int_at(x, &format!("{path}.dir[0]"))?, int_at(y, &format!("{path}.dir[1]"))?),
            _ => return Err(perr(format!("{path}.dir"), "expected [x, y]")),
        };
        if dir.is_zero() {
            return Err(perr(format!("{path}.dir"), "zero direction"));
        }
        let count = match e.get("count") {
            None => 1,
            Some(c) => int_at(c, &format!("{path}.count"))?,
        };
        if count < 1 {
            return Err(perr(format!("{path}.count"), "count must be at least 1"));
        }
        let fixed = match e.get("fixed") {
            None => false,
            Some(f) => f.as_bool().ok_or_else(|| perr(format!("{path}.fixed"), "expected true or false"))?,
        };
        let end = match (fixed, e.get("offset")) {
            (true, Some(o)) => End::fixed(dir, rat_at(o, &format!("{path}.offset"))?),
            (true, None) => return Err(perr(format!("{path}.offset"), format!("fixed end {i} needs an offset"))),
            (false, Some(_)) => return Err(perr(format!("{path}.offset"), format!("end {i} is not fixed but has an offset"))),
            (false, None) => End::free(dir),
        };
        ends.extend(std::iter::repeat(end).take(count as usize));
    }
    let real_points = points_at(&doc, "real_points")?;
    let complex_points = points_at(&doc, "complex_points")?;
    let mode = match doc.get("mode") {
        None => Mode::Broccoli,
        Some(Value::String(m)) => m.parse()?,
        Some(_) => return Err(perr("mode", "expected \"broccoli\", \"welschinger\" or \"complex\"")),
    };
    let seed = match doc.get("seed") {
        None => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| perr("seed", "expected a non-negative integer"))?),
    };
    let bound = match doc.get("box") {
        None => None,
        Some(v) => Some(v.as_i64().filter(|&b| b > 0).ok_or_else(|| perr("box", "expected a positive integer"))?),
    };
    let mut degree = Degree::new(ends, real_points.len(), complex_points.len()).map_err(|e| perr("degree", e.to_string()))?;
    degree.canonicalize();
    let fixed_offsets = degree.ends.iter().filter_map(|e| e.offset.clone()).collect();
    let conditions = Conditions { real_points, complex_points, fixed_offsets };
    let problem = Problem::new(degree, mode, conditions).map_err(|e| perr("$", e.to_string()))?;
    Ok(ProblemFile { problem, seed, bound })
}

pub fn parse_problem(path: &Path) -> Result<ProblemFile, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| perr(path.display().to_string(), e.to_string()))?;
    parse_problem_str(&text)
}

#[derive(Parser, Debug)]
#[command(name = "tropicount", about = "Exact counts of rational plane tropical curves", disable_version_flag = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Relative broccoli invariant N^d(α, β, s) from the recursion.
    Invariant {
        #[arg(long)]
        d: u32,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long)]
        s: u32,
    },
    /// All relative invariants of one degree, one row per (α, β).
    Table {
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Count curves through the conditions of a problem file.
    Enumerate {
        #[arg(long)]
        problem: PathBuf,
        /// Print every contributing curve.
        #[arg(long)]
        list: bool,
        /// Write an SVG drawing of the curves.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        allow_long: bool,
    },
    /// Count through several random configurations and compare.
    Invariance {
        #[arg(long)]
        problem_template: PathBuf,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        allow_long: bool,
    },
    Version,
}

/// Outcome of a command: exit code, stdout text, stderr text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: String) -> Self {
        Outcome { code, stdout: String::new(), stderr }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Problem { .. } | Error::DimensionMismatch(_) | Error::InvalidKey(_) | Error::BadSequence(_) | Error::BadRational(_) => {
            EXIT_USAGE
        }
        Error::GenericityExhausted(_) | Error::GenericityFault(_) => EXIT_GENERICITY,
        _ => EXIT_FAILURE,
    }
}

/// Run the CLI on `argv` (program name first) without touching stdout.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() { Outcome::fail(EXIT_USAGE, text) } else { Outcome::ok(text) };
        }
    };
    match execute(cli.cmd) {
        Ok(o) => o,
        Err(e) => Outcome::fail(exit_code(&e), format!("error: {e}\n")),
    }
}

fn execute(cmd: Cmd) -> Result<Outcome, Error> {
    match cmd {
        Cmd::Version => Ok(Outcome::ok(format!("tropicount {}\n", env!("CARGO_PKG_VERSION")))),
        Cmd::Invariant { d, alpha, beta, s } => {
            let key = InvariantKey::new(d, alpha.parse::<WeightSeq>()?, beta.parse::<WeightSeq>()?, s)?;
            let v = with_cache(|| ch_invariant(&key))?;
            Ok(Outcome::ok(format!("{}\n", fmt_rat(&v))))
        }
        Cmd::Table { d, format } => {
            let t = with_cache(|| degree_table(d))?;
            Ok(Outcome::ok(match format {
                Format::Text => t.to_text(),
                Format::Csv => t.to_csv(),
            }))
        }
        Cmd::Enumerate { problem, list, svg, allow_long } => {
            let pf = parse_problem(&problem)?;
            if pf.problem.is_long() && !allow_long {
                return Ok(long_guard());
            }
            let (report, conditions) = match pf.seed {
                Some(seed) => {
                    let s = count_random(&pf.problem.degree, pf.problem.mode, seed, pf.bound.unwrap_or(DEFAULT_BOX), Exec::Parallel)?;
                    (s.report, s.conditions)
                }
                None => (count_invariant(&pf.problem)?, pf.problem.conditions.clone()),
            };
            let mut out = format_report(&pf.problem, &conditions, &report, list);
            if let Some(path) = svg {
                write_atomic(&path, &render_svg(&report, None))?;
                let _ = writeln!(out, "svg: {}", path.display());
            }
            Ok(Outcome::ok(out))
        }
        Cmd::Invariance { problem_template, trials, seed, allow_long } => {
            let pf = parse_problem(&problem_template)?;
            if pf.problem.is_long() && !allow_long {
                return Ok(long_guard());
            }
            let rep = invariance_experiment(&pf.problem.degree, pf.problem.mode, trials, seed, pf.bound.unwrap_or(DEFAULT_BOX))?;
            let mut out = String::new();
            for (k, t) in rep.trials.iter().enumerate() {
                let _ = writeln!(out, "trial {k}: seed {} value {} curves {} attempts {}", t.seed, fmt_rat(&t.value), t.curves, t.attempts);
            }
            if rep.constant {
                let _ = writeln!(out, "verdict: constant {}", fmt_rat(&rep.trials[0].value));
            } else {
                let vals: Vec<String> = rep.values().iter().map(fmt_rat).collect();
                let _ = writeln!(out, "verdict: not constant ({})", vals.join(", "));
            }
            Ok(Outcome::ok(out))
        }
    }
}

fn long_guard() -> Outcome {
    Outcome::fail(EXIT_LONG, "error: this problem may run for a long time; pass --allow-long to proceed\n".into())
}

/// Load and save the recursion memo around `f` when `TROPICOUNT_CACHE` is set.
fn with_cache<T>(f: impl FnOnce() -> Result<T, Error>) -> Result<T, Error> {
    let path = ch::cache_path_from_env();
    if let Some(p) = &path {
        ch::global().load_cache(p)?;
    }
    let v = f()?;
    if let Some(p) = &path {
        ch::global().save_cache(p)?;
    }
    Ok(v)
}

fn fmt_point(p: &Point) -> String {
    format!("({}, {})", fmt_rat(&p.x), fmt_rat(&p.y))
}

pub fn format_report(problem: &Problem, conditions: &Conditions, report: &CountReport, list: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mode: {}", problem.mode);
    for (k, p) in conditions.real_points.iter().enumerate() {
        let _ = writeln!(out, "real point {k}: {}", fmt_point(p));
    }
    for (k, p) in conditions.complex_points.iter().enumerate() {
        let _ = writeln!(out, "complex point {k}: {}", fmt_point(p));
    }
    for (k, o) in conditions.fixed_offsets.iter().enumerate() {
        let _ = writeln!(out, "fixed offset {k}: {}", fmt_rat(o));
    }
    let _ = writeln!(out, "value: {}", fmt_rat(&report.value));
    let _ = writeln!(out, "curves: {}", report.curves.len());
    let s = &report.stats;
    let _ = writeln!(out, "stats: generated {} duplicates {} pruned {} placed {}", s.generated, s.duplicates, s.pruned, s.placed);
    if list {
        for (k, c) in report.curves.iter().enumerate() {
            let _ = writeln!(out, "curve {k}: multiplicity {}", fmt_rat(&c.multiplicity));
            let _ = writeln!(out, "  type {}", c.encoding);
            let mut verts: Vec<String> = c.placement.vertex_positions().iter().flatten().map(fmt_point).collect();
            verts.sort();
            let _ = writeln!(out, "  vertices {}", verts.join(" "));
            let lens: Vec<String> = c.placement.lengths.iter().map(|(_, l)| fmt_rat(l)).collect();
            let _ = writeln!(out, "  lengths {}", lens.join(" "));
            if !c.tags.is_empty() {
                let tags: Vec<String> = c.tags.iter().map(|t| format!("{:?}(a={})", t.kind, t.a)).collect();
                let _ = writeln!(out, "  vertex types {}", tags.join(" "));
            }
        }
    }
    out
}

/// Write via a temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}
