//! Command-line front end: JSON in, JSON or SVG out.
//!
//! Every JSON document written carries `"schema": "v1"`; inputs may carry it
//! too and are rejected if it names another version. Exit status is 0 for a
//! positive outcome, 1 for a negative verdict (the JSON says why), 2 for
//! usage, schema and parameter errors, 3 for I/O errors and 4 when an
//! internal consistency check fails.

pub mod svg;

use std::fs;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};

use coarsedim::cover::{build_coasdim_certificate, build_grid_families_with, build_line_families, GridFamilies, LineFamilies, TailRule};
use coarsedim::families::{BoxFamily, Checker, VerifyReport};
use coarsedim::obstruction::{lebesgue_witness, obstruction_run, Adjacency, CellCover, ObstructionCandidate, Verdict};
use coarsedim::ordinal::{a_set_member, ord_of, ASetQuery, SetSystem, DEFAULT_SEARCH_CAP};
use coarsedim::space::DEFAULT_MAX_LEVEL;
use coarsedim::{Error, Limits, Window};

pub const SCHEMA: &str = "v1";
pub const CAP_VAR: &str = "COARSEDIM_CAP";

#[derive(Debug, Parser)]
#[command(name = "coarsedim", version, about = "Covers, ordinal ranks and Lebesgue obstructions on the graded grid space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the line families V0, V1, V2, or with --grid the families U0, U1.
    GenCover(GenCoverArgs),
    /// Check disjointness, boundedness and covering of families on a window.
    VerifyCover(VerifyArgs),
    /// Build (and optionally verify) the windowed certificate.
    CertCoasdim(CertArgs),
    /// Rank of a set system.
    Ord(InputArgs),
    /// Windowed membership search for a finite index set.
    ASet(ASetArgs),
    /// Run the obstruction pipeline on candidate families.
    Obstruct(InputArgs),
    /// Find a spanning component of a cell cover.
    Lebesgue(LebesgueArgs),
    /// Draw level-2 families over a window.
    EmitSvg(SvgArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// JSON input file, `-` for stdin.
    #[arg(long, default_value = "-")]
    pub input: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Tail {
    Full,
    Clearance,
}

#[derive(Debug, Args)]
pub struct GenCoverArgs {
    #[arg(long)]
    pub k: i64,
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub grid: bool,
    #[arg(long, value_enum, default_value = "clearance")]
    pub tail: Tail,
    /// Keep only the first DIM axes of the grid families.
    #[arg(long, value_name = "DIM", requires = "grid")]
    pub section: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Symbolic,
    Pointwise,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Window bounds as LO:HI.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub window: (i64, i64),
    /// Required separation between members.
    #[arg(long)]
    pub r: Option<u64>,
    /// Largest allowed member diameter.
    #[arg(long)]
    pub bound: Option<u64>,
    #[arg(long, value_enum, default_value = "symbolic")]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct CertArgs {
    #[arg(long)]
    pub k: i64,
    #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
    pub n_max: usize,
    /// Window side; 12·n_max when absent.
    #[arg(long)]
    pub window: Option<i64>,
    #[arg(long, default_value_t = 1)]
    pub r: i64,
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct ASetArgs {
    /// Query JSON; the flags below are used when absent.
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub sigma: Vec<u32>,
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub window: Option<(i64, i64)>,
    #[arg(long)]
    pub bound: Option<u64>,
    /// Largest window the search accepts.
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AdjacencyArg {
    Closed,
    Face,
}

#[derive(Debug, Args)]
pub struct LebesgueArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "closed")]
    pub adjacency: AdjacencyArg,
}

#[derive(Debug, Args)]
pub struct SvgArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub window: (i64, i64),
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let lo = a.trim().parse::<i64>().map_err(|e| format!("bad LO {a:?}: {e}"))?;
    let hi = b.trim().parse::<i64>().map_err(|e| format!("bad HI {b:?}: {e}"))?;
    Ok((lo, hi))
}

/// Result of a successful run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub body: String,
}

/// Why a run could not produce a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "usage",
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            kind: "io",
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        let v = json!({"schema": SCHEMA, "error": {"kind": self.kind, "message": self.message}});
        serde_json::to_string_pretty(&v).expect("plain json") + "\n"
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match e {
            Error::Capacity { .. } => (2, "capacity"),
            Error::Contradiction(_) => (4, "contradiction"),
            Error::Unsupported(_) => (2, "unsupported"),
            _ => (2, "parameter"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

/// Capacity limits, overridden by `COARSEDIM_CAP` when set.
pub fn limits() -> Run<Limits> {
    match std::env::var(CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(Limits::uniform)
            .map_err(|e| Failure::usage(format!("{CAP_VAR}={v:?}: {e}"))),
        Err(_) => Ok(Limits::default()),
    }
}

fn read_input(path: &str) -> Run<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::io(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::io(format!("{path}: {e}")))
    }
}

fn schema_error(what: &str, e: serde_json::Error) -> Failure {
    Failure {
        code: 2,
        kind: "schema",
        message: format!("{what}: {e}"),
    }
}

/// Parses `text` as `T` after checking the optional schema tag.
pub fn parse_doc<T: DeserializeOwned>(text: &str, what: &str) -> Run<T> {
    let v: Value = serde_json::from_str(text).map_err(|e| schema_error(what, e))?;
    check_schema(&v, what)?;
    serde_json::from_str(text).map_err(|e| schema_error(what, e))
}

fn check_schema(v: &Value, what: &str) -> Run<()> {
    match v.get("schema") {
        None => Ok(()),
        Some(Value::String(s)) if s == SCHEMA => Ok(()),
        Some(other) => Err(Failure {
            code: 2,
            kind: "schema",
            message: format!("{what}: unsupported schema {other}, expected {SCHEMA:?}"),
        }),
    }
}

/// Serializes `value` with the schema tag added at the top level.
pub fn to_doc<T: Serialize>(value: &T) -> String {
    let mut map = Map::new();
    map.insert("schema".into(), Value::String(SCHEMA.into()));
    match serde_json::to_value(value).expect("serializable") {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("value".into(), other);
        }
    }
    serde_json::to_string_pretty(&Value::Object(map)).expect("plain json") + "\n"
}

/// Families read from any of the family-bearing documents.
pub fn parse_families(text: &str) -> Run<Vec<BoxFamily>> {
    let v: Value = serde_json::from_str(text).map_err(|e| schema_error("families", e))?;
    check_schema(&v, "families")?;
    let has = |k: &str| v.get(k).is_some();
    if has("V0") {
        let lf: LineFamilies = parse_doc(text, "line families")?;
        Ok(vec![lf.v0, lf.v1, lf.v2])
    } else if has("U0") {
        let g: GridFamilies = parse_doc(text, "grid families")?;
        Ok(vec![g.u0, g.u1])
    } else if has("families") {
        #[derive(serde::Deserialize)]
        struct List {
            families: Vec<BoxFamily>,
        }
        Ok(parse_doc::<List>(text, "family list")?.families)
    } else {
        Ok(vec![parse_doc::<BoxFamily>(text, "family")?])
    }
}

fn verdict_code(ok: bool) -> i32 {
    if ok {
        0
    } else {
        1
    }
}

pub fn run(cli: &Cli) -> Run<Outcome> {
    let limits = limits()?;
    match &cli.command {
        Command::GenCover(a) => {
            let body = if a.grid {
                let tail = match a.tail {
                    Tail::Full => TailRule::Full,
                    Tail::Clearance => TailRule::Clearance,
                };
                let mut g = build_grid_families_with(a.n, a.k, tail)?;
                if let Some(d) = a.section {
                    g = g.section(d)?;
                }
                to_doc(&g)
            } else {
                to_doc(&build_line_families(a.n, a.k)?)
            };
            Ok(Outcome { code: 0, body })
        }
        Command::VerifyCover(a) => verify_cover(a, limits),
        Command::CertCoasdim(a) => {
            let window = a.window.unwrap_or(12 * a.n_max as i64);
            let cert = build_coasdim_certificate(a.k, window, a.n_max, a.r)?;
            if !a.verify {
                return Ok(Outcome {
                    code: 0,
                    body: to_doc(&cert),
                });
            }
            let report = cert.verify(&Checker::symbolic().with_limits(limits))?;
            let code = verdict_code(report.verdict);
            Ok(Outcome {
                code,
                body: to_doc(&json!({"certificate": cert, "report": report})),
            })
        }
        Command::Ord(a) => {
            let m: SetSystem = parse_doc(&read_input(&a.input)?, "set system")?;
            Ok(Outcome {
                code: 0,
                body: to_doc(&ord_of(&m)),
            })
        }
        Command::ASet(a) => {
            let q = match &a.input {
                Some(path) => parse_doc::<ASetQuery>(&read_input(path)?, "a-set query")?,
                None => {
                    let (lo, hi) = a.window.ok_or_else(|| Failure::usage("--window is required without --input"))?;
                    let bound = a.bound.ok_or_else(|| Failure::usage("--bound is required without --input"))?;
                    ASetQuery::new(a.sigma.iter().copied(), Window::new(a.level, lo, hi)?, bound)?
                }
            };
            let env_cap = std::env::var(CAP_VAR).ok().and_then(|v| v.trim().parse::<usize>().ok());
            let cap = a.cap.or(env_cap).unwrap_or(DEFAULT_SEARCH_CAP);
            let v = a_set_member(&q, cap)?;
            let code = verdict_code(v.member);
            let mut doc = serde_json::to_value(&v).expect("serializable");
            if !v.member {
                doc["reason"] = json!("a cover of the window with the required families exists");
            }
            Ok(Outcome { code, body: to_doc(&doc) })
        }
        Command::Obstruct(a) => {
            let c: ObstructionCandidate = parse_doc(&read_input(&a.input)?, "obstruction candidate")?;
            let r = obstruction_run(&c, &limits)?;
            Ok(Outcome {
                code: verdict_code(r.verdict == Verdict::ViolationFound),
                body: to_doc(&r),
            })
        }
        Command::Lebesgue(a) => {
            let c: CellCover = parse_doc(&read_input(&a.input.input)?, "cell cover")?;
            let adj = match a.adjacency {
                AdjacencyArg::Closed => Adjacency::Closed,
                AdjacencyArg::Face => Adjacency::Face,
            };
            let w = lebesgue_witness(&c, adj)?;
            let code = verdict_code(w.is_some());
            let body = match w {
                Some(w) => to_doc(&json!({"found": true, "witness": w})),
                None => to_doc(&json!({"found": false, "reason": "no set spans its axis"})),
            };
            Ok(Outcome { code, body })
        }
        Command::EmitSvg(a) => {
            let fams = parse_families(&read_input(&a.input.input)?)?;
            let w = Window::new(2, a.window.0, a.window.1)?;
            Ok(Outcome {
                code: 0,
                body: svg::emit_svg(&fams, &w, &limits)?,
            })
        }
    }
}

#[derive(Serialize)]
struct FamilyChecks {
    label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    disjoint: Option<VerifyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounded: Option<VerifyReport>,
}

fn verify_cover(a: &VerifyArgs, limits: Limits) -> Run<Outcome> {
    let fams = parse_families(&read_input(&a.input.input)?)?;
    let level = fams.first().map_or(1, BoxFamily::level);
    let w = Window::new(level, a.window.0, a.window.1)?;
    let checker = match a.mode {
        ModeArg::Symbolic => Checker::symbolic(),
        ModeArg::Pointwise => Checker::pointwise(),
    }
    .with_limits(limits);
    let mut checks = Vec::new();
    let mut reasons = Vec::new();
    for f in &fams {
        let disjoint = a.r.map(|r| checker.verify_disjoint(f, r, &w)).transpose()?;
        let bounded = a.bound.map(|b| checker.verify_bounded(f, b, &w)).transpose()?;
        for rep in disjoint.iter().chain(&bounded) {
            if !rep.verdict {
                reasons.push(format!("{}: {rep}", f.label()));
            }
        }
        checks.push(FamilyChecks {
            label: f.label().to_string(),
            disjoint,
            bounded,
        });
    }
    let refs: Vec<&BoxFamily> = fams.iter().collect();
    let cover = checker.verify_cover(&refs, &w)?;
    if !cover.verdict {
        reasons.push(format!("cover: {cover}"));
    }
    let verdict = reasons.is_empty();
    let mut doc = json!({"verdict": verdict, "window": w, "families": checks, "cover": cover});
    if !verdict {
        doc["reason"] = json!(reasons.join("; "));
    }
    Ok(Outcome {
        code: verdict_code(verdict),
        body: to_doc(&doc),
    })
}
