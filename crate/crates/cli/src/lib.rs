//! The `amalgam` command line: group analysis, the rank-two and rank-k
//! constructions, Borel growth tables and tree balls.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::time::Instant;

use amalgam_core::abstract_group::{largest_common_normal, DEFAULT_CAP};
use amalgam_core::perm::{
    find_witness, is_semiprimitive, parse_group, parse_group_text, perm_isomorphic, PermGroup,
    Semiprimitivity,
};
use amalgam_core::rank2::{build_from_groups, Rank2Instance};
use amalgam_core::rankk::{build_rankk, RankKInstance};
use amalgam_core::tree::{TreeBall, TreeContext, DEFAULT_VERTEX_CAP};
use amalgam_core::verdict::{Verdict, VerifyMode};
use amalgam_core::Error;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA: &str = "amalgam-report/1";

pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const REFUSED: i32 = 2;
    pub const CAP: i32 = 3;
    pub const PARSE: i32 = 4;
}

#[derive(Parser, Debug)]
#[command(name = "amalgam", version, about = "Build and verify amalgams of permutation groups")]
pub struct Cli {
    /// Element cap for brute-force enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum, default_value_t = VerifyArg::Full)]
    pub verify: VerifyArg,
    /// Omit the timing field from JSON output.
    #[arg(long, global = true)]
    pub canonical: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Tsv,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyArg {
    Full,
    Fast,
}

impl From<VerifyArg> for VerifyMode {
    fn from(v: VerifyArg) -> Self {
        match v {
            VerifyArg::Full => VerifyMode::Full,
            VerifyArg::Fast => VerifyMode::Fast,
        }
    }
}

/// `A..B`, inclusive; `A > B` is the empty range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllRange(pub RangeInclusive<usize>);

impl FromStr for EllRange {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s.split_once("..").ok_or("expected A..B")?;
        let a: usize = a.trim().parse().map_err(|_| format!("bad lower bound {a:?}"))?;
        let b: usize = b.trim().parse().map_err(|_| format!("bad upper bound {b:?}"))?;
        Ok(EllRange(a..=b))
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Transitivity, regularity and semiprimitivity of one group.
    Analyze { group: String },
    /// Rank-two amalgam from a non-semiprimitive L and a transitive R.
    Build2 {
        l: String,
        r: String,
        #[arg(long, default_value_t = 1)]
        ell: usize,
    },
    /// Rank-k amalgam (k >= 3) with some non-regular local group.
    Buildk {
        #[arg(required = true, num_args = 3..)]
        groups: Vec<String>,
        #[arg(long, default_value_t = 1)]
        ell: usize,
    },
    /// One row per ell: |M|, |C|, |B| and faithfulness.
    Table {
        l: String,
        r: String,
        #[arg(long = "ell-range")]
        ell_range: EllRange,
    },
    /// Ball around the root edge of the tree of a rank-two amalgam.
    Tree {
        l: String,
        r: String,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long = "vertex-cap", default_value_t = DEFAULT_VERTEX_CAP)]
        vertex_cap: usize,
    },
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Hypothesis { .. } => exit::REFUSED,
        Error::CapExceeded { .. } | Error::DegreeTooLarge { .. } => exit::CAP,
        Error::Parse { .. }
        | Error::NotAPermutation(_)
        | Error::DegreeMismatch { .. }
        | Error::Intransitive
        | Error::InvalidParameter(_) => exit::PARSE,
        _ => exit::FAIL,
    }
}

/// A named group input: a catalog name, literal text, or `@path`.
#[derive(Clone, Debug)]
pub struct GroupInput {
    pub name: String,
    pub group: PermGroup,
}

pub fn read_group(spec: &str) -> amalgam_core::Result<GroupInput> {
    let group = match spec.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
                line: 0,
                column: 0,
                message: format!("{path}: {e}"),
            })?;
            parse_group_text(&text)?
        }
        None => parse_group(spec)?,
    };
    Ok(GroupInput {
        name: spec.to_string(),
        group,
    })
}

fn describe(g: &GroupInput) -> Value {
    json!({
        "name": g.name,
        "degree": g.group.degree(),
        "order": g.group.order(),
        "generators": g.group.generators().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
    })
}

/// The report with the timing field removed, pretty-printed.
pub fn canonical_json(report: &Value) -> String {
    let mut v = report.clone();
    if let Some(map) = v.as_object_mut() {
        map.remove("timing_ms");
    }
    serde_json::to_string_pretty(&v).expect("json value")
}

/// What a command produced: text for stdout and the exit code.
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::PARSE } else { exit::PASS };
            let _ = write!(stderr, "{e}");
            if !e.use_stderr() {
                let _ = write!(stdout, "{e}");
            }
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let _ = stdout.write_all(out.stdout.as_bytes());
            out.code
        }
        Err(Failure { report, error }) => {
            if let Some(r) = report {
                let _ = stdout.write_all(r.as_bytes());
            }
            let _ = writeln!(stderr, "error: {error}");
            exit_code(&error)
        }
    }
}

/// An error plus, for JSON output, a structured report of it.
pub struct Failure {
    pub report: Option<String>,
    pub error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            report: None,
            error,
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Error::InvalidParameter(msg.into()).into()
}

pub fn execute(cli: &Cli) -> std::result::Result<Output, Failure> {
    let started = Instant::now();
    let mode: VerifyMode = cli.verify.into();
    let emit = |mut report: Value, code: i32| -> Output {
        if !cli.canonical {
            report["timing_ms"] = json!(started.elapsed().as_millis() as u64);
        }
        let mut s = serde_json::to_string_pretty(&report).expect("json value");
        s.push('\n');
        Output { stdout: s, code }
    };
    // Refusals still produce a report when JSON is requested.
    let refusal = |command: &str, inputs: Value, e: Error, json_out: bool| -> Failure {
        let report = match (&e, json_out) {
            (Error::Hypothesis { hypothesis, theorem }, true) => {
                let r = json!({
                    "schema": SCHEMA,
                    "command": command,
                    "parameters": inputs,
                    "status": "refused",
                    "hypothesis": hypothesis,
                    "theorem": theorem,
                });
                Some(emit(r, exit::REFUSED).stdout)
            }
            _ => None,
        };
        Failure { report, error: e }
    };
    match &cli.command {
        Command::Analyze { group } => {
            let g = read_group(group)?;
            let format = cli.format.unwrap_or(Format::Text);
            let a = analyze(&g)?;
            match format {
                Format::Text => Ok(Output {
                    stdout: a.to_text(),
                    code: exit::PASS,
                }),
                Format::Json => {
                    let mut r = json!({ "schema": SCHEMA, "command": "analyze" });
                    merge(&mut r, serde_json::to_value(&a).expect("analysis"));
                    Ok(emit(r, exit::PASS))
                }
                f => Err(usage(format!("analyze does not support {f:?} output"))),
            }
        }
        Command::Build2 { l, r, ell } => {
            let format = cli.format.unwrap_or(Format::Json);
            if !matches!(format, Format::Json | Format::Text) {
                return Err(usage(format!("build2 does not support {format:?} output")));
            }
            let (l, r) = (read_group(l)?, read_group(r)?);
            let params = json!({ "inputs": [describe(&l), describe(&r)], "ell": ell, "k": 2,
                "verify": mode, "cap": cli.cap });
            let inst = build_from_groups(&l.group, &r.group, *ell)
                .map_err(|e| refusal("build2", params.clone(), e, format == Format::Json))?;
            let verdicts = inst.verify(mode, cli.cap);
            let code = verdict_code(&verdicts);
            let report = json!({
                "schema": SCHEMA,
                "command": "build2",
                "parameters": params,
                "choices": rank2_choices(&inst),
                "orders": inst.orders(),
                "status": status(code),
                "verdicts": verdicts,
            });
            Ok(match format {
                Format::Text => Output {
                    stdout: text_report(&report),
                    code,
                },
                _ => emit(report, code),
            })
        }
        Command::Buildk { groups, ell } => {
            let format = cli.format.unwrap_or(Format::Json);
            if !matches!(format, Format::Json | Format::Text) {
                return Err(usage(format!("buildk does not support {format:?} output")));
            }
            let inputs = groups.iter().map(|g| read_group(g)).collect::<Result<Vec<_>, _>>()?;
            let params = json!({ "inputs": inputs.iter().map(describe).collect::<Vec<_>>(),
                "ell": ell, "k": inputs.len(), "verify": mode, "cap": cli.cap });
            let locals: Vec<PermGroup> = inputs.iter().map(|g| g.group.clone()).collect();
            let inst = build_rankk(&locals, *ell)
                .map_err(|e| refusal("buildk", params.clone(), e, format == Format::Json))?;
            let verdicts = inst.verify(mode, cli.cap);
            let code = verdict_code(&verdicts);
            let report = json!({
                "schema": SCHEMA,
                "command": "buildk",
                "parameters": params,
                "choices": rankk_choices(&inst),
                "orders": inst.orders(),
                "status": status(code),
                "verdicts": verdicts,
            });
            Ok(match format {
                Format::Text => Output {
                    stdout: text_report(&report),
                    code,
                },
                _ => emit(report, code),
            })
        }
        Command::Table { l, r, ell_range } => {
            let format = cli.format.unwrap_or(Format::Tsv);
            if !matches!(format, Format::Tsv | Format::Json) {
                return Err(usage(format!("table does not support {format:?} output")));
            }
            let (l, r) = (read_group(l)?, read_group(r)?);
            if find_witness(&l.group)?.is_none() {
                let params = json!({ "inputs": [describe(&l), describe(&r)] });
                return Err(refusal(
                    "table",
                    params,
                    Error::hypothesis("L is semiprimitive", amalgam_core::rank2::RANK2_THEOREM),
                    format == Format::Json,
                ));
            }
            let rows = growth_table(&l.group, &r.group, ell_range.0.clone(), cli.cap)?;
            let code = if rows.iter().any(|row| row.faithful == "fail") {
                exit::FAIL
            } else {
                exit::PASS
            };
            Ok(match format {
                Format::Tsv => Output {
                    stdout: table_tsv(&rows),
                    code,
                },
                _ => emit(
                    json!({
                        "schema": SCHEMA,
                        "command": "table",
                        "parameters": { "inputs": [describe(&l), describe(&r)],
                            "ell_range": [ell_range.0.start(), ell_range.0.end()], "cap": cli.cap },
                        "rows": rows,
                    }),
                    code,
                ),
            })
        }
        Command::Tree {
            l,
            r,
            ell,
            radius,
            vertex_cap,
        } => {
            let format = cli.format.unwrap_or(Format::Dot);
            if !matches!(format, Format::Dot | Format::Json) {
                return Err(usage(format!("tree does not support {format:?} output")));
            }
            let (l, r) = (read_group(l)?, read_group(r)?);
            let params = json!({ "inputs": [describe(&l), describe(&r)], "ell": ell,
                "radius": radius, "cap": cli.cap });
            let inst = build_from_groups(&l.group, &r.group, *ell)
                .map_err(|e| refusal("tree", params.clone(), e, format == Format::Json))?;
            let am = inst.assemble_amalgam()?;
            let ctx = TreeContext::new(&am, cli.cap)?;
            let ball = ctx.ball(*radius, *vertex_cap)?;
            let expected = [&l.group, &r.group];
            let verdicts = ctx.check_ball(&ball, expected);
            let code = verdict_code(&verdicts);
            Ok(match format {
                Format::Dot => Output {
                    stdout: ball.to_dot(),
                    code,
                },
                _ => {
                    let export = tree_export(&ctx, &ball, expected)?;
                    let root_edge = ctx.root_edge_stabilizer_action(&ball)?;
                    emit(
                        json!({
                            "schema": SCHEMA,
                            "command": "tree",
                            "parameters": params,
                            "ball": export,
                            "root_edge": root_edge,
                            "status": status(code),
                            "verdicts": verdicts,
                        }),
                        code,
                    )
                }
            })
        }
    }
}

fn merge(into: &mut Value, from: Value) {
    if let (Some(a), Value::Object(b)) = (into.as_object_mut(), from) {
        a.extend(b);
    }
}

fn verdict_code(verdicts: &[Verdict]) -> i32 {
    if amalgam_core::verdict::all_passed(verdicts) {
        exit::PASS
    } else {
        exit::FAIL
    }
}

fn status(code: i32) -> &'static str {
    if code == exit::PASS {
        "pass"
    } else {
        "fail"
    }
}

/// One line per report field, then one per verdict.
fn text_report(report: &Value) -> String {
    let mut s = String::new();
    if let Some(orders) = report["orders"].as_object() {
        for (k, v) in orders {
            let _ = writeln!(s, "{k}: {v}");
        }
    }
    for v in report["verdicts"].as_array().into_iter().flatten() {
        let detail = v
            .get("counterexample")
            .or_else(|| v.get("reason"))
            .and_then(Value::as_str)
            .map(|d| format!(" ({d})"))
            .unwrap_or_default();
        let _ = writeln!(s, "{}: {}{detail}", v["label"].as_str().unwrap_or("?"), v["status"].as_str().unwrap_or("?"));
    }
    let _ = writeln!(s, "status: {}", report["status"].as_str().unwrap_or("?"));
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub group: Value,
    pub transitive: bool,
    pub regular: bool,
    pub semiregular: bool,
    /// Primitivity is not computed.
    pub primitive: &'static str,
    pub semiprimitive: Option<bool>,
    pub witness: Option<WitnessSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessSummary {
    pub seed: String,
    pub normal_subgroup_order: u64,
    pub normal_subgroup_generators: Vec<String>,
    pub kernel_order: u64,
    pub cells: Vec<Vec<usize>>,
}

pub fn analyze(g: &GroupInput) -> amalgam_core::Result<Analysis> {
    let grp = &g.group;
    let transitive = grp.is_transitive();
    let (semiprimitive, witness) = if transitive {
        match is_semiprimitive(grp)? {
            Semiprimitivity::Semiprimitive => (Some(true), None),
            Semiprimitivity::Witness { subgroup, seed } => {
                let w = find_witness(grp)?.expect("not semiprimitive");
                let summary = WitnessSummary {
                    seed: seed.to_string(),
                    normal_subgroup_order: subgroup.order(),
                    normal_subgroup_generators: subgroup.generators().iter().map(|p| p.to_string()).collect(),
                    kernel_order: w.k().order(),
                    cells: w.blocks().partition().cells().to_vec(),
                };
                (Some(false), Some(summary))
            }
        }
    } else {
        (None, None)
    };
    Ok(Analysis {
        group: describe(g),
        transitive,
        regular: grp.is_regular(),
        semiregular: grp.is_semiregular(),
        primitive: "unchecked",
        semiprimitive,
        witness,
    })
}

impl Analysis {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "group: {}", self.group["name"].as_str().unwrap_or("?"));
        let _ = writeln!(s, "degree: {}", self.group["degree"]);
        let _ = writeln!(s, "order: {}", self.group["order"]);
        let _ = writeln!(s, "transitive: {}", self.transitive);
        let _ = writeln!(s, "regular: {}", self.regular);
        let _ = writeln!(s, "semiregular: {}", self.semiregular);
        let _ = writeln!(s, "primitive: {}", self.primitive);
        match self.semiprimitive {
            Some(b) => {
                let _ = writeln!(s, "semiprimitive: {b}");
            }
            None => s.push_str("semiprimitive: n/a (intransitive)\n"),
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(s, "witness seed: {}", w.seed);
            let _ = writeln!(
                s,
                "witness normal subgroup: order {}, generators {}",
                w.normal_subgroup_order,
                w.normal_subgroup_generators.join(" ")
            );
            let cells: Vec<String> = w
                .cells
                .iter()
                .map(|c| format!("{{{}}}", c.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")))
                .collect();
            let _ = writeln!(s, "block kernel: order {}, cells {}", w.kernel_order, cells.join(" "));
        }
        s
    }
}

fn rank2_choices(inst: &Rank2Instance) -> Value {
    let w = inst.witness();
    json!({
        "kernel_generators": w.k().generators().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "cells": w.blocks().partition().cells(),
        "delta": w.delta(),
        "lambda": w.lambda(),
        "transversal": inst.tau().reps().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "section": "least preimage in the point stabilizer",
        "omega_numbering": "z-major: (y, z) -> z*m2 + y",
    })
}

fn rankk_choices(inst: &RankKInstance) -> Value {
    json!({
        "input_order": inst.input_order(),
        "omega0": inst.interleaved().omega0(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub ell: usize,
    pub m: u64,
    pub c: u64,
    pub b: u64,
    /// `pass`, `fail` or `skipped`.
    pub faithful: &'static str,
}

/// Orders come from faithful permutation images; faithfulness is decided by
/// enumerating `B` only when `|B|` is within the cap.
pub fn growth_table(
    l: &PermGroup,
    r: &PermGroup,
    ells: RangeInclusive<usize>,
    cap: usize,
) -> amalgam_core::Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for ell in ells {
        let inst = build_from_groups(l, r, ell)?;
        let o = inst.orders();
        let faithful = if o.b as usize > cap {
            "skipped"
        } else {
            match inst.assemble_amalgam().and_then(|am| largest_common_normal(&am, cap)) {
                Ok(n) if n.len() == 1 => "pass",
                Ok(_) => "fail",
                Err(Error::CapExceeded { .. }) => "skipped",
                Err(Error::Construction(_)) => "fail",
                Err(e) => return Err(e),
            }
        };
        rows.push(TableRow {
            ell,
            m: o.m,
            c: o.c,
            b: o.b,
            faithful,
        });
    }
    Ok(rows)
}

pub fn table_tsv(rows: &[TableRow]) -> String {
    let mut s = String::from("ell\tM\tC\tB\tfaithful\n");
    for r in rows {
        let _ = writeln!(s, "{}\t{}\t{}\t{}\t{}", r.ell, r.m, r.c, r.b, r.faithful);
    }
    s
}

/// The ball as JSON, with the local action at every interior vertex.
pub fn tree_export<O: amalgam_core::abstract_group::GroupOps>(
    ctx: &TreeContext<O>,
    ball: &TreeBall,
    expected: [&PermGroup; 2],
) -> amalgam_core::Result<Value> {
    let mut vertices = Vec::new();
    for (id, v) in ball.vertices().iter().enumerate() {
        let local = if ball.is_interior(id) {
            let g = ctx.local_action(ball, id)?;
            let iso = perm_isomorphic(&g, expected[v.kind - 1])?.is_some();
            json!({ "order": g.order(), "isomorphic_to_expected": iso })
        } else {
            Value::Null
        };
        vertices.push(json!({
            "id": id,
            "type": v.kind,
            "label": v.label(),
            "word": v.word.iter().map(|(_, i)| i).collect::<Vec<_>>(),
            "distance": ball.distance(id),
            "local_action": local,
        }));
    }
    Ok(json!({
        "radius": ball.radius(),
        "degrees": ball.degrees(),
        "sphere_sizes": ball.sphere_sizes(),
        "vertices": vertices,
        "edges": ball.edges(),
    }))
}
