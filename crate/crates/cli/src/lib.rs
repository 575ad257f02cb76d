//! `ditrail` command-line driver: argument parsing, report assembly, exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use ditrail_core::constructor::{construct, ConstructionStatus, MoveRecord};
use ditrail_core::format::{digraph_sha256, parse_instance, write_instance};
use ditrail_core::generators::{hunt_tightness, random_digraph, sample_satisfying, GenSpec, HuntReport, SamplerStats, Shape};
use ditrail_core::search::{Budget, Meter, Search};
use ditrail_core::theorems::{self, Certificate, TheoremId, TheoremViolation, Verification, WitnessKind};
use ditrail_core::trails::{closed_ditrail_through_metered, dicycle_through_metered};
use ditrail_core::{validator, ClosedDitrail, Digraph, VertexId};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const BUDGET_ENV: &str = "DITRAIL_BUDGET";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ditrail", version, about = "Closed directed trails through prescribed vertex sets")]
pub struct Cli {
    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Expansion cap for exact searches (overrides DITRAIL_BUDGET)
    #[arg(long, global = true)]
    pub budget: Option<u64>,

    /// Worker threads for independent inputs
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// Record wall-clock time in reports
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    /// Instance files
    #[arg(required = true)]
    pub files: Vec<PathBuf>,

    /// S as comma-separated vertices; wins over an `S:` line
    #[arg(long = "s")]
    pub s: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate theorem hypotheses
    Check {
        #[command(flatten)]
        input: InstanceArgs,
        /// Theorem ids to check (default: all)
        #[arg(long = "theorem", value_parser = parse_theorem)]
        theorems: Vec<TheoremId>,
        /// Confirm each holding hypothesis with the exact oracle
        #[arg(long)]
        verify: bool,
    },
    /// Exact search for a closed ditrail (or dicycle) through S
    Oracle {
        #[command(flatten)]
        input: InstanceArgs,
        /// Look for a dicycle instead
        #[arg(long)]
        dicycle: bool,
    },
    /// Build a closed ditrail through S from augmentation moves
    Construct {
        #[command(flatten)]
        input: InstanceArgs,
    },
    /// Generate instances
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Only emit instances passing this hypothesis
        #[arg(long, value_parser = parse_theorem)]
        hypothesis: Option<TheoremId>,
        #[arg(long, value_enum, default_value = "any")]
        shape: ShapeArg,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Directory for the instance files; stdout when omitted (count 1 only)
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Search for non-closed-trailable instances one below the degree-sum threshold
    Hunt {
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        /// Sampling attempts
        #[arg(long, default_value_t = 1000)]
        attempts: u64,
    },
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum ShapeArg {
    Any,
    Random,
    Bipartite,
    TwoClique,
}

impl From<ShapeArg> for Shape {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::Any => Shape::Any,
            ShapeArg::Random => Shape::Random,
            ShapeArg::Bipartite => Shape::Bipartite,
            ShapeArg::TwoClique => Shape::TwoClique,
        }
    }
}

fn parse_theorem(s: &str) -> Result<TheoremId, String> {
    s.parse::<TheoremId>().map_err(|e| e.to_string())
}

/// What a run prints and how it exits.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn input_error(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct CheckEntry {
    pub id: TheoremId,
    pub holds: bool,
    pub diagnostics: Value,
    /// `certified`, `violation` or `inconclusive` under `--verify`.
    pub verification: Option<&'static str>,
    pub error: Option<String>,
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct CertificateOut {
    pub theorem: Option<TheoremId>,
    pub kind: WitnessKind,
    pub digraph_sha256: String,
    pub vertices: Vec<VertexId>,
    pub arc_count: usize,
}

impl From<&Certificate> for CertificateOut {
    fn from(c: &Certificate) -> Self {
        CertificateOut {
            theorem: Some(c.theorem),
            kind: c.kind,
            digraph_sha256: c.digraph_sha256.clone(),
            vertices: c.vertices.clone(),
            arc_count: c.arc_count,
        }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct BudgetUsage {
    pub cap: Option<u64>,
    pub expansions: u64,
    pub exhausted: bool,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct RunReport {
    pub version: &'static str,
    pub subcommand: &'static str,
    pub input: Option<String>,
    pub input_sha256: Option<String>,
    pub s: Option<Vec<VertexId>>,
    pub status: String,
    pub checks: Vec<CheckEntry>,
    pub certificate: Option<CertificateOut>,
    pub moves: Vec<MoveRecord>,
    pub violations: Vec<TheoremViolation>,
    pub warnings: Vec<String>,
    pub timing_ms: Option<u64>,
    pub budget: BudgetUsage,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hunt: Option<HuntReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated: Option<GenSummary>,
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct GenSummary {
    pub files: Vec<String>,
    pub stats: Option<SamplerStats>,
}

impl RunReport {
    fn new(subcommand: &'static str, budget: Budget) -> Self {
        RunReport {
            version: VERSION,
            subcommand,
            input: None,
            input_sha256: None,
            s: None,
            status: "ok".into(),
            checks: Vec::new(),
            certificate: None,
            moves: Vec::new(),
            violations: Vec::new(),
            warnings: Vec::new(),
            timing_ms: None,
            budget: BudgetUsage {
                cap: budget.cap,
                expansions: 0,
                exhausted: false,
            },
            hunt: None,
            generated: None,
        }
    }

    fn charge(&mut self, meter: &Meter) {
        self.budget.expansions += meter.expansions();
        self.budget.exhausted |= meter.exhausted();
    }
}

/// Parses `"0,2,5"` (commas and/or spaces).
pub fn parse_s_spec(spec: &str) -> Result<Vec<VertexId>, String> {
    let mut out = Vec::new();
    for tok in spec.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        let v: VertexId = tok.parse().map_err(|_| format!("bad vertex {tok:?} in --s"))?;
        if out.contains(&v) {
            return Err(format!("vertex {v} repeated in --s"));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err("--s is empty".into());
    }
    Ok(out)
}

fn resolve_budget(flag: Option<u64>, env: Option<&str>) -> Result<Budget, String> {
    if let Some(cap) = flag {
        return Ok(Budget::limited(cap));
    }
    match env.map(str::trim).filter(|e| !e.is_empty()) {
        None => Ok(Budget::unlimited()),
        Some(e) => e
            .parse::<u64>()
            .map(Budget::limited)
            .map_err(|_| format!("{BUDGET_ENV}={e:?} is not a nonnegative integer")),
    }
}

struct Loaded {
    digraph: Digraph,
    s: Vec<VertexId>,
    warnings: Vec<String>,
}

fn load(path: &Path, inline: Option<&str>) -> Result<Loaded, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let inst = parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut warnings = Vec::new();
    let n = inst.digraph.vertex_count();
    let s = match (inline, inst.s) {
        (Some(spec), file_s) => {
            let s = parse_s_spec(spec)?;
            if let Some(fs) = file_s {
                let (mut a, mut b) = (s.clone(), fs);
                a.sort_unstable();
                b.sort_unstable();
                if a != b {
                    warnings.push(format!("--s {a:?} overrides the S line {b:?}"));
                }
            }
            s
        }
        (None, Some(s)) => s,
        (None, None) => {
            warnings.push("no S given; using all vertices".into());
            (0..n).collect()
        }
    };
    if s.is_empty() {
        return Err("S is empty".into());
    }
    inst.digraph.check_vertex_set(&s).map_err(|e| format!("S: {e}"))?;
    let mut s = s;
    s.sort_unstable();
    Ok(Loaded {
        digraph: inst.digraph,
        s,
        warnings,
    })
}

fn certificate_out(d: &Digraph, kind: WitnessKind, theorem: Option<TheoremId>, t: &ClosedDitrail) -> CertificateOut {
    CertificateOut {
        theorem,
        kind,
        digraph_sha256: digraph_sha256(d),
        vertices: t.closed_sequence(),
        arc_count: t.arc_count(),
    }
}

/// Defensive gate: a certificate only leaves the tool if it validates.
fn gate(d: &Digraph, s: &[VertexId], c: &CertificateOut) -> Result<(), String> {
    let ok = match c.kind {
        WitnessKind::ClosedDitrail => validator::validate_closed_trail(d, &c.vertices),
        WitnessKind::Dicycle => validator::validate_dicycle(d, &c.vertices),
    } && s.iter().all(|v| c.vertices.contains(v))
        && c.digraph_sha256 == digraph_sha256(d);
    if ok {
        Ok(())
    } else {
        Err(format!("internal error: certificate {:?} failed validation", c.vertices))
    }
}

fn run_check(
    loaded: &Loaded,
    theorems_wanted: &[TheoremId],
    verify: bool,
    budget: Budget,
    report: &mut RunReport,
) -> Result<(), String> {
    let d = &loaded.digraph;
    let s = &loaded.s;
    let ids: Vec<TheoremId> = if theorems_wanted.is_empty() {
        TheoremId::ALL.to_vec()
    } else {
        theorems_wanted.to_vec()
    };
    for id in ids {
        let mut meter = Meter::new(budget);
        match theorems::check(d, s, id, budget) {
            Err(e) => report.checks.push(CheckEntry {
                id,
                holds: false,
                diagnostics: Value::Null,
                verification: None,
                error: Some(e.to_string()),
            }),
            Ok(r) => {
                let mut entry = CheckEntry {
                    id,
                    holds: r.holds,
                    diagnostics: serde_json::to_value(&r.diagnostics).map_err(|e| e.to_string())?,
                    verification: None,
                    error: None,
                };
                if verify && r.holds {
                    let v = theorems::verify_certificate_metered(d, s, &r, &mut meter).map_err(|e| e.to_string())?;
                    report.charge(&meter);
                    entry.verification = Some(match v {
                        Verification::Certified(c) => {
                            if report.certificate.is_none() {
                                let out = CertificateOut::from(&c);
                                gate(d, &c.s, &out)?;
                                report.certificate = Some(out);
                            }
                            "certified"
                        }
                        Verification::Violation(v) => {
                            report.violations.push(*v);
                            "violation"
                        }
                        Verification::Inconclusive => "inconclusive",
                    });
                }
                report.checks.push(entry);
            }
        }
    }
    report.status = if !report.violations.is_empty() {
        "theorem-violation".into()
    } else if report.checks.iter().any(|c| c.verification == Some("inconclusive")) {
        "inconclusive".into()
    } else {
        "ok".into()
    };
    Ok(())
}

fn run_oracle(loaded: &Loaded, dicycle: bool, budget: Budget, report: &mut RunReport) -> Result<(), String> {
    let d = &loaded.digraph;
    let mut meter = Meter::new(budget);
    let (kind, found) = if dicycle {
        (WitnessKind::Dicycle, dicycle_through_metered(d, &loaded.s, &mut meter))
    } else {
        (WitnessKind::ClosedDitrail, closed_ditrail_through_metered(d, &loaded.s, &mut meter))
    };
    report.charge(&meter);
    report.status = match found.map_err(|e| e.to_string())? {
        Search::Found(t) => {
            let out = certificate_out(d, kind, None, &t);
            gate(d, &loaded.s, &out)?;
            report.certificate = Some(out);
            "found"
        }
        Search::Absent => "absent",
        Search::Exhausted => "inconclusive",
    }
    .into();
    Ok(())
}

fn run_construct(loaded: &Loaded, budget: Budget, report: &mut RunReport) -> Result<(), String> {
    let d = &loaded.digraph;
    let c = construct(d, &loaded.s, budget).map_err(|e| e.to_string())?;
    report.budget.expansions += c.expansions;
    report.budget.exhausted |= c.exhausted;
    report.moves = c.moves;
    if c.fallback_used {
        report.warnings.push("moves stalled; finished by the exact oracle".into());
    }
    report.status = match c.status {
        ConstructionStatus::Success => {
            let t = c.trail.expect("success carries a trail");
            let out = certificate_out(d, WitnessKind::ClosedDitrail, None, &t);
            gate(d, &loaded.s, &out)?;
            report.certificate = Some(out);
            "success"
        }
        ConstructionStatus::CertifiedImpossible => "certified-impossible",
        ConstructionStatus::Inconclusive => "inconclusive",
    }
    .into();
    Ok(())
}

fn instance_reports(
    cli: &Cli,
    input: &InstanceArgs,
    subcommand: &'static str,
    budget: Budget,
    work: &(dyn Fn(&Loaded, &mut RunReport) -> Result<(), String> + Sync),
) -> Outcome {
    let one = |path: &PathBuf| -> Result<RunReport, String> {
        let start = Instant::now();
        let loaded = load(path, input.s.as_deref())?;
        let mut report = RunReport::new(subcommand, budget);
        report.input = Some(path.display().to_string());
        report.input_sha256 = Some(digraph_sha256(&loaded.digraph));
        report.s = Some(loaded.s.clone());
        report.warnings = loaded.warnings.clone();
        work(&loaded, &mut report)?;
        if cli.timing {
            report.timing_ms = Some(start.elapsed().as_millis() as u64);
        }
        Ok(report)
    };
    let results: Vec<Result<RunReport, String>> = if cli.jobs > 1 && input.files.len() > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
            Ok(pool) => pool.install(|| input.files.par_iter().map(one).collect()),
            Err(e) => return Outcome::input_error(e),
        }
    } else {
        input.files.iter().map(one).collect()
    };
    let mut out = Outcome::default();
    for r in results {
        match r {
            Ok(report) => {
                for w in &report.warnings {
                    out.stderr.push_str(&format!("warning: {w}\n"));
                }
                for v in &report.violations {
                    out.stderr.push_str(&format!(
                        "THEOREM-VIOLATION: {} hypothesis holds but S = {:?} is not covered\n{}",
                        v.theorem, v.s, v.instance
                    ));
                    out.code = out.code.max(EXIT_VIOLATION);
                }
                out.stdout.push_str(&serde_json::to_string(&report).expect("report serializes"));
                out.stdout.push('\n');
            }
            Err(e) => {
                out.stderr.push_str(&format!("error: {e}\n"));
                out.code = EXIT_INPUT;
            }
        }
    }
    out
}

fn run_gen(
    cli: &Cli,
    n: usize,
    p: f64,
    hypothesis: Option<TheoremId>,
    shape: Shape,
    count: usize,
    out_dir: Option<&Path>,
) -> Outcome {
    if out_dir.is_none() && count != 1 {
        return Outcome::input_error("--count above 1 needs --out-dir");
    }
    let mut spec = GenSpec::new(n, p, cli.seed);
    spec.shape = shape;
    spec.hypothesis = hypothesis;
    let mut texts = Vec::new();
    let mut stats = None;
    match hypothesis {
        None => {
            for i in 0..count {
                spec.seed = cli.seed.wrapping_add(i as u64);
                match random_digraph(&spec) {
                    Ok(d) => texts.push(write_instance(&d, None)),
                    Err(e) => return Outcome::input_error(e),
                }
            }
        }
        Some(h) => {
            let mut sampler = match sample_satisfying(h, &spec) {
                Ok(s) => s,
                Err(e) => return Outcome::input_error(e),
            };
            for (d, s) in sampler.by_ref().take(count) {
                texts.push(write_instance(&d, Some(&s)));
            }
            stats = Some(sampler.stats());
        }
    }
    let mut out = Outcome::default();
    if let Some(st) = stats {
        out.stderr.push_str(&format!(
            "generated {} of {count}; attempts {}, repair exhausted {}, rejected {}\n",
            texts.len(),
            st.attempts,
            st.repair_exhausted,
            st.rejected
        ));
    }
    match out_dir {
        None => {
            if let Some(t) = texts.first() {
                out.stdout.push_str(t);
            }
        }
        Some(dir) => {
            if let Err(e) = fs::create_dir_all(dir) {
                return Outcome::input_error(format!("{}: {e}", dir.display()));
            }
            let mut files = Vec::new();
            for (i, t) in texts.iter().enumerate() {
                let path = dir.join(format!("instance-{i:04}.txt"));
                if let Err(e) = fs::write(&path, t) {
                    return Outcome::input_error(format!("{}: {e}", path.display()));
                }
                files.push(path.display().to_string());
            }
            let mut report = RunReport::new("gen", Budget::unlimited());
            report.generated = Some(GenSummary { files, stats });
            out.stdout = serde_json::to_string(&report).expect("report serializes") + "\n";
        }
    }
    out
}

fn run_hunt(cli: &Cli, n_min: usize, n_max: usize, attempts: u64) -> Outcome {
    if n_min > n_max {
        return Outcome::input_error("--n-min exceeds --n-max");
    }
    let start = Instant::now();
    let hunt = hunt_tightness(n_min..=n_max, attempts, cli.seed);
    let mut report = RunReport::new("hunt", Budget::limited(attempts));
    report.budget.expansions = hunt.stats.attempts;
    report.status = if hunt.findings.is_empty() { "empty" } else { "found" }.into();
    report.hunt = Some(hunt);
    if cli.timing {
        report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    Outcome {
        code: EXIT_OK,
        stdout: serde_json::to_string(&report).expect("report serializes") + "\n",
        stderr: String::new(),
    }
}

/// Runs a parsed command line. `env_budget` is the value of `DITRAIL_BUDGET`.
pub fn run(cli: &Cli, env_budget: Option<&str>) -> Outcome {
    let budget = match resolve_budget(cli.budget, env_budget) {
        Ok(b) => b,
        Err(e) => return Outcome::input_error(e),
    };
    if cli.jobs == 0 {
        return Outcome::input_error("--jobs must be at least 1");
    }
    match &cli.command {
        Command::Check { input, theorems, verify } => instance_reports(cli, input, "check", budget, &|l, r| {
            run_check(l, theorems, *verify, budget, r)
        }),
        Command::Oracle { input, dicycle } => {
            instance_reports(cli, input, "oracle", budget, &|l, r| run_oracle(l, *dicycle, budget, r))
        }
        Command::Construct { input } => {
            instance_reports(cli, input, "construct", budget, &|l, r| run_construct(l, budget, r))
        }
        Command::Gen {
            n,
            p,
            hypothesis,
            shape,
            count,
            out_dir,
        } => run_gen(cli, *n, *p, *hypothesis, (*shape).into(), *count, out_dir.as_deref()),
        Command::Hunt { n_min, n_max, attempts } => run_hunt(cli, *n_min, *n_max, *attempts),
    }
}

/// Parses `args` (including the program name) and runs; clap errors exit 2.
pub fn run_args<I, T>(args: I, env_budget: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, env_budget),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}
