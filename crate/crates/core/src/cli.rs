//! Command-line front end: instance and solution files, `solve`, `verify`,
//! `gen` and `selftest`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::augmentation::{
    build_p_local, min_degree_vector, solve_application, solve_strong_cover, Application, LocalCA, MixedCA,
    NodeToArea, PairTargets, SimulCA, SolveMode, StrongTarget,
};
use crate::cover_basic::{weak_cover_basic, CoverInstance};
use crate::cover_uniform::{weak_cover_uniform_with, UniformCoverInstance, UniformOptions, UniformSpec};
use crate::error::{Error, Result};
use crate::gen;
use crate::hypergraph::{HypergraphJson, MixedHypergraph, MixedJson, WeightedHypergraph};
use crate::sets::{configured_cap, DegreeVector, GroundSet, SetFunction, TabulatedJson, HARD_CAP};
use crate::trace::CoverTrace;
use crate::verify::{audit_trace, depth_limit, verify_cover, CoverMode, Flavor, VerificationReport, Witness, DEPTH};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

// ---------------------------------------------------------------------------
// File formats

pub type Degrees = BTreeMap<String, i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Kind {
    Cover,
    LocalCa,
    SimulCa,
    NodeToArea,
    MixedCa,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::Cover, Kind::LocalCa, Kind::SimulCa, Kind::NodeToArea, Kind::MixedCa];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetJson {
    pub u: String,
    pub v: String,
    pub r: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphTargets {
    pub graph: HypergraphJson,
    pub targets: Vec<TargetJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AreaJson {
    pub area: Vec<String>,
    pub r: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    /// One function, or two for the pair cover.
    Cover { functions: Vec<TabulatedJson>, m: Degrees },
    LocalCa {
        graph: HypergraphJson,
        targets: Vec<TargetJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<Degrees>,
    },
    SimulCa {
        first: GraphTargets,
        second: GraphTargets,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<Degrees>,
    },
    NodeToArea {
        graph: HypergraphJson,
        areas: Vec<AreaJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<Degrees>,
    },
    MixedCa { graph: MixedJson, root: String, k: i64, l: i64, m: Degrees },
}

/// Defaults for `solve`; command-line flags take precedence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<SolveMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flavor: Option<Flavor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<bool>,
}

impl FileOptions {
    fn is_empty(&self) -> bool {
        *self == FileOptions::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub payload: Payload,
    #[serde(default, skip_serializing_if = "FileOptions::is_empty")]
    pub options: FileOptions,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub kind: Kind,
    pub mode: SolveMode,
    pub flavor: Flavor,
    pub k: i64,
    pub total_weight: i64,
    pub edge_count: usize,
    pub depth: usize,
    pub degrees: Degrees,
    pub hypergraph: HypergraphJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<i64>,
}

/// A parsed instance.
#[derive(Clone, Debug)]
pub enum Instance {
    Cover { functions: Vec<SetFunction>, m: DegreeVector },
    App(Application),
}

fn degrees_from(ground: &GroundSet, d: &Degrees) -> Result<DegreeVector> {
    for label in d.keys() {
        ground.index_of(label).ok_or_else(|| Error::UnknownLabel(label.clone()))?;
    }
    let vals = ground
        .members()
        .iter()
        .map(|u| {
            let label = ground.label(u);
            d.get(label).copied().ok_or_else(|| Error::Invalid(format!("no degree for `{label}`")))
        })
        .collect::<Result<Vec<i64>>>()?;
    DegreeVector::new(ground.clone(), &vals)
}

pub fn degrees_to(m: &DegreeVector) -> Degrees {
    let g = m.ground();
    g.members().iter().map(|u| (g.label(u).to_string(), m.get(u))).collect()
}

fn targets_from(ground: &GroundSet, t: &[TargetJson]) -> Result<PairTargets> {
    let idx = |l: &str| ground.index_of(l).ok_or_else(|| Error::UnknownLabel(l.into()));
    t.iter().map(|t| Ok((idx(&t.u)?, idx(&t.v)?, t.r))).collect()
}

fn targets_to(ground: &GroundSet, t: &PairTargets) -> Vec<TargetJson> {
    t.iter()
        .map(|&(u, v, r)| TargetJson { u: ground.label(u).into(), v: ground.label(v).into(), r })
        .collect()
}

fn graph_from(j: &HypergraphJson) -> Result<WeightedHypergraph> {
    let g = WeightedHypergraph::from_json(j)?;
    g.vertices().check_cap(configured_cap())?;
    Ok(g)
}

impl InstanceFile {
    pub fn kind(&self) -> Kind {
        match self.payload {
            Payload::Cover { .. } => Kind::Cover,
            Payload::LocalCa { .. } => Kind::LocalCa,
            Payload::SimulCa { .. } => Kind::SimulCa,
            Payload::NodeToArea { .. } => Kind::NodeToArea,
            Payload::MixedCa { .. } => Kind::MixedCa,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes") + "\n"
    }

    pub fn instance(&self) -> Result<Instance> {
        let opt = |g: &GroundSet, m: &Option<Degrees>| m.as_ref().map(|d| degrees_from(g, d)).transpose();
        Ok(match &self.payload {
            Payload::Cover { functions, m } => {
                let first = functions.first().ok_or_else(|| Error::Invalid("no functions".into()))?;
                if functions.len() > 2 {
                    return Err(Error::Invalid("at most two functions".into()));
                }
                let ground = GroundSet::new(first.ground.iter().cloned())?;
                ground.check_cap(configured_cap())?;
                let functions = functions
                    .iter()
                    .map(|f| SetFunction::from_json_on(&ground, f))
                    .collect::<Result<Vec<_>>>()?;
                Instance::Cover { m: degrees_from(&ground, m)?, functions }
            }
            Payload::LocalCa { graph, targets, m } => {
                let graph = graph_from(graph)?;
                let targets = targets_from(graph.vertices(), targets)?;
                let m = opt(graph.vertices(), m)?;
                Instance::App(Application::Local(LocalCA { graph, targets, m }))
            }
            Payload::SimulCa { first, second, m } => {
                let g1 = graph_from(&first.graph)?;
                let g2 = WeightedHypergraph::from_json_on(g1.vertices(), &second.graph.edges)?;
                if second.graph.vertices != first.graph.vertices {
                    return Err(Error::GroundMismatch);
                }
                let t1 = targets_from(g1.vertices(), &first.targets)?;
                let t2 = targets_from(g1.vertices(), &second.targets)?;
                let m = opt(g1.vertices(), m)?;
                Instance::App(Application::Simul(SimulCA { first: (g1, t1), second: (g2, t2), m }))
            }
            Payload::NodeToArea { graph, areas, m } => {
                let graph = graph_from(graph)?;
                let areas = areas
                    .iter()
                    .map(|a| Ok((graph.vertices().subset(&a.area)?, a.r)))
                    .collect::<Result<Vec<_>>>()?;
                let m = opt(graph.vertices(), m)?;
                Instance::App(Application::NodeToArea(NodeToArea { graph, areas, m }))
            }
            Payload::MixedCa { graph, root, k, l, m } => {
                let mixed = MixedHypergraph::from_json(graph)?;
                mixed.vertices().check_cap(configured_cap())?;
                let root = mixed.vertices().index_of(root).ok_or_else(|| Error::UnknownLabel(root.clone()))?;
                let m = degrees_from(mixed.vertices(), m)?;
                Instance::App(Application::Mixed(MixedCA { mixed, root, k: *k, l: *l, m }))
            }
        })
    }
}

impl Instance {
    pub fn ground(&self) -> &GroundSet {
        match self {
            Instance::Cover { m, .. } => m.ground(),
            Instance::App(a) => a.ground(),
        }
    }
}

// ---------------------------------------------------------------------------
// Solving

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveFlags {
    pub mode: Option<SolveMode>,
    pub flavor: Option<Flavor>,
    pub diagnostics: bool,
}

#[derive(Clone, Debug)]
pub struct Solved {
    pub solution: SolutionFile,
    pub trace: CoverTrace,
    pub report: VerificationReport,
}

/// The algorithm `solve` runs: two functions go to the pair cover unless a
/// weak basic cover of their maximum was asked for.
fn cover_mode(cover_kind: bool, flavor: Flavor, mode: SolveMode, functions: usize) -> CoverMode {
    match (functions, mode) {
        (2, SolveMode::Basic) if cover_kind && flavor == Flavor::Weak => CoverMode::Basic,
        (2, _) => CoverMode::UniformPair,
        (_, SolveMode::Basic) => CoverMode::Basic,
        (_, SolveMode::Uniform) => CoverMode::Uniform,
    }
}

/// Solve an instance file and certify the result. Infeasibility surfaces as
/// [`Error::Infeasible`].
pub fn solve_file(file: &InstanceFile, flags: SolveFlags) -> Result<Solved> {
    let mode = flags.mode.or(file.options.mode).unwrap_or_default();
    let diagnostics = flags.diagnostics || file.options.diagnostics.unwrap_or(false);
    let opts = UniformOptions { diagnostics, ..UniformOptions::default() };
    match file.instance()? {
        Instance::Cover { functions, m } => {
            let flavor = flags.flavor.or(file.options.flavor).unwrap_or_default();
            let (h, trace) = match (flavor, mode, functions.as_slice()) {
                (Flavor::Strong, _, [p]) => solve_strong_cover(&StrongTarget::Single(p.clone()), &m, mode, &opts)?,
                (Flavor::Strong, _, [q, r]) => solve_strong_cover(&StrongTarget::Pair(q.clone(), r.clone()), &m, mode, &opts)?,
                (Flavor::Weak, SolveMode::Basic, fs) => {
                    let p = if let [q, r] = fs { q.max(r)? } else { fs[0].clone() };
                    weak_cover_basic(&CoverInstance::new(p, m.clone())?)?
                }
                (Flavor::Weak, SolveMode::Uniform, fs) => {
                    let spec = if let [q, r] = fs { UniformSpec::Pair(q.clone(), r.clone()) } else { UniformSpec::Single(fs[0].clone()) };
                    let sol = weak_cover_uniform_with(&UniformCoverInstance::new(spec, m.clone())?, &opts)?;
                    if let Some(d) = sol.diagnostics.as_ref().filter(|d| !d.ok()) {
                        return Err(Error::Hypothesis(format!("diagnostics failed: {:?}", d.violations.first())));
                    }
                    (sol.hypergraph, sol.trace)
                }
                _ => unreachable!("one or two functions"),
            };
            let k = functions.iter().map(|f| f.max_value()).max().unwrap_or(0).max(0);
            let cmode = cover_mode(true, flavor, mode, functions.len());
            let mut report = verify_cover(&functions, &m, &h, flavor, cmode)?;
            report.merge(audit_trace(&functions, &m, &trace)?);
            let solution = solution(Kind::Cover, mode, flavor, k, &m, &h, &trace, None);
            Ok(Solved { solution, trace, report })
        }
        Instance::App(app) => {
            let sol = solve_application(&app, mode, &opts)?;
            let (target, m, _) = app.reduce()?;
            let functions: Vec<SetFunction> = target.functions().into_iter().cloned().collect();
            let cmode = cover_mode(false, Flavor::Strong, mode, functions.len());
            let mut report = verify_cover(&functions, &m, &sol.hypergraph, Flavor::Strong, cmode)?;
            report.merge(audit_trace(&functions, &m, &sol.trace)?);
            let kind = file.kind();
            let solution =
                solution(kind, mode, Flavor::Strong, sol.report.k.max(0), &sol.degrees, &sol.hypergraph, &sol.trace, sol.report.slack);
            Ok(Solved { solution, trace: sol.trace, report })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn solution(
    kind: Kind,
    mode: SolveMode,
    flavor: Flavor,
    k: i64,
    m: &DegreeVector,
    h: &WeightedHypergraph,
    trace: &CoverTrace,
    slack: Option<i64>,
) -> SolutionFile {
    SolutionFile {
        kind,
        mode,
        flavor,
        k,
        total_weight: h.total_weight(),
        edge_count: h.edge_count(),
        depth: trace.depth,
        degrees: degrees_to(m),
        hypergraph: h.to_json(),
        slack,
    }
}

/// Check a solution file against its instance.
pub fn verify_file(file: &InstanceFile, sol: &SolutionFile) -> Result<VerificationReport> {
    if sol.kind != file.kind() {
        return Err(Error::Invalid(format!("solution is for {:?}, instance is {:?}", sol.kind, file.kind())));
    }
    let inst = file.instance()?;
    let ground = inst.ground().clone();
    if sol.hypergraph.vertices != ground.names(ground.members()) {
        return Err(Error::GroundMismatch);
    }
    let h = WeightedHypergraph::from_json_on(&ground, &sol.hypergraph.edges)?;
    let (functions, m, flavor, shortfall) = match &inst {
        Instance::Cover { functions, m } => (functions.clone(), m.clone(), sol.flavor, None),
        Instance::App(app) => {
            let (target, m, _) = app.reduce()?;
            (target.functions().into_iter().cloned().collect(), m, Flavor::Strong, Some(app.shortfall(&h)?))
        }
    };
    let cmode = cover_mode(matches!(inst, Instance::Cover { .. }), flavor, sol.mode, functions.len());
    let mut report = verify_cover(&functions, &m, &h, flavor, cmode)?;
    let limit = depth_limit(cmode, ground.len());
    report.note(DEPTH, (sol.depth as i64 > limit).then_some(Witness::Bound { limit, actual: sol.depth as i64 }));
    if let Some(s) = shortfall {
        let w = s.map(|s| Witness::Set { set: s.from | s.to, required: s.required, actual: s.actual });
        report.note("connectivity requirements", w);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Generation

fn labelled(g: &WeightedHypergraph, r: &PairTargets) -> GraphTargets {
    GraphTargets { graph: g.to_json(), targets: targets_to(g.vertices(), r) }
}

/// A seeded random instance of `kind`. With `feasible`, the degree
/// specification satisfies the cover hypotheses; otherwise it is uniform in
/// `0..=K_p` and may not.
pub fn generate(kind: Kind, n: usize, seed: u64, density: f64, feasible: bool) -> Result<InstanceFile> {
    if n == 0 {
        return Err(Error::Invalid("need at least one vertex".into()));
    }
    gen::ground(n)?.check_cap(configured_cap())?;
    let mut rng = gen::rng(seed);
    let rng = &mut rng;
    let degrees = |p: &SetFunction, rng: &mut rand_chacha::ChaCha8Rng| {
        if feasible {
            gen::feasible_degrees(p, rng)
        } else {
            gen::random_degrees(p, rng)
        }
    };
    // Application kinds leave `m` out half the time to ask for the minimum.
    let maybe = |p: &SetFunction, rng: &mut rand_chacha::ChaCha8Rng| -> Result<Option<Degrees>> {
        if feasible && rng.gen_bool(0.5) {
            return Ok(None);
        }
        Ok(Some(degrees_to(&degrees(p, rng)?)))
    };
    let payload = match kind {
        Kind::Cover => {
            let p = gen::skew_function(n, density, rng)?;
            let m = degrees(&p, rng)?;
            Payload::Cover { functions: vec![p.to_json()], m: degrees_to(&m) }
        }
        Kind::LocalCa => {
            let (g, r) = gen::random_local(n, density, rng)?;
            let m = maybe(&build_p_local(&g, &r)?, rng)?;
            Payload::LocalCa { graph: g.to_json(), targets: targets_to(g.vertices(), &r), m }
        }
        Kind::SimulCa => {
            let (g1, r1) = gen::random_local(n, density, rng)?;
            let (g2, mut r2) = gen::random_local(n, density, rng)?;
            gen::match_gap(&g2, &mut r2, crate::augmentation::max_gap(&g1, &r1)?)?;
            let p = build_p_local(&g1, &r1)?.max(&build_p_local(&g2, &r2)?)?;
            let m = maybe(&p, rng)?;
            Payload::SimulCa { first: labelled(&g1, &r1), second: labelled(&g2, &r2), m }
        }
        Kind::NodeToArea => {
            let g = gen::random_hypergraph(&gen::ground(n)?, density, rng)?;
            let areas = gen::random_areas(n, rng);
            let p = crate::augmentation::build_p_node_to_area(&g, &areas)?;
            let m = maybe(&p, rng)?;
            let areas = areas.iter().map(|&(w, r)| AreaJson { area: g.vertices().names(w), r }).collect();
            Payload::NodeToArea { graph: g.to_json(), areas, m }
        }
        Kind::MixedCa => {
            let mixed = gen::random_mixed(n, density, rng)?;
            let root = rng.gen_range(0..n);
            let (k, l) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
            let p = crate::augmentation::build_p_mixed_sym(&mixed, root, k, l)?;
            let m = if feasible {
                // Some vertices get more than `K_p`, which shows up as slack.
                let base = min_degree_vector(&p)?;
                let vals: Vec<i64> = base.member_values().iter().map(|&v| v + rng.gen_range(0..=2)).collect();
                DegreeVector::new(base.ground().clone(), &vals)?
            } else {
                gen::random_degrees(&p, rng)?
            };
            Payload::MixedCa {
                graph: mixed.to_json(),
                root: mixed.vertices().label(root).into(),
                k,
                l,
                m: degrees_to(&m),
            }
        }
    };
    Ok(InstanceFile { payload, options: FileOptions::default() })
}

// ---------------------------------------------------------------------------
// Command line

#[derive(Debug, Parser)]
#[command(name = "hypercover", version, about = "Degree-specified hypergraph covers of skew-supermodular functions")]
pub struct Cli {
    /// Enumeration cap on the number of vertices (needs --accept-cap).
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Acknowledge that a raised cap can take exponential time and memory.
    #[arg(long, global = true)]
    pub accept_cap: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Basic,
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    Weak,
    Strong,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve instance files; exit 0 solved, 2 infeasible, 1 error.
    Solve {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, value_enum)]
        flavor: Option<FlavorArg>,
        /// Recompute the analysis families of the uniform algorithm.
        #[arg(long)]
        diagnostics: bool,
        /// Trace as JSON lines (a directory when several files are given).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Solution JSON (a directory when several files are given).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check a solution against its instance; exit 0 iff every check passes.
    Verify { instance: PathBuf, solution: PathBuf },
    /// Print a seeded random instance.
    Gen {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long)]
        feasible: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Smaller instance counts.
        #[arg(long)]
        quick: bool,
    },
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

struct SolveTask<'a> {
    flags: SolveFlags,
    trace: Option<&'a Path>,
    out: Option<&'a Path>,
    many: bool,
}

impl SolveTask<'_> {
    fn target(&self, base: Option<&Path>, input: &Path, ext: &str) -> Option<PathBuf> {
        let base = base?;
        if !self.many {
            return Some(base.to_path_buf());
        }
        let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Some(base.join(format!("{stem}.{ext}")))
    }

    fn run(&self, path: &Path, out: &mut Vec<u8>, err: &mut Vec<u8>) -> i32 {
        let res = InstanceFile::read(path).and_then(|f| solve_file(&f, self.flags));
        let solved = match res {
            Ok(s) => s,
            Err(Error::Infeasible(cert)) => {
                let msg = serde_json::json!({ "status": "infeasible", "file": path, "certificate": cert });
                let _ = writeln!(out, "{msg}");
                let _ = writeln!(err, "{}: infeasible: {cert}", path.display());
                return EXIT_INFEASIBLE;
            }
            Err(e) => {
                let _ = writeln!(err, "{}: {e}", path.display());
                return EXIT_ERROR;
            }
        };
        if !solved.report.passed() {
            let failed: Vec<_> = solved.report.failures().collect();
            let _ = writeln!(err, "{}: solution failed its own checks: {}", path.display(), serde_json::json!(failed));
            return EXIT_ERROR;
        }
        let written = (|| -> Result<()> {
            if let Some(t) = self.target(self.trace, path, "trace.jsonl") {
                solved.trace.write_json_lines(fs::File::create(t)?)?;
            }
            let text = serde_json::to_string_pretty(&solved.solution)? + "\n";
            match self.target(self.out, path, "sol.json") {
                Some(p) => {
                    fs::write(p, text)?;
                    let s = &solved.solution;
                    let _ = writeln!(out, "{}: solved, {} hyperedges, weight {}", path.display(), s.edge_count, s.total_weight);
                }
                None => out.extend_from_slice(text.as_bytes()),
            }
            Ok(())
        })();
        match written {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "{}: {e}", path.display());
                EXIT_ERROR
            }
        }
    }
}

/// `(input index, exit code, stdout, stderr)` of one solve.
type Finished = (usize, i32, Vec<u8>, Vec<u8>);

fn combine(codes: &[i32]) -> i32 {
    if codes.contains(&EXIT_ERROR) {
        EXIT_ERROR
    } else if codes.contains(&EXIT_INFEASIBLE) {
        EXIT_INFEASIBLE
    } else {
        EXIT_OK
    }
}

fn apply_cap(cli: &Cli) -> Result<()> {
    if let Some(cap) = cli.cap {
        if !cli.accept_cap {
            return Err(Error::Invalid("--cap needs --accept-cap".into()));
        }
        if cap > HARD_CAP {
            return Err(Error::CapExceeded { n: cap, cap: HARD_CAP });
        }
        std::env::set_var("HYPERCOVER_CAP", cap.to_string());
    }
    Ok(())
}

/// Run the command line with `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    if let Err(e) = apply_cap(&cli) {
        let _ = writeln!(err, "{e}");
        return EXIT_ERROR;
    }
    match cli.command {
        Command::Solve { paths, mode, flavor, diagnostics, trace, out: dest, jobs } => {
            let flags = SolveFlags {
                mode: mode.map(|m| match m {
                    ModeArg::Basic => SolveMode::Basic,
                    ModeArg::Uniform => SolveMode::Uniform,
                }),
                flavor: flavor.map(|f| match f {
                    FlavorArg::Weak => Flavor::Weak,
                    FlavorArg::Strong => Flavor::Strong,
                }),
                diagnostics,
            };
            let task = SolveTask { flags, trace: trace.as_deref(), out: dest.as_deref(), many: paths.len() > 1 };
            let results: Mutex<Vec<Finished>> = Mutex::new(Vec::new());
            let next = AtomicUsize::new(0);
            std::thread::scope(|s| {
                for _ in 0..jobs.clamp(1, paths.len()) {
                    s.spawn(|| loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(path) = paths.get(i) else { break };
                        let (mut o, mut e) = (Vec::new(), Vec::new());
                        let code = task.run(path, &mut o, &mut e);
                        results.lock().expect("no panics while locked").push((i, code, o, e));
                    });
                }
            });
            let mut results = results.into_inner().expect("no panics while locked");
            results.sort_by_key(|r| r.0);
            for (_, _, o, e) in &results {
                let _ = out.write_all(o);
                let _ = err.write_all(e);
            }
            combine(&results.iter().map(|r| r.1).collect::<Vec<_>>())
        }
        Command::Verify { instance, solution } => {
            let res = (|| -> Result<VerificationReport> {
                let file = InstanceFile::read(&instance)?;
                let sol: SolutionFile = serde_json::from_str(&fs::read_to_string(&solution)?)?;
                verify_file(&file, &sol)
            })();
            match res {
                Ok(report) => {
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"));
                    if report.passed() {
                        EXIT_OK
                    } else {
                        for c in report.failures() {
                            let _ = writeln!(err, "failed: {} ({:?})", c.property, c.witness);
                        }
                        EXIT_ERROR
                    }
                }
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    EXIT_ERROR
                }
            }
        }
        Command::Gen { kind, n, seed, density, feasible, out: dest } => {
            let res = generate(kind, n, seed, density, feasible).and_then(|f| write_or_print(dest.as_deref(), &f.to_json(), out));
            match res {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    EXIT_ERROR
                }
            }
        }
        Command::Selftest { quick } => {
            let scale = if quick { crate::acceptance::Scale::Quick } else { crate::acceptance::Scale::Full };
            let results = crate::acceptance::run_all(scale);
            for r in &results {
                let _ = writeln!(out, "{r}");
            }
            if results.iter().all(|r| r.passed) {
                EXIT_OK
            } else {
                EXIT_ERROR
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("hypercover").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    fn flat_file(m: i64) -> InstanceFile {
        let g = gen::ground(5).unwrap();
        let v = g.members();
        let p = SetFunction::from_fn(g.clone(), |x| if x.is_empty() { 0 } else if x == v { 26 } else { 15 }).unwrap();
        let m = DegreeVector::constant(g, m).unwrap();
        InstanceFile { payload: Payload::Cover { functions: vec![p.to_json()], m: degrees_to(&m) }, options: FileOptions::default() }
    }

    #[test]
    fn flat_instance_solves() {
        let dir = tempfile::tempdir().unwrap();
        let inst = dir.path().join("flat.json");
        let sol = dir.path().join("flat.sol.json");
        fs::write(&inst, flat_file(15).to_json()).unwrap();
        let (code, _, err) = run_args(&["solve", inst.to_str().unwrap(), "--out", sol.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK, "{err}");
        let s: SolutionFile = serde_json::from_str(&fs::read_to_string(&sol).unwrap()).unwrap();
        assert_eq!(s.total_weight, 26);
        assert_eq!(run_args(&["verify", inst.to_str().unwrap(), sol.to_str().unwrap()]).0, EXIT_OK);
    }

    #[test]
    fn infeasible_and_malformed() {
        let dir = tempfile::tempdir().unwrap();
        let inst = dir.path().join("zero.json");
        fs::write(&inst, flat_file(0).to_json()).unwrap();
        let (code, out, _) = run_args(&["solve", inst.to_str().unwrap()]);
        assert_eq!(code, EXIT_INFEASIBLE);
        assert!(out.contains("uncovered"));
        fs::write(&inst, "{\"kind\": \"cover\", ").unwrap();
        assert_eq!(run_args(&["solve", inst.to_str().unwrap()]).0, EXIT_ERROR);
        fs::write(&inst, "{\"kind\": \"cover\", \"m\": {}}").unwrap();
        assert_eq!(run_args(&["solve", inst.to_str().unwrap()]).0, EXIT_ERROR);
    }

    #[test]
    fn verify_rejects_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let inst = dir.path().join("i.json");
        let sol = dir.path().join("s.json");
        let mut s = (0..)
            .find_map(|seed| {
                fs::write(&inst, generate(Kind::LocalCa, 5, seed, 1.0, true).unwrap().to_json()).unwrap();
                assert_eq!(run_args(&["solve", inst.to_str().unwrap(), "--out", sol.to_str().unwrap()]).0, EXIT_OK);
                let s: SolutionFile = serde_json::from_str(&fs::read_to_string(&sol).unwrap()).unwrap();
                (!s.hypergraph.edges.is_empty()).then_some(s)
            })
            .unwrap();
        let good = s.clone();
        s.hypergraph.edges[0].w += 1;
        fs::write(&sol, serde_json::to_string(&s).unwrap()).unwrap();
        let (code, out, _) = run_args(&["verify", inst.to_str().unwrap(), sol.to_str().unwrap()]);
        assert_eq!(code, EXIT_ERROR);
        assert!(out.contains("\"vertex\""));
        let mut s = good;
        s.hypergraph.vertices.push("extra".into());
        fs::write(&sol, serde_json::to_string(&s).unwrap()).unwrap();
        let (code, _, err) = run_args(&["verify", inst.to_str().unwrap(), sol.to_str().unwrap()]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("ground sets differ"));
    }

    #[test]
    fn gen_is_stable() {
        for kind in Kind::ALL {
            let a = run_args(&["gen", kind.to_possible_value().unwrap().get_name(), "-n", "5", "--seed", "9", "--feasible"]);
            let b = run_args(&["gen", kind.to_possible_value().unwrap().get_name(), "-n", "5", "--seed", "9", "--feasible"]);
            assert_eq!(a.0, EXIT_OK, "{}", a.2);
            assert_eq!(a.1, b.1);
            let f = InstanceFile::parse(&a.1).unwrap();
            assert_eq!(f.kind(), kind);
        }
        assert_eq!(run_args(&["gen", "cover", "-n", "40"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["solve", "x.json", "--cap", "22"]).0, EXIT_ERROR);
    }
}
