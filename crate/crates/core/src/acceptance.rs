//! The acceptance suite. Each criterion returns one pass/fail line; every
//! check compares against direct enumeration rather than the solver's own
//! bookkeeping.

use std::fmt;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::augmentation::{solve_application, Application, LocalCA, MixedCA, NodeToArea, SolveMode};
use crate::brute::{self, Frac, Term};
use crate::cli::{self, Kind, EXIT_INFEASIBLE, EXIT_OK};
use crate::cover_basic::{check_feasibility, feasibility_certificate, weak_cover_basic, CoverInstance};
use crate::cover_uniform::{alpha5_calls, weak_cover_uniform_with, UniformCoverInstance, UniformOptions};
use crate::gen;
use crate::hypergraph::{MixedHypergraph, WeightedHypergraph};
use crate::lp::Q;
use crate::oracles::{self, Alpha4Mode, OracleQuery};
use crate::qpolytope::{is_member, q_optimize, FixingPolicy, QInstance};
use crate::sets::{Bound, DegreeVector, SetFunction, Subset};
use crate::trace::CoverTrace;
use crate::verify::{self, check_laminar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    /// The counts stated by the criteria.
    Full,
    /// A tenth of them, for a fast smoke run.
    Quick,
}

impl Scale {
    fn count(self, full: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Quick => (full / 10).max(1),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {status} {}: {} ({:.1?})", self.id, self.name, self.detail, self.elapsed)
    }
}

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn err<E: fmt::Display>(ctx: &str) -> impl Fn(E) -> String + '_ {
    move |e| format!("{ctx}: {e}")
}

// ---------------------------------------------------------------------------
// Independent evaluation of hypergraph quantities from the edge list.

fn coverage(h: &WeightedHypergraph, x: Subset) -> i64 {
    h.edges().filter(|(e, _)| e.intersects(x)).map(|(_, w)| w).sum()
}

fn cut(h: &WeightedHypergraph, x: Subset) -> i64 {
    let v = h.vertices().members();
    h.edges().filter(|(e, _)| e.intersects(x) && e.intersects(v - x)).map(|(_, w)| w).sum()
}

fn degree(h: &WeightedHypergraph, u: usize) -> i64 {
    h.edges().filter(|(e, _)| e.contains(u)).map(|(_, w)| w).sum()
}

fn max_value(p: &SetFunction) -> i64 {
    p.ground().members().subsets().map(|x| p.value(x)).max().unwrap_or(0)
}

/// The checks shared by every weak cover: `b ≥ p` for each function, exact
/// degrees, total weight `K`, and the edge and depth limits.
fn check_weak(
    what: &str,
    functions: &[&SetFunction],
    m: &DegreeVector,
    h: &WeightedHypergraph,
    trace: &CoverTrace,
    edge_limit: i64,
    depth_limit: i64,
) -> Outcome {
    let v = m.ground().members();
    for p in functions {
        if let Some(x) = v.subsets().find(|&x| coverage(h, x) < p.value(x)) {
            return Err(format!("{what}: b({x:?}) = {} < p = {}", coverage(h, x), p.value(x)));
        }
    }
    if let Some(u) = v.iter().find(|&u| degree(h, u) != m.get(u)) {
        return Err(format!("{what}: degree of {u} is {} not {}", degree(h, u), m.get(u)));
    }
    let k = functions.iter().map(|p| max_value(p)).max().unwrap_or(0).max(0);
    let total: i64 = h.edges().map(|(_, w)| w).sum();
    ensure!(total == k, "{what}: total weight {total} but K = {k}");
    ensure!(h.edge_count() as i64 <= edge_limit, "{what}: {} hyperedges > {edge_limit}", h.edge_count());
    ensure!(trace.depth as i64 <= depth_limit, "{what}: depth {} > {depth_limit}", trace.depth);
    Ok(String::new())
}

fn check_sizes(what: &str, m: &DegreeVector, k: i64, h: &WeightedHypergraph) -> Outcome {
    if k <= 0 {
        return Ok(String::new());
    }
    let total = m.total();
    let (lo, hi) = (total.div_euclid(k), (total + k - 1).div_euclid(k));
    for (e, _) in h.edges() {
        let s = e.len() as i64;
        ensure!(lo <= s && s <= hi, "{what}: hyperedge {e:?} of size {s} outside [{lo}, {hi}]");
    }
    Ok(String::new())
}

fn audit(what: &str, functions: &[SetFunction], m: &DegreeVector, trace: &CoverTrace) -> Outcome {
    let report = verify::audit_trace(functions, m, trace).map_err(err(what))?;
    if let Some(c) = report.failures().next() {
        return Err(format!("{what}: trace audit failed `{}` ({:?})", c.property, c.witness));
    }
    Ok(String::new())
}

/// Minimal maximizers of a skew-supermodular function are pairwise disjoint.
fn check_disjoint_maximizers(what: &str, p: &SetFunction) -> Outcome {
    let fam = brute::minimal_maximizers(p);
    for (i, a) in fam.iter().enumerate() {
        for b in &fam[i + 1..] {
            ensure!(!a.intersects(*b), "{what}: minimal maximizers {a:?} and {b:?} meet");
        }
    }
    Ok(String::new())
}

// ---------------------------------------------------------------------------
// Instance suites

struct CoverCase {
    seed: u64,
    p: SetFunction,
    m: DegreeVector,
}

fn cover_cases(count: usize, base: u64) -> Result<Vec<CoverCase>, String> {
    (0..count as u64)
        .map(|i| {
            let seed = base + i;
            let mut rng = gen::rng(seed);
            let n = 2 + (i as usize % 7);
            let density = [0.5, 1.0, 1.5][i as usize % 3];
            let p = gen::skew_function(n, density, &mut rng).map_err(err("generate"))?;
            let m = gen::feasible_degrees(&p, &mut rng).map_err(err("generate"))?;
            Ok(CoverCase { seed, p, m })
        })
        .collect()
}

/// Shared state: criterion 9 reuses the traces of 1–3.
#[derive(Default)]
struct Findings {
    functions_checked: usize,
    traces_audited: usize,
    tight_checked: usize,
    structural: Vec<String>,
}

fn criterion1(scale: Scale, found: &mut Findings) -> Outcome {
    let cases = cover_cases(scale.count(500), 1_000)?;
    let start = Instant::now();
    let mut edges = 0;
    for c in &cases {
        let what = format!("seed {}", c.seed);
        ensure!(check_feasibility(&CoverInstance::new(c.p.clone(), c.m.clone()).map_err(err(&what))?), "{what}: generated instance infeasible");
        let n = c.p.ground().len() as i64;
        let inst = CoverInstance::new(c.p.clone(), c.m.clone()).map_err(err(&what))?;
        let (h, trace) = weak_cover_basic(&inst).map_err(err(&what))?;
        check_weak(&what, &[&c.p], &c.m, &h, &trace, 4 * n - 1, 4 * n - 1)?;
        edges += h.edge_count();
        if let Err(e) = audit(&what, std::slice::from_ref(&c.p), &c.m, &trace) {
            found.structural.push(e);
        }
        if let Err(e) = check_disjoint_maximizers(&what, &c.p) {
            found.structural.push(e);
        }
        found.functions_checked += 1;
        found.traces_audited += 1;
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:.1?}, budget 60 s");
    Ok(format!("{} instances, {edges} hyperedges, {elapsed:.1?}", cases.len()))
}

fn criterion2(scale: Scale, found: &mut Findings) -> Outcome {
    let cases = cover_cases(scale.count(500), 1_000)?;
    let opts = UniformOptions { diagnostics: true, ..UniformOptions::default() };
    let mut alpha5 = 0;
    for c in &cases {
        let what = format!("seed {}", c.seed);
        let n = c.p.ground().len() as i64;
        let inst = UniformCoverInstance::single(c.p.clone(), c.m.clone()).map_err(err(&what))?;
        let sol = weak_cover_uniform_with(&inst, &opts).map_err(err(&what))?;
        let (h, trace) = (&sol.hypergraph, &sol.trace);
        check_weak(&what, &[&c.p], &c.m, h, trace, 11 * n, 11 * n + 1)?;
        check_sizes(&what, &c.m, max_value(&c.p), h)?;
        let calls = alpha5_calls(trace);
        ensure!(calls <= 1, "{what}: α⁽⁵⁾ chosen {calls} times");
        alpha5 += calls;
        if let Err(e) = audit(&what, std::slice::from_ref(&c.p), &c.m, trace) {
            found.structural.push(e);
        }
        match &sol.diagnostics {
            Some(d) if d.ok() => found.tight_checked += 1,
            Some(d) => found.structural.push(format!("{what}: diagnostics {:?}", d.violations.first())),
            None => found.structural.push(format!("{what}: diagnostics missing")),
        }
        found.traces_audited += 1;
    }
    Ok(format!("{} instances, α⁽⁵⁾ used in {alpha5}", cases.len()))
}

fn criterion3(scale: Scale, found: &mut Findings) -> Outcome {
    let count = scale.count(200);
    for i in 0..count as u64 {
        let seed = 3_000 + i;
        let what = format!("seed {seed}");
        let mut rng = gen::rng(seed);
        let n = 2 + (i as usize % 6);
        let (q, r) = gen::symmetric_pair(n, 1.0, &mut rng).map_err(err(&what))?;
        ensure!(max_value(&q) == max_value(&r), "{what}: K_q ≠ K_r");
        for f in [&q, &r] {
            ensure!(f.is_symmetric() && brute::skew_violation(f).is_none(), "{what}: generator broke its contract");
            check_disjoint_maximizers(&what, f).unwrap_or_else(|e| {
                found.structural.push(e);
                String::new()
            });
            found.functions_checked += 1;
        }
        let p = q.max(&r).map_err(err(&what))?;
        let m = gen::feasible_degrees(&p, &mut rng).map_err(err(&what))?;
        let inst = UniformCoverInstance::pair(q.clone(), r.clone(), m.clone()).map_err(err(&what))?;
        let sol = weak_cover_uniform_with(&inst, &UniformOptions::default()).map_err(err(&what))?;
        let nn = n as i64;
        check_weak(&what, &[&q, &r], &m, &sol.hypergraph, &sol.trace, 14 * nn * nn - 1, 14 * nn * nn)?;
        check_sizes(&what, &m, max_value(&p), &sol.hypergraph)?;
        if let Err(e) = audit(&what, &[q, r], &m, &sol.trace) {
            found.structural.push(e);
        }
        found.traces_audited += 1;
    }
    Ok(format!("{count} instances"))
}

fn criterion4(scale: Scale) -> Outcome {
    let count = scale.count(300);
    for i in 0..count as u64 {
        let seed = 4_000 + i;
        let what = format!("seed {seed}");
        let mut rng = gen::rng(seed);
        let n = 2 + (i as usize % 7);
        let p = gen::symmetric_function(n, [0.5, 1.0, 1.5][i as usize % 3], &mut rng).map_err(err(&what))?;
        let m = gen::feasible_degrees(&p, &mut rng).map_err(err(&what))?;
        let (h, _) = if i % 2 == 0 {
            weak_cover_basic(&CoverInstance::new(p.clone(), m.clone()).map_err(err(&what))?).map_err(err(&what))?
        } else {
            let sol = weak_cover_uniform_with(&UniformCoverInstance::single(p.clone(), m.clone()).map_err(err(&what))?, &UniformOptions::default())
                .map_err(err(&what))?;
            (sol.hypergraph, sol.trace)
        };
        let total: i64 = h.edges().map(|(_, w)| w).sum();
        ensure!(total == max_value(&p).max(0), "{what}: total weight {total} ≠ K_p");
        if let Some(x) = p.ground().members().subsets().find(|&x| cut(&h, x) < p.value(x)) {
            return Err(format!("{what}: d({x:?}) = {} < p = {}", cut(&h, x), p.value(x)));
        }
    }
    Ok(format!("{count} symmetric instances, d ≥ p everywhere"))
}

fn criterion5() -> Outcome {
    let n = 5usize;
    let mid = (1i64 << (n - 1)) - 1;
    let top = (1i64 << n) - n as i64 - 1;
    ensure!(mid == 15 && top == 26, "flat values {mid}, {top}");
    let g = gen::ground(n).map_err(err("ground"))?;
    let v = g.members();
    let p = SetFunction::from_fn(g.clone(), |x| if x.is_empty() { 0 } else if x == v { top } else { mid }).map_err(err("p"))?;
    let m = DegreeVector::constant(g, mid).map_err(err("m"))?;
    let (h, trace) = weak_cover_basic(&CoverInstance::new(p.clone(), m.clone()).map_err(err("basic"))?).map_err(err("basic"))?;
    check_weak("basic", &[&p], &m, &h, &trace, 19, 19)?;
    let basic_edges = h.edge_count();
    let sol = weak_cover_uniform_with(&UniformCoverInstance::single(p.clone(), m.clone()).map_err(err("uniform"))?, &UniformOptions::default())
        .map_err(err("uniform"))?;
    check_weak("uniform", &[&p], &m, &sol.hypergraph, &sol.trace, 55, 56)?;
    let sizes: Vec<usize> = sol.hypergraph.edges().map(|(e, _)| e.len()).collect();
    ensure!(sizes.iter().all(|s| (2..=3).contains(s)), "uniform sizes {sizes:?}");
    Ok(format!("Σw = {top}, degrees ≡ {mid}; basic {basic_edges} hyperedges, uniform sizes {sizes:?}"))
}

fn node_to_area_ok(g: &WeightedHypergraph, areas: &[(Subset, i64)]) -> Option<String> {
    let v = g.vertices().members();
    for &(w, r) in areas {
        for u in (v - w).iter() {
            let lam = v.subsets().filter(|x| x.contains(u) && !x.intersects(w)).map(|x| cut(g, x)).min().unwrap_or(0);
            if lam < r {
                return Some(format!("λ({u}, {w:?}) = {lam} < {r}"));
            }
        }
    }
    None
}

fn arc_conn(mixed: &MixedHypergraph, from: usize, to: usize) -> i64 {
    let v = mixed.vertices().members();
    v.subsets().filter(|x| x.contains(to) && !x.contains(from)).map(|x| mixed.in_cut(x)).min().unwrap_or(0)
}

fn criterion6(scale: Scale) -> Outcome {
    let opts = UniformOptions::default();
    let mode = |i: u64| if i.is_multiple_of(2) { SolveMode::Basic } else { SolveMode::Uniform };
    let local = scale.count(200);
    for i in 0..local as u64 {
        let seed = 6_000 + i;
        let what = format!("local seed {seed}");
        let mut rng = gen::rng(seed);
        let n = 2 + (i as usize % 6);
        let (graph, targets) = gen::random_local(n, 1.0, &mut rng).map_err(err(&what))?;
        let sol = solve_application(&Application::Local(LocalCA { graph: graph.clone(), targets: targets.clone(), m: None }), mode(i), &opts)
            .map_err(err(&what))?;
        let aug = graph.add(&sol.hypergraph).map_err(err(&what))?;
        for &(u, v, r) in &targets {
            let lam = brute::local_connectivity(&aug, u, v);
            ensure!(lam >= r, "{what}: λ({u},{v}) = {lam} < {r}");
        }
    }
    let areas_count = scale.count(50);
    for i in 0..areas_count as u64 {
        let seed = 6_500 + i;
        let what = format!("node-to-area seed {seed}");
        let mut rng = gen::rng(seed);
        let n = 2 + (i as usize % 6);
        let graph = gen::random_hypergraph(&gen::ground(n).map_err(err(&what))?, 1.0, &mut rng).map_err(err(&what))?;
        let areas = gen::random_areas(n, &mut rng);
        let app = Application::NodeToArea(NodeToArea { graph: graph.clone(), areas: areas.clone(), m: None });
        let sol = solve_application(&app, mode(i), &opts).map_err(err(&what))?;
        let aug = graph.add(&sol.hypergraph).map_err(err(&what))?;
        if let Some(e) = node_to_area_ok(&aug, &areas) {
            return Err(format!("{what}: {e}"));
        }
    }
    let mixed_count = scale.count(50);
    let mut slack = 0;
    for i in 0..mixed_count as u64 {
        let seed = 6_800 + i;
        let what = format!("mixed seed {seed}");
        let mut rng = gen::rng(seed);
        let n = 2 + (i as usize % 6);
        let mixed = gen::random_mixed(n, 1.0, &mut rng).map_err(err(&what))?;
        let root = rng.gen_range(0..n);
        let (k, l) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let p = crate::augmentation::build_p_mixed_sym(&mixed, root, k, l).map_err(err(&what))?;
        let base = crate::augmentation::min_degree_vector(&p).map_err(err(&what))?;
        let vals: Vec<i64> = base.member_values().iter().map(|&v| v + rng.gen_range(0..=2)).collect();
        let m = DegreeVector::new(base.ground().clone(), &vals).map_err(err(&what))?;
        let app = Application::Mixed(MixedCA { mixed: mixed.clone(), root, k, l, m });
        let sol = solve_application(&app, mode(i), &opts).map_err(err(&what))?;
        slack += sol.report.slack.unwrap_or(0);
        let aug = mixed.with_undirected(&sol.hypergraph).map_err(err(&what))?;
        for v in (aug.vertices().members() - Subset::singleton(root)).iter() {
            let out = arc_conn(&aug, root, v);
            let back = arc_conn(&aug, v, root);
            ensure!(out >= k, "{what}: λ(root, {v}) = {out} < k = {k}");
            ensure!(back >= l, "{what}: λ({v}, root) = {back} < ℓ = {l}");
        }
    }
    Ok(format!("{local} local, {areas_count} node-to-area, {mixed_count} mixed (slack {slack})"))
}

fn random_frac(rng: &mut ChaCha8Rng) -> Frac {
    Frac::new(rng.gen_range(-12..=12), rng.gen_range(1..=4))
}

fn criterion7(scale: Scale) -> Outcome {
    let count = scale.count(1000);
    let mut max_iterations = 0;
    for i in 0..count as u64 {
        let seed = 7_000 + i;
        let what = format!("query {seed}");
        let mut rng = gen::rng(seed);
        let n = 1 + (i as usize % 6);
        let p = gen::skew_function(n.max(2), 1.0, &mut rng).map_err(err(&what))?;
        let n = p.ground().len();
        let v = p.ground().members();
        let g = gen::random_hypergraph(p.ground(), 1.0, &mut rng).map_err(err(&what))?;
        let s0 = Subset::from_indices(v.iter().filter(|_| rng.gen_bool(0.2)));
        let t0 = Subset::from_indices((v - s0).iter().filter(|_| rng.gen_bool(0.2)));
        let y: Vec<Frac> = (0..n).map(|_| random_frac(&mut rng)).collect();
        let query = OracleQuery::new(&p).graph(&g).require(s0).forbid(t0).weights(y.clone());
        let answers = [
            (oracles::max_oracle_sc(&query), Term::Cut, "sc"),
            (oracles::max_oracle_b(&query), Term::Coverage, "b"),
            (oracles::max_oracle_empty(&p, s0, t0, &y), Term::None, "empty"),
        ];
        for (ans, term, name) in answers {
            let ans = ans.map_err(err(&what))?;
            let (_, best) = brute::max_query(&p, Some(&g), term, s0, t0, &y).ok_or(format!("{what}: empty scan"))?;
            ensure!(ans.objective == best, "{what}: {name} oracle {} vs scan {best}", ans.objective);
            let (_, at) = brute::max_query(&p, Some(&g), term, ans.set, v - ans.set, &y).ok_or(format!("{what}: bad set"))?;
            ensure!(at == best && s0.is_subset_of(ans.set) && !ans.set.intersects(t0), "{what}: {name} returned a non-optimal set");
        }
        let fam = oracles::minimal_maximizers(&p).map_err(err(&what))?;
        let mut expect = brute::minimal_maximizers(&p);
        expect.sort_by_key(|s| s.bits());
        let mut got = fam.sets.clone();
        got.sort_by_key(|s| s.bits());
        ensure!(got == expect, "{what}: minimal maximizers {got:?} vs {expect:?}");
        let m: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=20)).collect();
        let a = Subset::from_indices(v.iter().filter(|_| rng.gen_bool(0.6)));
        let expect = brute::alpha4(&p, &m, a).map_or(Bound::Infinite, Bound::Finite);
        for mode in [Alpha4Mode::Ratio, Alpha4Mode::Exhaustive] {
            let got = oracles::alpha4(&p, &m, a, mode).map_err(err(&what))?;
            ensure!(got == expect, "{what}: α⁽⁴⁾ {mode:?} {got} vs {expect}");
        }
        let f = p.clone();
        let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
        let gfun = SetFunction::from_fn(p.ground().clone(), |x| 1 + x.weight(&weights)).map_err(err(&what))?;
        let r = oracles::ratio_maximize(&f, &gfun).map_err(err(&what))?;
        let expect = brute::max_ratio(&f, &gfun);
        ensure!(r.ratio == expect, "{what}: ratio {} vs {expect}", r.ratio);
        ensure!(Frac::new(f.value(r.set) as i128, gfun.value(r.set) as i128) == expect, "{what}: ratio set does not attain");
        let gmax = max_value(&gfun);
        ensure!(r.iterations as i64 <= gmax, "{what}: {} Dinkelbach iterations > max g = {gmax}", r.iterations);
        max_iterations = max_iterations.max(r.iterations);
    }
    Ok(format!("{count} queries, at most {max_iterations} ratio iterations"))
}

fn to_q(x: Frac) -> Q {
    Q::new((*x.numer()).into(), (*x.denom()).into())
}

fn criterion8(scale: Scale) -> Outcome {
    let count = scale.count(300);
    let mut points = 0;
    let mut empty = 0;
    for i in 0..count as u64 {
        let seed = 8_000 + i;
        let what = format!("seed {seed}");
        let mut rng = gen::rng(seed);
        let n = 2 + (i as usize % 5);
        let mut p = gen::skew_function(n, 1.0, &mut rng).map_err(err(&what))?;
        while max_value(&p) <= 0 {
            p = gen::skew_function(n, 1.0, &mut rng).map_err(err(&what))?;
        }
        let m = gen::feasible_degrees(&p, &mut rng).map_err(err(&what))?;
        // Positive degrees, as in every call of the uniform algorithm.
        let (_, p, m) = crate::cover_basic::preprocess(&p, &m).map_err(err(&what))?;
        if p.ground().is_empty() || max_value(&p) <= 0 {
            continue;
        }
        let inst = QInstance::new(&p, &m).map_err(err(&what))?;
        let u = p.ground().universe_size();
        let c: Vec<Frac> = (0..u).map(|_| Frac::from_integer(rng.gen_range(-5..=5))).collect();
        let cq: Vec<Q> = c.iter().map(|&x| to_q(x)).collect();
        let got = q_optimize(&inst, &cq, FixingPolicy::default());
        match (brute::q_best(&p, m.as_slice(), &c), got) {
            (None, Err(crate::Error::QInfeasible)) => empty += 1,
            (None, other) => return Err(format!("{what}: Q empty by enumeration, optimizer gave {other:?}")),
            (Some((_, best)), Ok(sol)) => {
                let x: Vec<Frac> = sol.point.iter().map(|q| Frac::new(q.numer().to_i128().unwrap(), q.denom().to_i128().unwrap())).collect();
                ensure!(x.iter().all(|v| *v == Frac::from_integer(0) || *v == Frac::from_integer(1)), "{what}: point not 0/1");
                ensure!(brute::q_member(&p, m.as_slice(), &x), "{what}: optimizer point violates Q");
                let val = x.iter().zip(&c).fold(Frac::from_integer(0), |s, (a, b)| s + a * b);
                ensure!(val == best, "{what}: optimum {val} vs enumeration {best}");
            }
            (Some(_), Err(e)) => return Err(format!("{what}: optimizer failed on non-empty Q: {e}")),
        }
        for _ in 0..8 {
            let x: Vec<Frac> = (0..u)
                .map(|_| if rng.gen_bool(0.5) { Frac::from_integer(rng.gen_range(0..=1)) } else { Frac::new(rng.gen_range(0..=3), 3) })
                .collect();
            let xq: Vec<Q> = x.iter().map(|&v| to_q(v)).collect();
            let lib = is_member(&inst, &xq).map_err(err(&what))?;
            ensure!(lib == brute::q_member(&p, m.as_slice(), &x), "{what}: membership disagrees at {x:?}");
            points += 1;
        }
    }
    Ok(format!("{count} instances ({empty} with empty Q), {points} membership points"))
}

fn criterion9(scale: Scale, found: &Findings) -> Outcome {
    if let Some(e) = found.structural.first() {
        return Err(format!("{} structural failures, first: {e}", found.structural.len()));
    }
    let count = scale.count(200);
    for i in 0..count as u64 {
        let mut rng = gen::rng(9_000 + i);
        let n = 1 + (i as usize % 10);
        let family = gen::random_laminar(n, &mut rng);
        ensure!(check_laminar(&family), "seed {}: generated family not laminar", 9_000 + i);
        let z = Subset::from_indices((0..n).filter(|_| rng.gen_bool(0.3)));
        let mut projected: Vec<Subset> = family.iter().map(|&x| x - z).filter(|x| !x.is_empty()).collect();
        projected.sort_by_key(|s| s.bits());
        projected.dedup();
        ensure!(check_laminar(&projected), "seed {}: projection not laminar", 9_000 + i);
        ensure!(
            family.len() <= projected.len() + 3 * z.len(),
            "seed {}: |L| = {} > |L'| + 3|Z| = {}",
            9_000 + i,
            family.len(),
            projected.len() + 3 * z.len()
        );
    }
    Ok(format!(
        "{} functions with disjoint minimal maximizers, {} traces audited, {} uniform traces with laminar tight sets and monotone slack, {count} projections",
        found.functions_checked, found.traces_audited, found.tight_checked
    ))
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let code = cli::run(std::iter::once("hypercover").chain(args.iter().copied()), &mut o, &mut e);
    (code, String::from_utf8_lossy(&o).into_owned(), String::from_utf8_lossy(&e).into_owned())
}

fn criterion10(scale: Scale) -> Outcome {
    let dir = tempfile::tempdir().map_err(err("tempdir"))?;
    let per_kind = scale.count(100);
    for kind in Kind::ALL {
        let name = clap::ValueEnum::to_possible_value(&kind).expect("named").get_name().to_string();
        for seed in 0..per_kind as u64 {
            let what = format!("{name} seed {seed}");
            let n = (2 + seed % 6).to_string();
            let inst = dir.path().join(format!("{name}-{seed}.json"));
            let sol = dir.path().join(format!("{name}-{seed}.sol.json"));
            let (inst_s, sol_s) = (inst.to_str().expect("utf-8"), sol.to_str().expect("utf-8"));
            let seed_s = seed.to_string();
            let (code, _, e) = run_cli(&["gen", &name, "-n", &n, "--seed", &seed_s, "--feasible", "--out", inst_s]);
            ensure!(code == EXIT_OK, "{what}: gen exited {code}: {e}");
            let file = cli::InstanceFile::read(&inst).map_err(err(&what))?;
            let (p, m) = match file.instance().map_err(err(&what))? {
                cli::Instance::Cover { functions, m } => (functions[0].clone(), m),
                cli::Instance::App(app) => {
                    let (target, m, _) = app.reduce().map_err(err(&what))?;
                    (target.p().map_err(err(&what))?, m)
                }
            };
            let cert = feasibility_certificate(&p, &m).map_err(err(&what))?;
            ensure!(cert.is_none(), "{what}: generated instance infeasible: {cert:?}");
            let mode = if seed % 2 == 0 { "basic" } else { "uniform" };
            let (code, _, e) = run_cli(&["solve", inst_s, "--mode", mode, "--out", sol_s]);
            ensure!(code == EXIT_OK, "{what}: solve exited {code}: {e}");
            let (code, _, e) = run_cli(&["verify", inst_s, sol_s]);
            ensure!(code == EXIT_OK, "{what}: verify exited {code}: {e}");
        }
    }
    // Empty graph, every pair needing 2^{n-1} - 1, degrees 2^{n-1}.
    let n = 5usize;
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let targets: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .map(|(u, v)| serde_json::json!({"u": labels[u], "v": labels[v], "r": (1 << (n - 1)) - 1}))
        .collect();
    let m: serde_json::Map<String, serde_json::Value> = labels.iter().map(|l| (l.clone(), (1i64 << (n - 1)).into())).collect();
    let file = serde_json::json!({
        "kind": "local_ca",
        "graph": {"vertices": labels, "edges": []},
        "targets": targets,
        "m": m,
    });
    let path = dir.path().join("flat.json");
    std::fs::write(&path, file.to_string()).map_err(err("write"))?;
    let (code, out, _) = run_cli(&["solve", path.to_str().expect("utf-8")]);
    ensure!(code == EXIT_INFEASIBLE, "degree 16 instance exited {code}");
    ensure!(out.contains("degree_above_max") && out.contains("\"degree\":16") && out.contains("\"max_value\":15"), "certificate missing: {out}");
    Ok(format!("{} round trips; m ≡ 16 > K_p = 15 exits 2", 5 * per_kind))
}

fn timed(id: u8, name: &'static str, f: impl FnOnce() -> Outcome) -> CriterionResult {
    let start = Instant::now();
    let res = f();
    let elapsed = start.elapsed();
    match res {
        Ok(detail) => CriterionResult { id, name, passed: true, detail, elapsed },
        Err(detail) => CriterionResult { id, name, passed: false, detail, elapsed },
    }
}

const NAMES: [&str; 10] = [
    "basic cover correctness",
    "near-uniform cover",
    "two-function cover",
    "strong cover from weak cover",
    "n = 5 replay",
    "augmentation end to end",
    "oracle equivalence",
    "Q integrality",
    "structural invariants",
    "CLI round trip",
];

fn dispatch(id: u8, scale: Scale, found: &mut Option<Findings>) -> Outcome {
    match id {
        1..=3 => {
            let f = found.get_or_insert_with(Findings::default);
            match id {
                1 => criterion1(scale, f),
                2 => criterion2(scale, f),
                _ => criterion3(scale, f),
            }
        }
        4 => criterion4(scale),
        5 => criterion5(),
        6 => criterion6(scale),
        7 => criterion7(scale),
        8 => criterion8(scale),
        9 => {
            // Run alone, it first collects what criteria 1-3 record.
            let f = match found.take() {
                Some(f) => f,
                None => {
                    let mut f = Findings::default();
                    criterion1(scale, &mut f)?;
                    criterion2(scale, &mut f)?;
                    criterion3(scale, &mut f)?;
                    f
                }
            };
            criterion9(scale, &f)
        }
        10 => criterion10(scale),
        _ => Err(format!("no criterion {id}")),
    }
}

/// Run one criterion (1 to 10) on its own.
pub fn run_criterion(id: u8, scale: Scale) -> CriterionResult {
    timed(id, NAMES.get(id as usize - 1).copied().unwrap_or("unknown"), || dispatch(id, scale, &mut None))
}

/// Run all ten criteria in order, sharing the solves of 1-3 with 9.
pub fn run_all(scale: Scale) -> Vec<CriterionResult> {
    let mut found = None;
    (1..=10u8).map(|id| timed(id, NAMES[id as usize - 1], || dispatch(id, scale, &mut found))).collect()
}
