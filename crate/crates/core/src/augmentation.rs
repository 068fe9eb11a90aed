//! Connectivity augmentation by degree-specified hypergraphs: requirement
//! functions, the strong-cover reduction and minimum degree vectors.

use serde::{Deserialize, Serialize};

use crate::cover_basic::{weak_cover_basic, CoverInstance};
use crate::cover_uniform::{weak_cover_uniform_with, UniformCoverInstance, UniformOptions, UniformSpec};
use crate::error::{Error, Result};
use crate::hypergraph::{MixedHypergraph, WeightedHypergraph};
use crate::oracles::max_oracle_int;
use crate::sets::{configured_cap, DegreeVector, GroundSet, SetFunction, Subset};
use crate::trace::CoverTrace;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    #[default]
    Basic,
    Uniform,
}

/// `r(u, v)` for unordered pairs; missing pairs are 0.
pub type PairTargets = Vec<(usize, usize, i64)>;

/// `R(X) - d_G(X)` with `R(X)` the largest target separated by `X`.
pub fn build_p_local(g: &WeightedHypergraph, r: &PairTargets) -> Result<SetFunction> {
    let ground = g.vertices().clone();
    for &(u, v, t) in r {
        ground.check(Subset::singleton(u) | Subset::singleton(v))?;
        if u == v {
            return Err(Error::Invalid(format!("target on the pair ({u}, {u})")));
        }
        if t < 0 {
            return Err(Error::Invalid(format!("negative target {t}")));
        }
    }
    SetFunction::from_fn(ground, |x| {
        let sep = r.iter().filter(|&&(u, v, _)| x.contains(u) != x.contains(v)).map(|&(_, _, t)| t);
        sep.max().unwrap_or(0) - g.cut(x)
    })
}

/// `R(X) - d_G(X)` with `R(X) = max{r(W) : W ∩ X = ∅ or W ⊆ X}` on proper
/// nonempty `X`, and `R = 0` when no area qualifies or at `∅`, `V`.
pub fn build_p_node_to_area(g: &WeightedHypergraph, areas: &[(Subset, i64)]) -> Result<SetFunction> {
    let ground = g.vertices().clone();
    for &(w, t) in areas {
        ground.check(w)?;
        if w.is_empty() {
            return Err(Error::EmptyMember);
        }
        if t < 0 {
            return Err(Error::Invalid(format!("negative target {t}")));
        }
    }
    let v = ground.members();
    SetFunction::from_fn(ground, |x| {
        if x.is_empty() || x == v {
            return 0;
        }
        let ok = areas.iter().filter(|(w, _)| !w.intersects(x) || w.is_subset_of(x));
        ok.map(|&(_, t)| t).max().unwrap_or(0) - g.cut(x)
    })
}

/// `k - d^in(X)` on nonempty `X ⊆ V - root`, `ℓ - d^in(X)` when
/// `root ∈ X ⊊ V`, `0` at `∅` and `V`.
pub fn build_p_mixed(mixed: &MixedHypergraph, root: usize, k: i64, l: i64) -> Result<SetFunction> {
    let ground = mixed.vertices().clone();
    ground.check(Subset::singleton(root))?;
    if k < 1 || l < 1 {
        return Err(Error::Invalid(format!("k and ℓ must be positive, got ({k}, {l})")));
    }
    let v = ground.members();
    SetFunction::from_fn(ground, |x| {
        if x.is_empty() || x == v {
            0
        } else if x.contains(root) {
            l - mixed.in_cut(x)
        } else {
            k - mixed.in_cut(x)
        }
    })
}

/// `max{p(X), p(V∖X)}` for the mixed requirement.
pub fn build_p_mixed_sym(mixed: &MixedHypergraph, root: usize, k: i64, l: i64) -> Result<SetFunction> {
    build_p_mixed(mixed, root, k, l)?.symmetrize().tabulate()
}

/// Function(s) whose strong cover is sought.
#[derive(Clone, Debug)]
pub enum StrongTarget {
    Single(SetFunction),
    Pair(SetFunction, SetFunction),
}

impl StrongTarget {
    pub fn p(&self) -> Result<SetFunction> {
        match self {
            StrongTarget::Single(p) => p.tabulate(),
            StrongTarget::Pair(q, r) => q.max(r)?.tabulate(),
        }
    }

    pub fn functions(&self) -> Vec<&SetFunction> {
        match self {
            StrongTarget::Single(p) => vec![p],
            StrongTarget::Pair(q, r) => vec![q, r],
        }
    }
}

/// Weak cover of a symmetric target, checked to be a strong cover.
/// The pair target always runs the uniform algorithm.
pub fn solve_strong_cover(
    target: &StrongTarget,
    m: &DegreeVector,
    mode: SolveMode,
    opts: &UniformOptions,
) -> Result<(WeightedHypergraph, CoverTrace)> {
    m.ground().check_cap(configured_cap())?;
    for f in target.functions() {
        if let Some(x) = f.symmetry_violation() {
            return Err(Error::NotSymmetric(x));
        }
    }
    let (h, trace) = match (target, mode) {
        (StrongTarget::Single(p), SolveMode::Basic) => weak_cover_basic(&CoverInstance::new(p.clone(), m.clone())?)?,
        (StrongTarget::Single(p), SolveMode::Uniform) => {
            let sol = weak_cover_uniform_with(&UniformCoverInstance::single(p.clone(), m.clone())?, opts)?;
            (sol.hypergraph, sol.trace)
        }
        (StrongTarget::Pair(q, r), _) => {
            let inst = UniformCoverInstance::new(UniformSpec::Pair(q.clone(), r.clone()), m.clone())?;
            let sol = weak_cover_uniform_with(&inst, opts)?;
            (sol.hypergraph, sol.trace)
        }
    };
    for f in target.functions() {
        if let Some(x) = f.ground().subsets().find(|&x| h.cut(x) < f.value(x)) {
            return Err(Error::Hypothesis(format!("weak cover is not a strong cover at {x:?}")));
        }
    }
    Ok((h, trace))
}

/// Minimum-sum `m ≥ 0` with `m(X) ≥ p(X)` for all `X`: start from `K_p`
/// everywhere and lower each vertex in index order as far as one oracle
/// call allows.
pub fn min_degree_vector(p: &SetFunction) -> Result<DegreeVector> {
    let ground = p.ground().clone();
    let k = p.max_value().max(0);
    let mut m = vec![0i64; ground.universe_size()];
    for u in ground.members().iter() {
        m[u] = k;
    }
    for u in ground.members().iter() {
        let mut y: Vec<i64> = m.iter().map(|v| -v).collect();
        y[u] = 0;
        let ans = max_oracle_int(p, Subset::singleton(u), Subset::EMPTY, &y)?;
        let need = ans.objective.to_integer() as i64;
        m[u] = need.max(0);
    }
    let vals: Vec<i64> = ground.members().iter().map(|u| m[u]).collect();
    DegreeVector::new(ground, &vals)
}

// ---------------------------------------------------------------------------
// Application instances

#[derive(Clone, Debug)]
pub struct LocalCA {
    pub graph: WeightedHypergraph,
    pub targets: PairTargets,
    /// Degree specification; `None` asks for the minimum total degree.
    pub m: Option<DegreeVector>,
}

#[derive(Clone, Debug)]
pub struct SimulCA {
    pub first: (WeightedHypergraph, PairTargets),
    pub second: (WeightedHypergraph, PairTargets),
    pub m: Option<DegreeVector>,
}

#[derive(Clone, Debug)]
pub struct NodeToArea {
    pub graph: WeightedHypergraph,
    pub areas: Vec<(Subset, i64)>,
    pub m: Option<DegreeVector>,
}

#[derive(Clone, Debug)]
pub struct MixedCA {
    pub mixed: MixedHypergraph,
    pub root: usize,
    pub k: i64,
    pub l: i64,
    /// Upper bound on the degrees of the added hypergraph.
    pub m: DegreeVector,
}

#[derive(Clone, Debug)]
pub enum Application {
    Local(LocalCA),
    Simul(SimulCA),
    NodeToArea(NodeToArea),
    Mixed(MixedCA),
}

/// A connectivity requirement that the augmented graph misses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shortfall {
    /// Graph index (simultaneous problem) or 0.
    pub graph: usize,
    pub from: Subset,
    pub to: Subset,
    pub required: i64,
    pub actual: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplicationReport {
    /// `K_p` of the (symmetrized) requirement function.
    pub k: i64,
    pub degree_total: i64,
    /// Mixed problem: total of `m - m'`, where `m'` caps `m` at `K_p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<i64>,
    pub shortfall: Option<Shortfall>,
}

#[derive(Clone, Debug)]
pub struct ApplicationSolution {
    pub hypergraph: WeightedHypergraph,
    pub degrees: DegreeVector,
    pub trace: CoverTrace,
    pub report: ApplicationReport,
}

impl Application {
    pub fn ground(&self) -> &GroundSet {
        match self {
            Application::Local(a) => a.graph.vertices(),
            Application::Simul(a) => a.first.0.vertices(),
            Application::NodeToArea(a) => a.graph.vertices(),
            Application::Mixed(a) => a.mixed.vertices(),
        }
    }

    /// The requirement function(s) and the degree specification to cover.
    pub fn reduce(&self) -> Result<(StrongTarget, DegreeVector, Option<i64>)> {
        self.ground().check_cap(configured_cap())?;
        let pick = |p: &SetFunction, m: &Option<DegreeVector>| match m {
            Some(m) => Ok(m.clone()),
            None => min_degree_vector(p),
        };
        match self {
            Application::Local(a) => {
                let p = build_p_local(&a.graph, &a.targets)?;
                let m = pick(&p, &a.m)?;
                Ok((StrongTarget::Single(p), m, None))
            }
            Application::NodeToArea(a) => {
                let p = build_p_node_to_area(&a.graph, &a.areas)?;
                let m = pick(&p, &a.m)?;
                Ok((StrongTarget::Single(p), m, None))
            }
            Application::Simul(a) => {
                if a.first.0.vertices() != a.second.0.vertices() {
                    return Err(Error::GroundMismatch);
                }
                let g1 = max_gap(&a.first.0, &a.first.1)?;
                let g2 = max_gap(&a.second.0, &a.second.1)?;
                if g1 != g2 {
                    return Err(Error::GapMismatch { first: g1, second: g2 });
                }
                let q = build_p_local(&a.first.0, &a.first.1)?;
                let r = build_p_local(&a.second.0, &a.second.1)?;
                let target = StrongTarget::Pair(q, r);
                let m = pick(&target.p()?, &a.m)?;
                Ok((target, m, None))
            }
            Application::Mixed(a) => {
                if a.m.ground() != a.mixed.vertices() {
                    return Err(Error::GroundMismatch);
                }
                let p = build_p_mixed_sym(&a.mixed, a.root, a.k, a.l)?;
                let k = p.max_value();
                let vals: Vec<i64> = a.m.member_values().iter().map(|&v| v.min(k.max(0))).collect();
                let capped = DegreeVector::new(a.m.ground().clone(), &vals)?;
                let slack = a.m.total() - capped.total();
                Ok((StrongTarget::Single(p), capped, Some(slack)))
            }
        }
    }

    /// Every connectivity requirement, checked on the graph plus `h`.
    pub fn shortfall(&self, h: &WeightedHypergraph) -> Result<Option<Shortfall>> {
        let pairs = |graph: usize, g: &WeightedHypergraph, r: &PairTargets| -> Result<Option<Shortfall>> {
            let aug = g.add(h)?;
            for &(u, v, t) in r {
                let lam = aug.min_cut(u, v)?;
                if lam < t {
                    let (from, to) = (Subset::singleton(u), Subset::singleton(v));
                    return Ok(Some(Shortfall { graph, from, to, required: t, actual: lam }));
                }
            }
            Ok(None)
        };
        match self {
            Application::Local(a) => pairs(0, &a.graph, &a.targets),
            Application::Simul(a) => Ok(pairs(1, &a.first.0, &a.first.1)?.or(pairs(2, &a.second.0, &a.second.1)?)),
            Application::NodeToArea(a) => {
                let aug = a.graph.add(h)?;
                for &(w, t) in &a.areas {
                    for u in (aug.vertices().members() - w).iter() {
                        let lam = aug.min_cut_to_area(u, w)?;
                        if lam < t {
                            let from = Subset::singleton(u);
                            return Ok(Some(Shortfall { graph: 0, from, to: w, required: t, actual: lam }));
                        }
                    }
                }
                Ok(None)
            }
            Application::Mixed(a) => {
                let aug = a.mixed.with_undirected(h)?;
                let r = Subset::singleton(a.root);
                for v in (aug.vertices().members() - r).iter() {
                    let sv = Subset::singleton(v);
                    let out = aug.arc_connectivity(a.root, v)?;
                    if out < a.k {
                        return Ok(Some(Shortfall { graph: 0, from: r, to: sv, required: a.k, actual: out }));
                    }
                    let back = aug.arc_connectivity(v, a.root)?;
                    if back < a.l {
                        return Ok(Some(Shortfall { graph: 0, from: sv, to: r, required: a.l, actual: back }));
                    }
                }
                Ok(None)
            }
        }
    }
}

/// `max{r(u,v) - λ(u,v)}` over the target pairs, 0 if none.
pub fn max_gap(g: &WeightedHypergraph, r: &PairTargets) -> Result<i64> {
    let mut best = 0;
    for &(u, v, t) in r {
        best = best.max(t - g.min_cut(u, v)?);
    }
    Ok(best)
}

pub fn solve_application(app: &Application, mode: SolveMode, opts: &UniformOptions) -> Result<ApplicationSolution> {
    let (target, m, slack) = app.reduce()?;
    let p = target.p()?;
    let (hypergraph, trace) = solve_strong_cover(&target, &m, mode, opts)?;
    let shortfall = app.shortfall(&hypergraph)?;
    if let Some(s) = &shortfall {
        return Err(Error::Hypothesis(format!("augmented graph misses a requirement: {s:?}")));
    }
    let report = ApplicationReport { k: p.max_value(), degree_total: m.total(), slack, shortfall };
    Ok(ApplicationSolution { hypergraph, degrees: m, trace, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Certificate;

    fn all_pairs(n: usize, t: i64) -> PairTargets {
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, t))).collect()
    }

    #[test]
    fn local_empty_graph() {
        let g = GroundSet::indexed(3).unwrap();
        let h = WeightedHypergraph::new(g.clone());
        let p = build_p_local(&h, &all_pairs(3, 1)).unwrap();
        let v = g.members();
        assert!(g.subsets().all(|x| p.value(x) == (!x.is_empty() && x != v) as i64));
        let m = DegreeVector::constant(g, 1).unwrap();
        let (sol, _) = solve_strong_cover(&StrongTarget::Single(p), &m, SolveMode::Basic, &Default::default()).unwrap();
        assert_eq!(sol.edges().collect::<Vec<_>>(), vec![(v, 1)]);
    }

    #[test]
    fn flat_requirement_values() {
        let g = GroundSet::indexed(5).unwrap();
        let p = build_p_local(&WeightedHypergraph::new(g.clone()), &all_pairs(5, 15)).unwrap();
        let v = g.members();
        assert!(g.subsets().all(|x| p.value(x) == if x.is_empty() || x == v { 0 } else { 15 }));
        assert!(p.is_symmetric() && p.is_skew_supermodular());
    }

    #[test]
    fn flat_degree_spec_distinguished() {
        let g = GroundSet::indexed(5).unwrap();
        let graph = WeightedHypergraph::new(g.clone());
        let over = Application::Local(LocalCA {
            graph: graph.clone(),
            targets: all_pairs(5, 15),
            m: Some(DegreeVector::constant(g.clone(), 16).unwrap()),
        });
        let err = solve_application(&over, SolveMode::Basic, &Default::default()).unwrap_err();
        assert_eq!(err, Error::Infeasible(Certificate::DegreeAboveMax { vertex: 0, degree: 16, max_value: 15 }));
        let ok = Application::Local(LocalCA {
            graph,
            targets: all_pairs(5, 15),
            m: Some(DegreeVector::constant(g, 15).unwrap()),
        });
        let sol = solve_application(&ok, SolveMode::Basic, &Default::default()).unwrap();
        assert_eq!(sol.hypergraph.total_weight(), 15);
    }

    #[test]
    fn node_to_area_singletons_match_pairs() {
        let g = GroundSet::indexed(4).unwrap();
        let mut graph = WeightedHypergraph::new(g.clone());
        graph.add_edge(Subset::from_bits(0b0011), 1).unwrap();
        let areas = vec![(Subset::singleton(2), 3)];
        let pairs = vec![(0, 2, 3), (1, 2, 3), (3, 2, 3)];
        let empty = WeightedHypergraph::new(g.clone());
        let a = build_p_node_to_area(&empty, &areas).unwrap();
        let b = build_p_local(&empty, &pairs).unwrap();
        assert!(g.subsets().all(|x| a.value(x) == b.value(x)));
        let p = build_p_node_to_area(&graph, &areas).unwrap();
        assert_eq!(p.value(g.members()), 0);
        assert_eq!(p.value(Subset::EMPTY), 0);
    }

    #[test]
    fn mixed_empty_graph() {
        let g = GroundSet::indexed(3).unwrap();
        let mixed = MixedHypergraph::new(g.clone());
        let p = build_p_mixed(&mixed, 0, 2, 2).unwrap();
        let v = g.members();
        assert!(g.subsets().all(|x| p.value(x) == if x.is_empty() || x == v { 0 } else { 2 }));
    }

    #[test]
    fn mixed_star_into_root() {
        // Arcs 1→0 and 2→0; root 0, k = ℓ = 1.
        let g = GroundSet::indexed(3).unwrap();
        let mut mixed = MixedHypergraph::new(g.clone());
        mixed.add_arc(Subset::singleton(1), Subset::singleton(0), Subset::EMPTY, 1).unwrap();
        mixed.add_arc(Subset::singleton(2), Subset::singleton(0), Subset::EMPTY, 1).unwrap();
        let p = build_p_mixed(&mixed, 0, 1, 1).unwrap();
        let s = |b| Subset::from_bits(b);
        // Sets without the root receive nothing.
        assert_eq!(p.value(s(0b010)), 1);
        assert_eq!(p.value(s(0b110)), 1);
        // {0} receives both arcs, {0,1} receives the arc from 2.
        assert_eq!(p.value(s(0b001)), -1);
        assert_eq!(p.value(s(0b011)), 0);
        let app = Application::Mixed(MixedCA { mixed, root: 0, k: 1, l: 1, m: DegreeVector::constant(g, 5).unwrap() });
        let sol = solve_application(&app, SolveMode::Basic, &Default::default()).unwrap();
        assert_eq!(sol.report.shortfall, None);
        assert_eq!(sol.report.slack, Some(12));
    }

    #[test]
    fn min_degree_vector_zero() {
        let g = GroundSet::indexed(3).unwrap();
        let m = min_degree_vector(&SetFunction::zero(g)).unwrap();
        assert_eq!(m.total(), 0);
    }

    #[test]
    fn gap_mismatch_rejected() {
        let g = GroundSet::indexed(3).unwrap();
        let e = WeightedHypergraph::new(g.clone());
        let app = Application::Simul(SimulCA {
            first: (e.clone(), all_pairs(3, 1)),
            second: (e, all_pairs(3, 2)),
            m: None,
        });
        assert_eq!(app.reduce().unwrap_err(), Error::GapMismatch { first: 1, second: 2 });
    }
}
