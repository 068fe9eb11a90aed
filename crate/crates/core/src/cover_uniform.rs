//! Near-uniform weak cover of a skew-supermodular function, or of the
//! maximum of two, by extreme points of `Q(p, m)`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::cover_basic::{feasibility_certificate, min_bound, preprocess};
use crate::error::{Error, Result};
use crate::hypergraph::WeightedHypergraph;
use crate::oracles::{alpha4, max_oracle_int, minimal_maximizers, Alpha4Mode};
use crate::qpolytope::{indicator, is_member, q_optimize, FixingPolicy, QInstance};
use crate::sets::{configured_cap, Bound, DegreeVector, SetFunction, Subset};
use crate::verify::crossing_pair;
use crate::trace::{attained, replay, Algorithm, CallInput, CoverTrace, Step, UniformTrace};

#[derive(Clone, Debug)]
pub enum UniformSpec {
    Single(SetFunction),
    /// Cover `max{q, r}`.
    Pair(SetFunction, SetFunction),
}

impl UniformSpec {
    pub fn functions(&self) -> Vec<SetFunction> {
        match self {
            UniformSpec::Single(p) => vec![p.clone()],
            UniformSpec::Pair(q, r) => vec![q.clone(), r.clone()],
        }
    }

    /// The covered function, tabulated.
    pub fn p(&self) -> Result<SetFunction> {
        match self {
            UniformSpec::Single(p) => p.tabulate(),
            UniformSpec::Pair(q, r) => q.max(r)?.tabulate(),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            UniformSpec::Single(_) => Algorithm::Uniform,
            UniformSpec::Pair(..) => Algorithm::UniformPair,
        }
    }
}

#[derive(Clone, Debug)]
pub struct UniformCoverInstance {
    pub spec: UniformSpec,
    pub m: DegreeVector,
    /// `J`, the objective of the first LP; empty at top level.
    pub seed: Subset,
}

impl UniformCoverInstance {
    pub fn new(spec: UniformSpec, m: DegreeVector) -> Result<Self> {
        for f in spec.functions() {
            if f.ground() != m.ground() {
                return Err(Error::GroundMismatch);
            }
        }
        m.ground().check_cap(configured_cap())?;
        Ok(UniformCoverInstance { spec, m, seed: Subset::EMPTY })
    }

    pub fn single(p: SetFunction, m: DegreeVector) -> Result<Self> {
        Self::new(UniformSpec::Single(p), m)
    }

    pub fn pair(q: SetFunction, r: SetFunction, m: DegreeVector) -> Result<Self> {
        Self::new(UniformSpec::Pair(q, r), m)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformOptions {
    pub alpha4: Alpha4Mode,
    pub fixing: FixingPolicy,
    /// Recompute the analysis families after the run.
    pub diagnostics: bool,
}

#[derive(Clone, Debug)]
pub struct UniformSolution {
    pub hypergraph: WeightedHypergraph,
    pub trace: UniformTrace,
    pub diagnostics: Option<DiagnosticsReport>,
}

/// `m(V) mod K` when `|A|` is the rounded-up ratio, `K - (m(V) mod K)` when it
/// is the rounded-down one, `+∞` otherwise or when `K | m(V)`.
pub fn compute_alpha5(m_total: i64, k: i64, a_size: i64) -> Bound {
    assert!(k > 0, "α⁽⁵⁾ needs K > 0");
    let rem = m_total.mod_floor(&k);
    if rem == 0 {
        return Bound::Infinite;
    }
    let lo = Integer::div_floor(&m_total, &k);
    if a_size == lo + 1 {
        Bound::Finite(rem)
    } else if a_size == lo {
        Bound::Finite(k - rem)
    } else {
        Bound::Infinite
    }
}

pub fn weak_cover_uniform(inst: &UniformCoverInstance) -> Result<(WeightedHypergraph, UniformTrace)> {
    let sol = weak_cover_uniform_with(inst, &UniformOptions::default())?;
    Ok((sol.hypergraph, sol.trace))
}

pub fn weak_cover_uniform_with(inst: &UniformCoverInstance, opts: &UniformOptions) -> Result<UniformSolution> {
    let ground = inst.m.ground().clone();
    ground.check_cap(configured_cap())?;
    let p0 = inst.spec.p()?;
    if let Some(cert) = feasibility_certificate(&p0, &inst.m)? {
        return Err(Error::Infeasible(cert));
    }
    let mut calls = 2;
    let mut lp_total = 0;
    let mut funcs = Vec::new();
    let mut m = inst.m.clone();
    let mut z0 = Subset::EMPTY;
    for f in inst.spec.functions() {
        let (z, f, mm) = preprocess(&f, &inst.m)?;
        z0 = z;
        m = mm;
        funcs.push(f);
    }
    let mut state = CallInput { functions: funcs, m };
    let mut j = inst.seed - z0;
    let mut h = WeightedHypergraph::new(ground.clone());
    let mut steps = Vec::new();
    while !state.ground().is_empty() {
        let p = state.p()?;
        let m = &state.m;
        let v = p.ground().members();
        let k = p.max_value();
        if k <= 0 {
            return Err(Error::Hypothesis(format!("K = {k} with {} vertices left", v.len())));
        }
        let q_inst = QInstance::new(&p, m)?;
        let sol = q_optimize(&q_inst, &indicator(ground.universe_size(), j), opts.fixing)?;
        let a = sol.support;
        if a.is_empty() {
            return Err(Error::Hypothesis("Q(p, m) returned the empty hyperedge".into()));
        }
        let a1 = min_bound(a.iter().map(|u| m.get(u)));
        let a2 = Bound::Finite(k - max_oracle_int(&p, Subset::EMPTY, a, &[])?.value);
        let a3 = min_bound((v - a).iter().map(|u| k - m.get(u)));
        let a4 = alpha4(&p, m.as_slice(), a, opts.alpha4)?;
        let a5 = compute_alpha5(m.total(), k, a.len() as i64);
        let alphas = vec![a1, a2, a3, a4, a5];
        let alpha = match alphas.iter().min().copied() {
            Some(Bound::Finite(x)) if x >= 1 => x,
            other => return Err(Error::Hypothesis(format!("step size {other:?} is not a positive integer"))),
        };
        let z = Subset::from_indices(a.iter().filter(|&u| m.get(u) == alpha));
        let step_calls = 1 + a.len() * a.len().saturating_sub(1) / 2;
        calls += step_calls;
        lp_total += sol.lp_solves;
        steps.push(Step {
            depth: steps.len() + 1,
            ground: v,
            k,
            degrees: m.as_slice().to_vec(),
            m_total: m.total(),
            seed: Some(j),
            tight_degree: Subset::from_indices(v.iter().filter(|&u| m.get(u) == k)),
            maximizers: Vec::new(),
            transversal: None,
            hyperedge: a,
            attained: attained(&alphas, alpha),
            alphas,
            alpha,
            contracted: z,
            oracle_calls: step_calls,
            lp_solves: sol.lp_solves,
        });
        h.add_edge(a, alpha)?;
        state = CallInput {
            functions: state
                .functions
                .iter()
                .map(|f| crate::cover_basic::next_function(f, a, alpha, z))
                .collect::<Result<_>>()?,
            m: state.m.decrease(a, alpha)?.remove(z),
        };
        j = a - z;
    }
    let depth = steps.len() + 1;
    let trace = CoverTrace {
        algorithm: inst.spec.algorithm(),
        ground: ground.members(),
        preprocessed: z0,
        k: p0.max_value(),
        steps,
        depth,
        oracle_calls: calls,
        lp_solves: lp_total,
    };
    let diagnostics = if opts.diagnostics { Some(trace_diagnostics(inst, &trace)?) } else { None };
    Ok(UniformSolution { hypergraph: h, trace, diagnostics })
}

// ---------------------------------------------------------------------------
// Diagnostics

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub depth: usize,
    pub property: String,
    /// Offending sets (pairs are two-element sets).
    pub witness: Vec<Subset>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallDiagnostics {
    pub depth: usize,
    /// Inclusion-maximal tight sets of the call's `(p, m)`.
    pub tight: Vec<Subset>,
    /// Cumulative projected maximal tight sets up to this call.
    pub cumulative_tight: Vec<Subset>,
    /// `α = α⁽⁴⁾` strictly below the other candidates and `K'' > 0`.
    pub alpha4_only: bool,
    /// Set `W` certifying the slack drop on `A ∩ W`, when `alpha4_only`.
    pub alpha4_witness: Option<Subset>,
    /// Which of the three good-hyperedge conclusions held (1, 2 or 3).
    pub good_case: Option<u8>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub calls: Vec<CallDiagnostics>,
    pub violations: Vec<Finding>,
}

impl DiagnosticsReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `m(X) - p(X)` for every subset of the ground set, by bitmask.
fn slack_table(p: &SetFunction, m: &DegreeVector) -> Vec<(Subset, i64)> {
    p.ground().subsets().map(|x| (x, m.sum(x) - p.value(x))).collect()
}

/// Inclusion-maximal sets with `m(X) = p(X)`, sorted.
pub fn maximal_tight_sets(p: &SetFunction, m: &DegreeVector) -> Vec<Subset> {
    let tight: Vec<Subset> =
        slack_table(p, m).into_iter().filter(|&(_, s)| s == 0).map(|(x, _)| x).collect();
    let mut out: Vec<Subset> = tight
        .iter()
        .copied()
        .filter(|&x| !tight.iter().any(|&y| y != x && x.is_subset_of(y)))
        .collect();
    out.sort();
    out
}

/// `γ(uv) = min{m(Z) - p(Z) : u, v ∈ Z}` for every pair of the ground set.
pub fn pairwise_slack(p: &SetFunction, m: &DegreeVector) -> Vec<(Subset, i64)> {
    let table = slack_table(p, m);
    let v: Vec<usize> = p.ground().members().iter().collect();
    let mut out = Vec::new();
    for (i, &a) in v.iter().enumerate() {
        for &b in &v[i + 1..] {
            let uv = Subset::singleton(a).with(b);
            let g = table.iter().filter(|(z, _)| uv.is_subset_of(*z)).map(|&(_, s)| s).min();
            out.push((uv, g.expect("the ground set contains every pair")));
        }
    }
    out
}

fn is_one_good(p: &SetFunction, m: &DegreeVector, a: Subset, tight: &[Subset]) -> Result<bool> {
    let inst = QInstance::new(p, m)?;
    if !is_member(&inst, &indicator(p.ground().universe_size(), a))? {
        return Ok(false);
    }
    Ok(p.ground().subsets().any(|w| {
        (a & w).len() as i64 == m.sum(w) - p.value(w) + 1 && !tight.iter().any(|&y| w.is_subset_of(y))
    }))
}

/// Recomputes the analysis families of a uniform run and lists every
/// violated invariant.
pub fn trace_diagnostics(inst: &UniformCoverInstance, trace: &UniformTrace) -> Result<DiagnosticsReport> {
    let mut report = DiagnosticsReport::default();
    if trace.steps.is_empty() {
        return Ok(report);
    }
    let single = matches!(inst.spec, UniformSpec::Single(_));
    let inputs = replay(&inst.spec.functions(), &inst.m, trace)?;
    let ps = inputs.iter().map(CallInput::p).collect::<Result<Vec<_>>>()?;
    let mut fail = |depth: usize, property: &str, witness: Vec<Subset>| {
        report.violations.push(Finding { depth, property: property.into(), witness });
    };
    let mut calls = Vec::new();
    let mut cumulative: Vec<Subset> = Vec::new();
    for (i, step) in trace.steps.iter().enumerate() {
        let (p, m) = (&ps[i], &inputs[i].m);
        let (pn, mn) = (&ps[i + 1], &inputs[i + 1].m);
        let v = step.ground;
        let a = step.hyperedge;
        let k_next = pn.max_value().max(0);
        let k_next = if mn.ground().is_empty() { 0 } else { k_next };
        let tight = maximal_tight_sets(p, m);
        let mut next_cum: Vec<Subset> =
            cumulative.iter().map(|&x| x & v).filter(|x| !x.is_empty()).collect();
        next_cum.extend(tight.iter().copied().filter(|x| !x.is_empty()));
        next_cum.sort();
        next_cum.dedup();
        cumulative = next_cum;
        if single {
            if let Some((x, y)) = crossing_pair(&cumulative) {
                fail(step.depth, "cumulative projected tight family is laminar", vec![x, y]);
            }
        }
        if step.attains(1) && step.contracted.is_empty() {
            fail(step.depth, "α = α⁽¹⁾ contracts a vertex", vec![a]);
        }
        if step.contracted.is_empty() && k_next > 0 {
            let q_next = QInstance::new(pn, mn)?;
            if is_member(&q_next, &indicator(mn.ground().universe_size(), a))? {
                fail(step.depth, "χ_A leaves Q(p'', m'') when nothing is contracted", vec![a]);
            }
        }
        if k_next > 0 {
            let k = step.k;
            let before = (Integer::div_floor(&m.total(), &k), Integer::div_ceil(&m.total(), &k));
            let (total, kn) = (mn.total(), k_next);
            if step.attains(5) {
                if total % kn != 0 || total / kn == a.len() as i64 {
                    fail(step.depth, "after α = α⁽⁵⁾, m''(V'')/K'' is an integer other than |A|", vec![a]);
                }
            } else {
                let after = (Integer::div_floor(&total, &kn), Integer::div_ceil(&total, &kn));
                if after != before {
                    fail(step.depth, "rounded m(V)/K preserved while α < α⁽⁵⁾", vec![a]);
                }
            }
        }
        // Pairwise slack never increases, and drops on pairs inside A.
        let gamma = pairwise_slack(p, m);
        let gamma_next = pairwise_slack(pn, mn);
        let lookup = |g: &[(Subset, i64)], uv: Subset| g.iter().find(|(x, _)| *x == uv).map(|&(_, s)| s);
        for &(uv, g2) in &gamma_next {
            let g1 = lookup(&gamma, uv).expect("pairs of V'' are pairs of V");
            if g2 > g1 {
                fail(step.depth, "pairwise slack does not increase", vec![uv]);
            } else if uv.is_subset_of(a) && g2 >= g1 {
                fail(step.depth, "pairwise slack drops inside A", vec![uv]);
            }
        }
        let alpha4_only = step.attains_only(4) && k_next > 0;
        let mut witness = None;
        let mut good_case = None;
        if alpha4_only {
            if !step.contracted.is_empty() {
                fail(step.depth, "α = α⁽⁴⁾ < α⁽¹⁾ contracts nothing", vec![step.contracted]);
            }
            witness = p.ground().subsets().find(|&w| {
                let aw = a & w;
                let s = aw.len() as i64;
                if s < 2 || Integer::div_floor(&(m.sum(w) - p.value(w)), &(s - 1)) != step.alpha {
                    return false;
                }
                if !w.is_subset_of(mn.ground().members()) || mn.sum(w) - pn.value(w) >= s - 1 {
                    return false;
                }
                let pairs = gamma.iter().filter(|(uv, _)| uv.is_subset_of(aw));
                pairs.into_iter().all(|&(uv, g1)| lookup(&gamma_next, uv).is_some_and(|g2| g2 < g1.min(s - 1)))
            });
            if witness.is_none() {
                fail(step.depth, "an α⁽⁴⁾-minimizer drops the slack of every pair it holds in A", vec![a]);
            }
            if single {
                let fam = minimal_maximizers(p)?.sets;
                let fam_next = minimal_maximizers(pn)?.sets;
                let tight_next = maximal_tight_sets(pn, mn);
                good_case = if fam_next.iter().any(|x| !fam.contains(x)) {
                    Some(1)
                } else if tight_next.iter().any(|x| !tight.contains(x)) {
                    Some(2)
                } else {
                    match trace.steps.get(i + 1) {
                        Some(next) if is_one_good(pn, mn, next.hyperedge, &tight_next)? => Some(3),
                        _ => None,
                    }
                };
                if good_case.is_none() {
                    fail(step.depth, "after α = α⁽⁴⁾ the families change or the next hyperedge is 1-good", vec![a]);
                }
            }
        }
        calls.push(CallDiagnostics {
            depth: step.depth,
            tight,
            cumulative_tight: cumulative.clone(),
            alpha4_only,
            alpha4_witness: witness,
            good_case,
        });
    }
    report.calls = calls;
    Ok(report)
}

/// Number of steps with `α = α⁽⁵⁾`.
pub fn alpha5_calls(trace: &UniformTrace) -> usize {
    trace.steps.iter().filter(|s| s.attains(5)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::GroundSet;

    fn flat(n: usize) -> UniformCoverInstance {
        let g = GroundSet::indexed(n).unwrap();
        let v = g.members();
        let hi = (1i64 << n) - n as i64 - 1;
        let mid = (1i64 << (n - 1)) - 1;
        let p = SetFunction::from_fn(g.clone(), |x| if x.is_empty() { 0 } else if x == v { hi } else { mid }).unwrap();
        UniformCoverInstance::single(p, DegreeVector::constant(g, mid).unwrap()).unwrap()
    }

    #[test]
    fn alpha5_formula() {
        assert_eq!(compute_alpha5(75, 26, 3), Bound::Finite(23));
        assert_eq!(compute_alpha5(75, 26, 2), Bound::Finite(3));
        assert_eq!(compute_alpha5(78, 26, 3), Bound::Infinite);
        assert_eq!(compute_alpha5(75, 26, 4), Bound::Infinite);
    }

    #[test]
    fn flat_sizes() {
        let inst = flat(5);
        let opts = UniformOptions { diagnostics: true, ..Default::default() };
        let sol = weak_cover_uniform_with(&inst, &opts).unwrap();
        let h = &sol.hypergraph;
        assert_eq!(h.total_weight(), 26);
        assert!(h.degrees().iter().all(|&d| d == 15));
        assert!(h.edge_sizes().iter().all(|s| (2..=3).contains(s)));
        assert!(h.edge_count() <= 55);
        assert!(alpha5_calls(&sol.trace) <= 1);
        let report = sol.diagnostics.unwrap();
        assert!(report.ok(), "{:?}", report.violations);
    }

    #[test]
    fn integral_ratio_forces_full_edge() {
        let g = GroundSet::indexed(4).unwrap();
        let v = g.members();
        let p = SetFunction::from_fn(g.clone(), move |x| 2 * (!x.is_empty() && x != v) as i64).unwrap();
        let inst = UniformCoverInstance::single(p, DegreeVector::constant(g, 2).unwrap()).unwrap();
        let (h, _) = weak_cover_uniform(&inst).unwrap();
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(v, 2)]);
    }

    #[test]
    fn empty_trace_empty_report() {
        let g = GroundSet::indexed(2).unwrap();
        let inst = UniformCoverInstance::single(SetFunction::zero(g.clone()), DegreeVector::constant(g, 0).unwrap())
            .unwrap();
        let (h, trace) = weak_cover_uniform(&inst).unwrap();
        assert!(h.is_empty());
        assert_eq!(trace_diagnostics(&inst, &trace).unwrap(), DiagnosticsReport::default());
    }
}
