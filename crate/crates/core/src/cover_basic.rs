//! Weak cover of a skew-supermodular function with at most `4|V| - 1`
//! hyperedges.

use crate::error::{Certificate, Error, Result};
use crate::hypergraph::WeightedHypergraph;
use crate::oracles::{max_oracle_int, minimal_maximizers, minimal_transversal};
use crate::sets::{configured_cap, Bound, DegreeVector, SetFunction, Subset};
use crate::trace::{attained, Algorithm, CoverTrace, Step};

/// `(p, m)` with `p` and `m` on the same ground set.
#[derive(Clone, Debug)]
pub struct CoverInstance {
    pub p: SetFunction,
    pub m: DegreeVector,
}

impl CoverInstance {
    pub fn new(p: SetFunction, m: DegreeVector) -> Result<Self> {
        if p.ground() != m.ground() {
            return Err(Error::GroundMismatch);
        }
        p.ground().check_cap(configured_cap())?;
        Ok(CoverInstance { p, m })
    }
}

/// A violated hypothesis, found with two oracle calls: `max p(X) - m(X)`
/// and `K_p`.
pub fn feasibility_certificate(p: &SetFunction, m: &DegreeVector) -> Result<Option<Certificate>> {
    if p.ground() != m.ground() {
        return Err(Error::GroundMismatch);
    }
    let neg: Vec<i64> = m.as_slice().iter().map(|v| -v).collect();
    let worst = max_oracle_int(p, Subset::EMPTY, Subset::EMPTY, &neg)?;
    if worst.value > m.sum(worst.set) {
        return Ok(Some(Certificate::Uncovered { set: worst.set, requirement: worst.value, degree: m.sum(worst.set) }));
    }
    let k = max_oracle_int(p, Subset::EMPTY, Subset::EMPTY, &[])?.value;
    if let Some(u) = p.ground().members().iter().find(|&u| m.get(u) > k) {
        return Ok(Some(Certificate::DegreeAboveMax { vertex: u, degree: m.get(u), max_value: k }));
    }
    Ok(None)
}

pub fn check_feasibility(inst: &CoverInstance) -> bool {
    matches!(feasibility_certificate(&inst.p, &inst.m), Ok(None))
}

/// `p - α·[X ∩ A ≠ ∅]`, then contracted by `z`, tabulated.
pub(crate) fn next_function(p: &SetFunction, a: Subset, alpha: i64, z: Subset) -> Result<SetFunction> {
    let h = WeightedHypergraph::from_edges(p.ground().universe(), [(a, alpha)])?;
    p.minus_coverage(&h)?.contract_tabulated(z)
}

pub(crate) fn min_bound(vals: impl IntoIterator<Item = i64>) -> Bound {
    vals.into_iter().min().map_or(Bound::Infinite, Bound::Finite)
}

pub(crate) fn preprocess(p: &SetFunction, m: &DegreeVector) -> Result<(Subset, SetFunction, DegreeVector)> {
    let z0 = p.ground().members() - m.support();
    Ok((z0, p.contract_tabulated(z0)?, m.remove(z0)))
}

pub fn weak_cover_basic(inst: &CoverInstance) -> Result<(WeightedHypergraph, CoverTrace)> {
    let ground = inst.p.ground().clone();
    ground.check_cap(configured_cap())?;
    if let Some(cert) = feasibility_certificate(&inst.p, &inst.m)? {
        return Err(Error::Infeasible(cert));
    }
    let mut calls = 2;
    let k0 = inst.p.max_value();
    let (z0, mut p, mut m) = preprocess(&inst.p, &inst.m)?;
    let mut h = WeightedHypergraph::new(ground.clone());
    let mut steps = Vec::new();
    while !p.ground().is_empty() {
        let v = p.ground().members();
        let k = p.max_value();
        if k <= 0 {
            return Err(Error::Hypothesis(format!("K = {k} with {} vertices left", v.len())));
        }
        let fam = minimal_maximizers(&p)?;
        let t = minimal_transversal(&fam.sets)?;
        let d = Subset::from_indices(v.iter().filter(|&u| m.get(u) == k));
        let a = t | d;
        let a1 = min_bound(a.iter().map(|u| m.get(u)));
        let outside = max_oracle_int(&p, Subset::EMPTY, a, &[])?;
        let a2 = Bound::Finite(k - outside.value);
        let a3 = min_bound((v - a).iter().map(|u| k - m.get(u)));
        let alphas = vec![a1, a2, a3];
        let alpha = match alphas.iter().min().copied() {
            Some(Bound::Finite(x)) if x >= 1 => x,
            other => return Err(Error::Hypothesis(format!("step size {other:?} is not a positive integer"))),
        };
        let z = Subset::from_indices(a.iter().filter(|&u| m.get(u) == alpha));
        let step_calls = fam.queries + 2;
        calls += step_calls;
        steps.push(Step {
            depth: steps.len() + 1,
            ground: v,
            k,
            degrees: m.as_slice().to_vec(),
            m_total: m.total(),
            seed: None,
            tight_degree: d,
            maximizers: fam.sets,
            transversal: Some(t),
            hyperedge: a,
            attained: attained(&alphas, alpha),
            alphas,
            alpha,
            contracted: z,
            oracle_calls: step_calls,
            lp_solves: 0,
        });
        h.add_edge(a, alpha)?;
        p = next_function(&p, a, alpha, z)?;
        m = m.decrease(a, alpha)?.remove(z);
    }
    let depth = steps.len() + 1;
    let trace = CoverTrace {
        algorithm: Algorithm::Basic,
        ground: ground.members(),
        preprocessed: z0,
        k: k0,
        steps,
        depth,
        oracle_calls: calls,
        lp_solves: 0,
    };
    Ok((h, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::GroundSet;

    fn flat(n: usize) -> CoverInstance {
        let g = GroundSet::indexed(n).unwrap();
        let v = g.members();
        let hi = (1i64 << n) - n as i64 - 1;
        let mid = (1i64 << (n - 1)) - 1;
        let p = SetFunction::from_fn(g.clone(), |x| if x.is_empty() { 0 } else if x == v { hi } else { mid }).unwrap();
        CoverInstance::new(p, DegreeVector::constant(g, mid).unwrap()).unwrap()
    }

    #[test]
    fn flat_instance() {
        let inst = flat(5);
        assert!(check_feasibility(&inst));
        let (h, trace) = weak_cover_basic(&inst).unwrap();
        assert_eq!(h.total_weight(), 26);
        assert!(h.degrees().iter().all(|&d| d == 15));
        assert!(h.edge_count() <= 19);
        for x in inst.p.ground().subsets() {
            assert!(h.coverage(x) >= inst.p.value(x));
        }
        assert!(trace.depth <= 19);
        assert_eq!(trace.steps.iter().map(|s| s.alpha).sum::<i64>(), 26);
    }

    #[test]
    fn three_edge_solution_is_feasible() {
        let inst = flat(5);
        let g = inst.p.ground().clone();
        let u = Subset::singleton(0);
        let h = WeightedHypergraph::from_edges(g.clone(), [(u, 11), (g.members() - u, 11), (g.members(), 4)]).unwrap();
        assert_eq!(h.total_weight(), 26);
        assert!(h.degrees().iter().all(|&d| d == 15));
        assert!(g.subsets().all(|x| h.coverage(x) >= inst.p.value(x)));
    }

    #[test]
    fn zero_degrees() {
        let g = GroundSet::indexed(3).unwrap();
        let p = SetFunction::zero(g.clone());
        let inst = CoverInstance::new(p, DegreeVector::constant(g.clone(), 0).unwrap()).unwrap();
        let (h, trace) = weak_cover_basic(&inst).unwrap();
        assert!(h.is_empty());
        assert_eq!(trace.depth, 1);
        let v = g.members();
        let p = SetFunction::from_fn(g.clone(), move |x| (!x.is_empty() && x != v) as i64).unwrap();
        let inst = CoverInstance::new(p, DegreeVector::constant(g, 0).unwrap()).unwrap();
        assert!(!check_feasibility(&inst));
        assert!(matches!(weak_cover_basic(&inst), Err(Error::Infeasible(Certificate::Uncovered { .. }))));
    }

    #[test]
    fn forced_single_edge() {
        let g = GroundSet::indexed(3).unwrap();
        let v = g.members();
        let p = SetFunction::from_fn(g.clone(), move |x| (!x.is_empty() && x != v) as i64).unwrap();
        let inst = CoverInstance::new(p, DegreeVector::constant(g.clone(), 1).unwrap()).unwrap();
        let (h, _) = weak_cover_basic(&inst).unwrap();
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(v, 1)]);
    }

    #[test]
    fn degree_above_max() {
        let g = GroundSet::indexed(3).unwrap();
        let v = g.members();
        let p = SetFunction::from_fn(g.clone(), move |x| 2 * (!x.is_empty() && x != v) as i64).unwrap();
        let inst = CoverInstance::new(p, DegreeVector::new(g, &[3, 2, 2]).unwrap()).unwrap();
        assert_eq!(
            weak_cover_basic(&inst).unwrap_err(),
            Error::Infeasible(Certificate::DegreeAboveMax { vertex: 0, degree: 3, max_value: 2 })
        );
    }
}
