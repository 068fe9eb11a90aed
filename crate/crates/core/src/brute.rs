//! Reference implementations by plain enumeration, kept independent of the
//! oracle, LP and cover code so they can check it.

use num_rational::Ratio;

use crate::hypergraph::WeightedHypergraph;
use crate::sets::{SetFunction, Subset, NEG_INF};

pub type Frac = Ratio<i128>;

fn frac(v: i64) -> Frac {
    Frac::from_integer(v as i128)
}

fn subsets_of(v: Subset) -> Vec<Subset> {
    (0..=v.bits()).map(Subset::from_bits).filter(|x| x.is_subset_of(v)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Term {
    None,
    Cut,
    Coverage,
}

/// `(argmax, max)` of `p(Z) - g(Z) + y(Z)` over `S0 ⊆ Z ⊆ V - T0`; ties go
/// to the smallest bitmask. `y` is universe-indexed or empty.
pub fn max_query(
    p: &SetFunction,
    graph: Option<&WeightedHypergraph>,
    term: Term,
    s0: Subset,
    t0: Subset,
    y: &[Frac],
) -> Option<(Subset, Frac)> {
    let mut best: Option<(Subset, Frac)> = None;
    for z in subsets_of(p.ground().members()) {
        if !s0.is_subset_of(z) || z.intersects(t0) {
            continue;
        }
        let v = p.value(z);
        if v == NEG_INF {
            continue;
        }
        let g = match (graph, term) {
            (Some(h), Term::Cut) => h.cut(z),
            (Some(h), Term::Coverage) => h.coverage(z),
            _ => 0,
        };
        let mut obj = frac(v - g);
        if !y.is_empty() {
            for u in z.iter() {
                obj += y[u];
            }
        }
        if best.as_ref().is_none_or(|(_, b)| obj > *b) {
            best = Some((z, obj));
        }
    }
    best
}

/// Inclusion-minimal sets attaining `max p`.
pub fn minimal_maximizers(p: &SetFunction) -> Vec<Subset> {
    let all = subsets_of(p.ground().members());
    let k = all.iter().map(|&x| p.value(x)).max().unwrap_or(NEG_INF);
    let maxs: Vec<Subset> = all.into_iter().filter(|&x| p.value(x) == k).collect();
    maxs.iter().copied().filter(|&x| !maxs.iter().any(|&y| y != x && y.is_subset_of(x))).collect()
}

/// `min ⌊(m(X) - p(X)) / (|A∩X| - 1)⌋` over `|A∩X| ≥ 2`.
pub fn alpha4(p: &SetFunction, m: &[i64], a: Subset) -> Option<i64> {
    subsets_of(p.ground().members())
        .into_iter()
        .filter(|x| (a & *x).len() >= 2)
        .map(|x| {
            let num: i64 = x.iter().map(|u| m[u]).sum::<i64>() - p.value(x);
            let den = (a & x).len() as i64 - 1;
            (frac(num) / frac(den)).floor().to_integer() as i64
        })
        .min()
}

/// `max f(X)/g(X)` over all subsets.
pub fn max_ratio(f: &SetFunction, g: &SetFunction) -> Frac {
    subsets_of(f.ground().members())
        .into_iter()
        .map(|x| frac(f.value(x)) / frac(g.value(x)))
        .max()
        .expect("at least the empty set")
}

/// Pairs `(X, Y)` where both skew-supermodular inequalities fail, over all
/// pairs (not only crossing ones).
pub fn skew_violation(p: &SetFunction) -> Option<(Subset, Subset)> {
    let all = subsets_of(p.ground().members());
    for &x in &all {
        for &y in &all {
            let (a, b) = (p.value(x) as i128, p.value(y) as i128);
            let sup = a + b <= p.value(x & y) as i128 + p.value(x | y) as i128;
            let neg = a + b <= p.value(x - y) as i128 + p.value(y - x) as i128;
            if !sup && !neg {
                return Some((x, y));
            }
        }
    }
    None
}

/// Every constraint of `Q(p, m)` at `x` (universe-indexed), enumerated
/// directly from the definition.
pub fn q_member(p: &SetFunction, m: &[i64], x: &[Frac]) -> bool {
    let v = p.ground().members();
    let all = subsets_of(v);
    let k = all.iter().map(|&z| p.value(z)).max().unwrap_or(0);
    let mv: i64 = v.iter().map(|u| m[u]).sum();
    let sum = |z: Subset| z.iter().fold(Frac::from_integer(0), |s, u| s + x[u]);
    for u in v.iter() {
        if x[u] < frac(0) || x[u] > frac(m[u].min(1)) {
            return false;
        }
        if m[u] == k && x[u] != frac(1) {
            return false;
        }
    }
    for &z in &all {
        let s = sum(z);
        if p.value(z) == k && s < frac(1) {
            return false;
        }
        let mz: i64 = z.iter().map(|u| m[u]).sum();
        if s > frac(mz - p.value(z) + 1) {
            return false;
        }
    }
    let total = sum(v);
    let ratio = frac(mv) / frac(k);
    total >= ratio.floor() && total <= ratio.ceil()
}

/// Best 0/1 member of `Q(p, m)` for objective `c`, or `None` if there is none.
pub fn q_best(p: &SetFunction, m: &[i64], c: &[Frac]) -> Option<(Subset, Frac)> {
    let n = m.len();
    let mut best: Option<(Subset, Frac)> = None;
    for a in subsets_of(p.ground().members()) {
        let x: Vec<Frac> = (0..n).map(|i| frac(a.contains(i) as i64)).collect();
        if !q_member(p, m, &x) {
            continue;
        }
        let val = a.iter().fold(Frac::from_integer(0), |s, u| s + c[u]);
        if best.as_ref().is_none_or(|(_, b)| val > *b) {
            best = Some((a, val));
        }
    }
    best
}

/// Minimum `Σ m` over `m ∈ {0..=cap}^V` with `m(X) ≥ p(X)` everywhere.
pub fn min_degree_total(p: &SetFunction, cap: i64) -> Option<i64> {
    let v: Vec<usize> = p.ground().members().iter().collect();
    let all = subsets_of(p.ground().members());
    let mut m = vec![0i64; p.ground().universe_size()];
    let mut best = None;
    loop {
        let total: i64 = v.iter().map(|&u| m[u]).sum();
        if best.is_none_or(|b| total < b) && all.iter().all(|&x| x.iter().map(|u| m[u]).sum::<i64>() >= p.value(x)) {
            best = Some(total);
        }
        // Odometer increment.
        let mut i = 0;
        loop {
            if i == v.len() {
                return best;
            }
            m[v[i]] += 1;
            if m[v[i]] <= cap {
                break;
            }
            m[v[i]] = 0;
            i += 1;
        }
    }
}

/// `λ(u, v)` as the smallest cut separating them.
pub fn local_connectivity(h: &WeightedHypergraph, u: usize, v: usize) -> i64 {
    subsets_of(h.vertices().members())
        .into_iter()
        .filter(|x| x.contains(u) && !x.contains(v))
        .map(|x| h.cut(x))
        .min()
        .unwrap_or(0)
}
