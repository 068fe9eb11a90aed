//! Function-maximization oracles over an exhaustive backend, and the
//! subroutines built on them: minimal maximizers, transversals, ratio
//! maximization and `α⁽⁴⁾`.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::WeightedHypergraph;
use crate::sets::{Bound, SetFunction, Subset, NEG_INF};

pub type Rational = num_rational::Ratio<i128>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Penalty {
    None,
    Cut,
    Coverage,
}

/// `max{p(Z) - g0(Z) + y0(Z) : S0 ⊆ Z ⊆ V - T0}` where `g0` is a cut or
/// coverage function of `graph` (or absent).
#[derive(Clone, Debug)]
pub struct OracleQuery {
    pub base: SetFunction,
    pub graph: WeightedHypergraph,
    pub required: Subset,
    pub forbidden: Subset,
    /// Universe-indexed; empty means all zero.
    pub weights: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleAnswer {
    pub set: Subset,
    /// `p(set)`
    pub value: i64,
    pub objective: Rational,
}

impl OracleQuery {
    pub fn new(base: &SetFunction) -> Self {
        OracleQuery {
            base: base.clone(),
            graph: WeightedHypergraph::new(base.ground().universe()),
            required: Subset::EMPTY,
            forbidden: Subset::EMPTY,
            weights: Vec::new(),
        }
    }

    pub fn graph(mut self, g: &WeightedHypergraph) -> Self {
        self.graph = g.clone();
        self
    }

    pub fn require(mut self, s0: Subset) -> Self {
        self.required = s0;
        self
    }

    pub fn forbid(mut self, t0: Subset) -> Self {
        self.forbidden = t0;
        self
    }

    pub fn weights(mut self, y0: Vec<Rational>) -> Self {
        self.weights = y0;
        self
    }

    pub fn integer_weights(self, y0: &[i64]) -> Self {
        let w = y0.iter().map(|&v| Rational::from_integer(v as i128)).collect();
        self.weights(w)
    }

    fn validate(&self) -> Result<()> {
        let ground = self.base.ground();
        ground.check(self.required)?;
        ground.check(self.forbidden)?;
        if self.required.intersects(self.forbidden) {
            return Err(Error::EmptyFeasibleFamily { required: self.required, forbidden: self.forbidden });
        }
        if !ground.same_universe(self.graph.vertices()) {
            return Err(Error::GroundMismatch);
        }
        if !self.weights.is_empty() && self.weights.len() != ground.universe_size() {
            return Err(Error::Invalid("oracle weight vector length differs from universe size".into()));
        }
        Ok(())
    }

    fn run(&self, penalty: Penalty) -> Result<OracleAnswer> {
        self.validate()?;
        // Scale y0 to integers: objective * scale = scale*(p - g0) + Σ y_scaled.
        let mut scale: i128 = 1;
        for w in &self.weights {
            scale = scale.lcm(w.denom());
            if scale > 1 << 60 {
                return Err(Error::ValueOutOfRange(scale));
            }
        }
        let n = self.base.ground().universe_size();
        let mut ys = vec![0i128; n];
        for (i, w) in self.weights.iter().enumerate() {
            let v = w.numer().checked_mul(scale / w.denom()).ok_or(Error::ValueOutOfRange(*w.numer()))?;
            ys[i] = v;
        }
        let free = self.base.ground().members() - self.forbidden - self.required;
        let mut best: Option<(Subset, i64, i128)> = None;
        for r in free.subsets() {
            let z = r | self.required;
            let v = self.base.value(z);
            if v == NEG_INF {
                continue;
            }
            let pen = match penalty {
                Penalty::None => 0,
                Penalty::Cut => self.graph.cut(z),
                Penalty::Coverage => self.graph.coverage(z),
            };
            let obj = scale * (v - pen) as i128 + z.iter().map(|i| ys[i]).sum::<i128>();
            if best.is_none_or(|(_, _, b)| obj > b) {
                best = Some((z, v, obj));
            }
        }
        let (set, value, obj) =
            best.ok_or_else(|| Error::Hypothesis("every feasible set has value -inf".into()))?;
        Ok(OracleAnswer { set, value, objective: Rational::new(obj, scale) })
    }
}

/// Objective uses the cut function `d_{G0}`.
pub fn max_oracle_sc(q: &OracleQuery) -> Result<OracleAnswer> {
    q.run(Penalty::Cut)
}

/// Objective uses the coverage function `b_{G0}`.
pub fn max_oracle_b(q: &OracleQuery) -> Result<OracleAnswer> {
    q.run(Penalty::Coverage)
}

/// No hypergraph term.
pub fn max_oracle_empty(p: &SetFunction, s0: Subset, t0: Subset, y0: &[Rational]) -> Result<OracleAnswer> {
    OracleQuery::new(p).require(s0).forbid(t0).weights(y0.to_vec()).run(Penalty::None)
}

/// Integer-weight variant used internally by the cover algorithms.
pub fn max_oracle_int(p: &SetFunction, s0: Subset, t0: Subset, y0: &[i64]) -> Result<OracleAnswer> {
    OracleQuery::new(p).require(s0).forbid(t0).integer_weights(y0).run(Penalty::None)
}

// ---------------------------------------------------------------------------
// Minimal maximizers

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximizerFamily {
    pub sets: Vec<Subset>,
    pub max_value: i64,
    pub queries: usize,
}

/// Inclusion-wise minimal maximizers of `p`, sorted by bitmask.
///
/// Each new maximizer is searched for while excluding one element of every
/// set found so far, then shrunk one element at a time. If two results
/// intersect, `p` is not skew-supermodular.
pub fn minimal_maximizers(p: &SetFunction) -> Result<MaximizerFamily> {
    let ground = p.ground().members();
    let mut queries = 1;
    let k = max_oracle_int(p, Subset::EMPTY, Subset::EMPTY, &[])?.value;
    let mut found: Vec<Subset> = Vec::new();
    let mut reps = Subset::EMPTY;
    loop {
        queries += 1;
        let ans = max_oracle_int(p, Subset::EMPTY, reps, &[])?;
        if ans.value < k {
            break;
        }
        let mut x = ans.set;
        let mut keep = Subset::EMPTY;
        for u in ans.set.iter() {
            if !x.contains(u) {
                continue;
            }
            queries += 1;
            let t0 = (ground - x).with(u);
            let inner = max_oracle_int(p, keep, t0, &[])?;
            if inner.value == k {
                x = inner.set;
            } else {
                keep = keep.with(u);
            }
        }
        if let Some(&other) = found.iter().find(|f| f.intersects(x)) {
            return Err(Error::NotDisjoint(other, x));
        }
        found.push(x);
        match x.first() {
            Some(r) => reps = reps.with(r),
            None => break,
        }
    }
    found.sort();
    Ok(MaximizerFamily { sets: found, max_value: k, queries })
}

/// Smallest-index element of each member.
pub fn minimal_transversal(family: &[Subset]) -> Result<Subset> {
    let mut t = Subset::EMPTY;
    for s in family {
        t = t.with(s.first().ok_or(Error::EmptyMember)?);
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Ratio maximization

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioResult {
    pub set: Subset,
    pub ratio: Rational,
    pub iterations: usize,
}

/// Dinkelbach iteration started at `start`. `argmax(λ)` must return a
/// maximizer of `f - λ g` over the search family.
pub fn dinkelbach(
    start: Subset,
    f: impl Fn(Subset) -> i64,
    g: impl Fn(Subset) -> i64,
    mut argmax: impl FnMut(Rational) -> Result<Subset>,
) -> Result<RatioResult> {
    let ratio_at = |z: Subset| -> Result<Rational> {
        let d = g(z);
        if d <= 0 {
            return Err(Error::NonPositiveDenominator { set: z, value: d });
        }
        Ok(Rational::new(f(z) as i128, d as i128))
    };
    let mut z = start;
    let mut lambda = ratio_at(z)?;
    let mut iterations = 0;
    loop {
        let next = argmax(lambda)?;
        let gap = Rational::from_integer(f(next) as i128) - lambda * Rational::from_integer(g(next) as i128);
        if !gap.is_positive() {
            return Ok(RatioResult { set: z, ratio: lambda, iterations });
        }
        z = next;
        lambda = ratio_at(z)?;
        iterations += 1;
    }
}

/// `argmax f(X)/g(X)` over all subsets of the ground set of `f`.
pub fn ratio_maximize(f: &SetFunction, g: &SetFunction) -> Result<RatioResult> {
    if f.ground() != g.ground() {
        return Err(Error::GroundMismatch);
    }
    let members = f.ground().members();
    dinkelbach(members, |x| f.value(x), |x| g.value(x), |lambda| {
        let (a, b) = (*lambda.numer(), *lambda.denom());
        let mut best: Option<(Subset, i128)> = None;
        for x in members.subsets() {
            let gx = g.value(x);
            if gx <= 0 {
                return Err(Error::NonPositiveDenominator { set: x, value: gx });
            }
            let obj = b * f.value(x) as i128 - a * gx as i128;
            if best.is_none_or(|(_, o)| obj > o) {
                best = Some((x, obj));
            }
        }
        Ok(best.expect("ground subsets are never empty").0)
    })
}

// ---------------------------------------------------------------------------
// α⁽⁴⁾

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alpha4Mode {
    /// Per pair of `A`, Dinkelbach over the empty oracle.
    #[default]
    Ratio,
    /// Scan every `X` with `|A ∩ X| ≥ 2`.
    Exhaustive,
}

/// `min{⌊(m(X) - p(X)) / (|A∩X| - 1)⌋ : |A∩X| ≥ 2}`, `+∞` when `|A| ≤ 1`.
/// `m` is universe-indexed.
pub fn alpha4(p: &SetFunction, m: &[i64], a: Subset, mode: Alpha4Mode) -> Result<Bound> {
    p.ground().check(a)?;
    if a.len() <= 1 {
        return Ok(Bound::Infinite);
    }
    match mode {
        Alpha4Mode::Exhaustive => {
            let mut best: Option<i64> = None;
            for x in p.ground().subsets() {
                let k = (a & x).len() as i64;
                if k < 2 {
                    continue;
                }
                let q = Integer::div_floor(&(x.weight(m) - p.value(x)), &(k - 1));
                best = Some(best.map_or(q, |b| b.min(q)));
            }
            Ok(best.map_or(Bound::Infinite, Bound::Finite))
        }
        Alpha4Mode::Ratio => {
            let neg_m: Vec<Rational> = m.iter().map(|&v| Rational::from_integer(-(v as i128))).collect();
            let mut best: Option<Rational> = None;
            let elems: Vec<usize> = a.iter().collect();
            for (i, &u) in elems.iter().enumerate() {
                for &v in &elems[i + 1..] {
                    let uv = Subset::singleton(u).with(v);
                    let rest = a - uv;
                    let start = p.ground().members() - uv;
                    let f = |z: Subset| p.value(z | uv) - (z | uv).weight(m);
                    let g = |z: Subset| 1 + (rest & z).len() as i64;
                    let r = dinkelbach(start, f, g, |lambda| {
                        let mut y = neg_m.clone();
                        for w in rest.iter() {
                            y[w] -= lambda;
                        }
                        Ok(max_oracle_empty(p, uv, Subset::EMPTY, &y)?.set - uv)
                    })?;
                    best = Some(best.map_or(r.ratio, |b| b.max(r.ratio)));
                }
            }
            let lam = best.expect("|A| ≥ 2 gives at least one pair");
            let v = (-lam).floor().to_integer();
            Ok(Bound::Finite(v as i64))
        }
    }
}

/// `(p1 - b_accumulated) / contracted`.
pub fn stacked_oracle(p1: &SetFunction, accumulated: &WeightedHypergraph, contracted: Subset) -> Result<SetFunction> {
    p1.minus_coverage(accumulated)?.contract(contracted)
}

/// `1/1` helper for callers building rational vectors.
pub fn rational(v: i64) -> Rational {
    if v == 0 {
        Rational::zero()
    } else if v == 1 {
        Rational::one()
    } else {
        Rational::from_integer(v as i128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::GroundSet;

    fn ground(n: usize) -> GroundSet {
        GroundSet::indexed(n).unwrap()
    }

    #[test]
    fn plain_maximum() {
        let g = ground(3);
        let p = SetFunction::from_table(g, vec![0, 4, 2, 4, 1, 5, 3, 5]).unwrap();
        let a = max_oracle_sc(&OracleQuery::new(&p)).unwrap();
        assert_eq!(a.value, 5);
        assert_eq!(a.set, Subset::from_bits(5));
    }

    #[test]
    fn modular_objective_picks_everything_allowed() {
        let g = ground(4);
        let p = SetFunction::zero(g);
        let t0 = Subset::singleton(2);
        let a = max_oracle_sc(&OracleQuery::new(&p).forbid(t0).integer_weights(&[1, 1, 1, 1])).unwrap();
        assert_eq!(a.set, Subset::from_bits(0b1011));
        assert_eq!(a.objective, rational(3));
    }

    #[test]
    fn overlapping_constraints_rejected() {
        let p = SetFunction::zero(ground(3));
        let s = Subset::singleton(1);
        assert!(matches!(
            max_oracle_empty(&p, s, s, &[]),
            Err(Error::EmptyFeasibleFamily { .. })
        ));
    }

    #[test]
    fn required_set_respected() {
        let g = ground(3);
        let p = SetFunction::from_table(g.clone(), vec![9, 0, 0, 0, 0, 0, 0, 0]).unwrap();
        let mut h = WeightedHypergraph::new(g);
        h.add_edge(Subset::from_bits(0b011), 3).unwrap();
        let a = max_oracle_b(&OracleQuery::new(&p).graph(&h).require(Subset::singleton(0))).unwrap();
        assert!(a.set.contains(0));
        assert_eq!(a.set, Subset::singleton(0));
        assert_eq!(a.objective, rational(-3));
    }

    #[test]
    fn flat_family_is_v() {
        let g = ground(4);
        let v = g.members();
        let p = SetFunction::from_fn(g, |x| if x.is_empty() { 0 } else if x == v { 11 } else { 7 }).unwrap();
        assert_eq!(minimal_maximizers(&p).unwrap().sets, vec![v]);
    }

    #[test]
    fn singleton_maximizers() {
        let g = ground(4);
        let v = g.members();
        let p = SetFunction::from_fn(g, |x| match x.len() {
            0 | 4 => 0,
            1 | 3 => 3,
            _ => 2,
        })
        .unwrap();
        assert!(p.is_symmetric());
        let fam = minimal_maximizers(&p).unwrap();
        assert_eq!(fam.sets, v.iter().map(Subset::singleton).collect::<Vec<_>>());
        assert_eq!(minimal_transversal(&fam.sets).unwrap(), v);
    }

    #[test]
    fn non_skew_input_surfaces() {
        // Maximizers {0,1} and {1,2} intersect without a maximizer inside.
        let g = ground(3);
        let p = SetFunction::from_fn(g, |x| if x.bits() == 0b011 || x.bits() == 0b110 { 5 } else { 0 }).unwrap();
        assert!(matches!(minimal_maximizers(&p), Err(Error::NotDisjoint(..))));
    }

    #[test]
    fn transversal_examples() {
        let fam = [Subset::from_bits(0b011), Subset::from_bits(0b100)];
        assert_eq!(minimal_transversal(&fam).unwrap(), Subset::from_bits(0b101));
        assert_eq!(minimal_transversal(&[]).unwrap(), Subset::EMPTY);
        assert_eq!(minimal_transversal(&[Subset::EMPTY]), Err(Error::EmptyMember));
    }

    #[test]
    fn ratio_trivial_cases() {
        let g = ground(3);
        let f = SetFunction::from_fn(g.clone(), |_| 4).unwrap();
        let one = SetFunction::from_fn(g.clone(), |_| 1).unwrap();
        assert_eq!(ratio_maximize(&f, &one).unwrap().ratio, rational(4));
        let h = SetFunction::from_fn(g.clone(), |x| x.len() as i64 + 1).unwrap();
        let r = ratio_maximize(&h, &h).unwrap();
        assert_eq!((r.ratio, r.iterations), (rational(1), 0));
        let zero = SetFunction::zero(g);
        assert!(matches!(ratio_maximize(&f, &zero), Err(Error::NonPositiveDenominator { .. })));
    }

    #[test]
    fn alpha4_small() {
        let g = ground(3);
        let p = SetFunction::zero(g.clone());
        let a = Subset::from_bits(0b011);
        // X = {0,1}: m(X) - p(X) = 1 = |A∩X| - 1.
        let m = [1, 0, 5];
        for mode in [Alpha4Mode::Ratio, Alpha4Mode::Exhaustive] {
            assert_eq!(alpha4(&p, &m, a, mode).unwrap(), Bound::Finite(1));
            assert_eq!(alpha4(&p, &m, Subset::singleton(0), mode).unwrap(), Bound::Infinite);
        }
    }

    #[test]
    fn stacked_trivial() {
        let g = ground(3);
        let p = SetFunction::from_fn(g.clone(), |x| x.bits() as i64).unwrap();
        let empty = WeightedHypergraph::new(g.clone());
        let s = stacked_oracle(&p, &empty, Subset::EMPTY).unwrap();
        assert!(p.entries().all(|(x, v)| s.value(x) == v));
        let a = Subset::from_bits(0b110);
        let h = WeightedHypergraph::from_edges(g, [(a, 2)]).unwrap();
        let s = stacked_oracle(&p, &h, Subset::EMPTY).unwrap();
        assert!(p.entries().all(|(x, v)| s.value(x) == v - if x.intersects(a) { 2 } else { 0 }));
    }
}
