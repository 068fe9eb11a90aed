//! The polyhedron `Q(p, m)`: membership and integral extreme-point
//! optimization.
//!
//! ```text
//! (i)   0 ≤ x_u ≤ min{1, m(u)}
//! (ii)  x(Z) ≥ 1                  for every p-maximizer Z
//! (iii) x_u = 1                   when m(u) = K_p
//! (iv)  x(Z) ≤ m(Z) - p(Z) + 1     for every Z
//! (v)   ⌊m(V)/K_p⌋ ≤ x(V) ≤ ⌈m(V)/K_p⌉
//! ```
//!
//! Optimization runs an exact LP over (i), (iii), (v) and a growing pool of
//! (ii)/(iv) rows found by exhaustive separation, then fixes variables one at
//! a time to land on a 0/1 optimum.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{q, LinearProgram, LpOutcome, Relation, Q};
use crate::sets::{DegreeVector, SetFunction, Subset};

#[derive(Clone, Debug)]
pub struct QInstance {
    p: SetFunction,
    m: DegreeVector,
    k: i64,
    /// `(Z, m(Z) - p(Z) + 1, p(Z) = K)` for every subset of the ground set.
    rows: Vec<(Subset, i64, bool)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum QViolation {
    /// (i)
    Bounds { vertex: usize },
    /// (ii)
    Maximizer { set: Subset },
    /// (iii)
    Forced { vertex: usize },
    /// (iv)
    Slack { set: Subset },
    /// (v)
    Size,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixingPolicy {
    /// Fix every variable in index order.
    #[default]
    Always,
    /// Only fix when the LP optimum is fractional.
    WhenFractional,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QSolution {
    /// Universe-indexed.
    pub point: Vec<Q>,
    pub support: Subset,
    pub value: Q,
    pub lp_solves: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportProperties {
    /// Meets every p-maximizer.
    pub transversal: bool,
    /// Contains every `u` with `m(u) = K_p`.
    pub contains_forced: bool,
    /// `|A ∩ Z| ≤ m(Z) - p(Z) + 1` for all `Z`.
    pub slack_bounded: bool,
    /// `⌊m(V)/K_p⌋ ≤ |A| ≤ ⌈m(V)/K_p⌉`.
    pub size_in_range: bool,
}

impl SupportProperties {
    pub fn all(&self) -> bool {
        self.transversal && self.contains_forced && self.slack_bounded && self.size_in_range
    }
}

impl QInstance {
    pub fn new(p: &SetFunction, m: &DegreeVector) -> Result<Self> {
        if p.ground() != m.ground() {
            return Err(Error::GroundMismatch);
        }
        let p = p.tabulate()?;
        let k = p.max_value();
        if k <= 0 {
            return Err(Error::Invalid(format!("Q(p,m) needs K_p > 0, got {k}")));
        }
        let rows = p
            .entries()
            .map(|(z, v)| (z, m.sum(z) - v + 1, v == k))
            .collect();
        Ok(QInstance { p, m: m.clone(), k, rows })
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn p(&self) -> &SetFunction {
        &self.p
    }

    pub fn m(&self) -> &DegreeVector {
        &self.m
    }

    pub fn size_range(&self) -> (i64, i64) {
        let total = self.m.total();
        (Integer::div_floor(&total, &self.k), Integer::div_ceil(&total, &self.k))
    }

    fn forced(&self, u: usize) -> bool {
        self.m.get(u) == self.k
    }

    fn upper(&self, u: usize) -> i64 {
        self.m.get(u).min(1)
    }
}

/// `x` as integers over a common denominator.
fn scaled(x: &[Q]) -> Result<(Vec<i128>, i128)> {
    let mut den = BigInt::one();
    for v in x {
        den = den.lcm(v.denom());
    }
    let d = den.to_i128().ok_or_else(|| Error::Invalid("point denominator too large".into()))?;
    let nums = x
        .iter()
        .map(|v| (v.numer() * (&den / v.denom())).to_i128())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Invalid("point numerator too large".into()))?;
    Ok((nums, d))
}

/// First violated constraint in the order (i), (iii), (v), (ii), (iv), with
/// sets in increasing bitmask order; `None` if `x ∈ Q(p, m)`.
/// `x` is universe-indexed.
pub fn q_membership(inst: &QInstance, x: &[Q]) -> Result<Option<QViolation>> {
    let ground = inst.p.ground();
    if x.len() != ground.universe_size() {
        return Err(Error::Invalid("point length differs from universe size".into()));
    }
    for u in ground.members().iter() {
        if x[u].is_negative() || x[u] > q(inst.upper(u)) {
            return Ok(Some(QViolation::Bounds { vertex: u }));
        }
    }
    for u in ground.members().iter() {
        if inst.forced(u) && !x[u].is_one() {
            return Ok(Some(QViolation::Forced { vertex: u }));
        }
    }
    let (xs, d) = scaled(x)?;
    let sum = |z: Subset| z.iter().map(|i| xs[i]).sum::<i128>();
    let (lo, hi) = inst.size_range();
    let total = sum(ground.members());
    if total < d * lo as i128 || total > d * hi as i128 {
        return Ok(Some(QViolation::Size));
    }
    for &(z, _, is_max) in &inst.rows {
        if is_max && sum(z) < d {
            return Ok(Some(QViolation::Maximizer { set: z }));
        }
    }
    for &(z, rhs, _) in &inst.rows {
        if sum(z) > d * rhs as i128 {
            return Ok(Some(QViolation::Slack { set: z }));
        }
    }
    Ok(None)
}

pub fn is_member(inst: &QInstance, x: &[Q]) -> Result<bool> {
    Ok(q_membership(inst, x)?.is_none())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Cut {
    Maximizer(Subset),
    Slack(Subset, i64),
}

struct Relaxation<'a> {
    inst: &'a QInstance,
    /// Local variable index -> vertex.
    verts: Vec<usize>,
    cuts: Vec<Cut>,
    solves: usize,
}

impl<'a> Relaxation<'a> {
    fn new(inst: &'a QInstance) -> Self {
        Relaxation { inst, verts: inst.p.ground().members().iter().collect(), cuts: Vec::new(), solves: 0 }
    }

    fn terms(&self, z: Subset) -> Vec<(usize, Q)> {
        self.verts
            .iter()
            .enumerate()
            .filter(|(_, &u)| z.contains(u))
            .map(|(j, _)| (j, Q::one()))
            .collect()
    }

    fn lp(&self, c: &[Q], fixed: &[Option<bool>]) -> LinearProgram {
        let inst = self.inst;
        let n = self.verts.len();
        let mut lp = LinearProgram::new(n);
        lp.set_objective(self.verts.iter().map(|&u| c[u].clone()).collect());
        for (j, &u) in self.verts.iter().enumerate() {
            let (mut lo, mut hi) = (0, inst.upper(u));
            if inst.forced(u) {
                lo = 1;
            }
            match fixed[j] {
                Some(true) => lo = lo.max(1),
                Some(false) => hi = 0,
                None => {}
            }
            lp.add(vec![(j, Q::one())], Relation::Le, q(hi));
            if lo > 0 {
                lp.add(vec![(j, Q::one())], Relation::Ge, q(lo));
            }
        }
        let all: Vec<(usize, Q)> = (0..n).map(|j| (j, Q::one())).collect();
        let (lo, hi) = inst.size_range();
        lp.add(all.clone(), Relation::Ge, q(lo));
        lp.add(all, Relation::Le, q(hi));
        for cut in &self.cuts {
            match *cut {
                Cut::Maximizer(z) => lp.add(self.terms(z), Relation::Ge, Q::one()),
                Cut::Slack(z, rhs) => lp.add(self.terms(z), Relation::Le, q(rhs)),
            }
        }
        lp
    }

    /// Most violated (ii) and (iv) rows at `x`, smallest bitmask on ties.
    fn separate(&self, x: &[Q]) -> Result<Vec<Cut>> {
        let (xs, d) = scaled(x)?;
        let mut worst_max: Option<(i128, Subset)> = None;
        let mut worst_slack: Option<(i128, Subset, i64)> = None;
        for &(z, rhs, is_max) in &self.inst.rows {
            let s: i128 = z.iter().map(|i| xs[i]).sum();
            if is_max && s < d && worst_max.is_none_or(|(v, _)| s < v) {
                worst_max = Some((s, z));
            }
            let over = s - d * rhs as i128;
            if over > 0 && worst_slack.is_none_or(|(v, _, _)| over > v) {
                worst_slack = Some((over, z, rhs));
            }
        }
        let mut cuts = Vec::new();
        if let Some((_, z)) = worst_max {
            cuts.push(Cut::Maximizer(z));
        }
        if let Some((_, z, rhs)) = worst_slack {
            cuts.push(Cut::Slack(z, rhs));
        }
        Ok(cuts)
    }

    /// Optimum over `Q` with the given fixings, as a universe-indexed point.
    fn solve(&mut self, c: &[Q], fixed: &[Option<bool>]) -> Result<Option<(Vec<Q>, Q)>> {
        loop {
            self.solves += 1;
            let (local, value) = match self.lp(c, fixed).solve() {
                LpOutcome::Optimal { x, value } => (x, value),
                LpOutcome::Infeasible => return Ok(None),
                LpOutcome::Unbounded => return Err(Error::Hypothesis("bounded LP reported unbounded".into())),
            };
            let mut x = vec![Q::zero(); self.inst.p.ground().universe_size()];
            for (j, &u) in self.verts.iter().enumerate() {
                x[u] = local[j].clone();
            }
            let new = self.separate(&x)?;
            if new.is_empty() {
                return Ok(Some((x, value)));
            }
            for cut in new {
                if self.cuts.contains(&cut) {
                    return Err(Error::Hypothesis("separation returned a row already in the LP".into()));
                }
                self.cuts.push(cut);
            }
        }
    }
}

fn is_integral(x: &[Q]) -> bool {
    x.iter().all(|v| v.is_integer())
}

/// A 0/1 point of `Q(p, m)` maximizing `c·x` (universe-indexed `c`).
pub fn q_optimize(inst: &QInstance, c: &[Q], policy: FixingPolicy) -> Result<QSolution> {
    let ground = inst.p.ground();
    if c.len() != ground.universe_size() {
        return Err(Error::Invalid("objective length differs from universe size".into()));
    }
    let mut relax = Relaxation::new(inst);
    let n = relax.verts.len();
    let mut fixed: Vec<Option<bool>> = vec![None; n];
    let (mut x, best) = relax.solve(c, &fixed)?.ok_or(Error::QInfeasible)?;
    if !(policy == FixingPolicy::WhenFractional && is_integral(&x)) {
        for j in 0..n {
            let u = relax.verts[j];
            let pref = !c[u].is_negative();
            let want = if pref { Q::one() } else { Q::zero() };
            if x[u] == want {
                fixed[j] = Some(pref);
                continue;
            }
            fixed[j] = Some(pref);
            if let Some((y, v)) = relax.solve(c, &fixed)? {
                if v == best {
                    x = y;
                    continue;
                }
            }
            fixed[j] = Some(!pref);
            let other = if pref { Q::zero() } else { Q::one() };
            if x[u] != other {
                let (y, v) = relax.solve(c, &fixed)?.ok_or(Error::QInfeasible)?;
                if v != best {
                    return Err(Error::Hypothesis("fixing lost the optimum; Q(p,m) is not integral here".into()));
                }
                x = y;
            }
        }
    }
    if !is_integral(&x) {
        return Err(Error::Hypothesis("extreme point of Q(p,m) is fractional".into()));
    }
    let support = Subset::from_indices(ground.members().iter().filter(|&u| x[u].is_one()));
    Ok(QSolution { point: x, support, value: best, lp_solves: relax.solves })
}

/// `χ_A` for a universe of size `n`.
pub fn indicator(n: usize, a: Subset) -> Vec<Q> {
    (0..n).map(|i| if a.contains(i) { Q::one() } else { Q::zero() }).collect()
}

/// The four properties of a feasible hyperedge.
pub fn q_support_properties(inst: &QInstance, a: Subset) -> SupportProperties {
    let (lo, hi) = inst.size_range();
    let size = a.len() as i64;
    SupportProperties {
        transversal: inst.rows.iter().all(|&(z, _, is_max)| !is_max || z.intersects(a)),
        contains_forced: inst.p.ground().members().iter().all(|u| !inst.forced(u) || a.contains(u)),
        slack_bounded: inst.rows.iter().all(|&(z, rhs, _)| ((z & a).len() as i64) <= rhs),
        size_in_range: lo <= size && size <= hi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::GroundSet;

    fn two_point() -> QInstance {
        let g = GroundSet::new(["a", "b"]).unwrap();
        let p = SetFunction::from_table(g.clone(), vec![0, 1, 1, 0]).unwrap();
        let m = DegreeVector::new(g, &[1, 1]).unwrap();
        QInstance::new(&p, &m).unwrap()
    }

    #[test]
    fn hand_checked_membership() {
        let inst = two_point();
        assert_eq!(q_membership(&inst, &[q(1), q(1)]).unwrap(), None);
        assert_eq!(q_membership(&inst, &[q(1), q(0)]).unwrap(), Some(QViolation::Forced { vertex: 1 }));
    }

    #[test]
    fn unique_point() {
        let inst = two_point();
        for c in [[q(1), q(1)], [q(-1), q(0)], [q(0), q(-3)]] {
            let s = q_optimize(&inst, &c, FixingPolicy::Always).unwrap();
            assert_eq!(s.support, Subset::from_bits(0b11));
        }
    }

    #[test]
    fn flat_instance_size_range() {
        let g = GroundSet::indexed(5).unwrap();
        let v = g.members();
        let p = SetFunction::from_fn(g.clone(), |x| if x.is_empty() { 0 } else if x == v { 26 } else { 15 }).unwrap();
        let m = DegreeVector::constant(g, 15).unwrap();
        let inst = QInstance::new(&p, &m).unwrap();
        assert_eq!(inst.size_range(), (2, 3));
        let s = q_optimize(&inst, &vec![q(0); 5], FixingPolicy::Always).unwrap();
        assert!((2..=3).contains(&s.support.len()));
        assert!(q_support_properties(&inst, s.support).all());
        assert!(!q_support_properties(&inst, Subset::EMPTY).transversal);
    }

    #[test]
    fn oversized_support_fails_size() {
        // n = 4, K = 2, m ≡ 1 gives m(V)/K = 2.
        let g = GroundSet::indexed(4).unwrap();
        let p = SetFunction::from_fn(g.clone(), |x| if x.is_empty() || x.len() == 4 { 0 } else { 1 + (x.len() == 2) as i64 }).unwrap();
        let m = DegreeVector::constant(g.clone(), 1).unwrap();
        let inst = QInstance::new(&p, &m).unwrap();
        assert!(!q_support_properties(&inst, g.members()).size_in_range);
    }
}
