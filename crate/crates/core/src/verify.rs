//! Exhaustive certification of cover outputs and audit of cover traces.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::cover_basic::next_function;
use crate::cover_uniform::compute_alpha5;
use crate::error::{Error, Result};
use crate::hypergraph::WeightedHypergraph;
use crate::oracles::stacked_oracle;
use crate::qpolytope::{indicator, is_member, q_support_properties, QInstance};
use crate::sets::{Bound, DegreeVector, SetFunction, Subset, NEG_INF};
use crate::trace::{Algorithm, CallInput, CoverTrace};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    #[default]
    Weak,
    Strong,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMode {
    #[default]
    Basic,
    Uniform,
    UniformPair,
}

impl From<Algorithm> for CoverMode {
    fn from(a: Algorithm) -> Self {
        match a {
            Algorithm::Basic => CoverMode::Basic,
            Algorithm::Uniform => CoverMode::Uniform,
            Algorithm::UniformPair => CoverMode::UniformPair,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Set { set: Subset, required: i64, actual: i64 },
    Vertex { vertex: usize, expected: i64, actual: i64 },
    Sets { sets: Vec<Subset> },
    Bound { limit: i64, actual: i64 },
    Step { depth: usize, detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub property: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    /// Record an outcome; the first failure of a property is kept.
    pub fn note(&mut self, property: &str, witness: Option<Witness>) {
        match self.checks.iter_mut().find(|c| c.property == property) {
            Some(c) => {
                if c.passed && witness.is_some() {
                    c.passed = false;
                    c.witness = witness;
                }
            }
            None => self.checks.push(Check { property: property.into(), passed: witness.is_none(), witness }),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, property: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.property == property)
    }

    pub fn merge(&mut self, other: VerificationReport) {
        for c in other.checks {
            self.note(&c.property, if c.passed { None } else { c.witness });
        }
    }
}

pub const WEAK: &str = "weak cover";
pub const STRONG: &str = "strong cover";
pub const DEGREES: &str = "degrees";
pub const TOTAL: &str = "total weight";
pub const NEAR_UNIFORM: &str = "near-uniform";
pub const EDGE_COUNT: &str = "edge count";
pub const DEPTH: &str = "depth";
pub const ALPHA_POSITIVE: &str = "α ≥ 1";
pub const K_SEQUENCE: &str = "K decreases by α";
pub const RECORDED: &str = "recorded values";
pub const HYPOTHESES: &str = "hypotheses";
pub const SLACK_AFTER_STEP: &str = "m ≥ p + α|A∩X| - α";
pub const STACKED: &str = "stacked formula";
pub const LAMINAR: &str = "cumulative maximizers laminar";
pub const PROGRESS: &str = "progress";
pub const ALPHA5_ONCE: &str = "α⁽⁵⁾ at most once";
pub const SUPPORT: &str = "hyperedge feasibility";
pub const LEAVES_Q: &str = "χ_A leaves Q(p'', m'')";
pub const RATIO: &str = "m(V)/K range";

/// Largest edge count allowed for `mode` on `n` vertices.
pub fn edge_limit(mode: CoverMode, n: usize) -> i64 {
    let n = n as i64;
    match mode {
        CoverMode::Basic => 4 * n - 1,
        CoverMode::Uniform => 11 * n,
        CoverMode::UniformPair => 14 * n * n - 1,
    }
}

/// Largest number of calls (including the final one) allowed for `mode`.
pub fn depth_limit(mode: CoverMode, n: usize) -> i64 {
    let n = n as i64;
    match mode {
        CoverMode::Basic => (4 * n - 1).max(1),
        CoverMode::Uniform => 11 * n + 1,
        CoverMode::UniformPair => (14 * n * n).max(1),
    }
}

fn first_below(f: &SetFunction, mut g: impl FnMut(Subset) -> i64) -> Option<Witness> {
    f.ground().subsets().find_map(|x| {
        let (req, act) = (f.value(x), g(x));
        (act < req).then_some(Witness::Set { set: x, required: req, actual: act })
    })
}

/// Check `h` against every property of a degree-specified cover of the
/// maximum of `functions` (one or two of them).
pub fn verify_cover(
    functions: &[SetFunction],
    m: &DegreeVector,
    h: &WeightedHypergraph,
    flavor: Flavor,
    mode: CoverMode,
) -> Result<VerificationReport> {
    let ground = m.ground();
    if functions.is_empty() {
        return Err(Error::Invalid("nothing to verify against".into()));
    }
    for f in functions {
        if f.ground() != ground {
            return Err(Error::GroundMismatch);
        }
    }
    if !h.vertices().same_universe(ground) || h.vertices().members() != ground.members() {
        return Err(Error::GroundMismatch);
    }
    let mut report = VerificationReport::default();
    for f in functions {
        report.note(WEAK, first_below(f, |x| h.coverage(x)));
        if flavor == Flavor::Strong {
            report.note(STRONG, first_below(f, |x| h.cut(x)));
        }
    }
    let deg = h.degrees();
    let bad = ground.members().iter().find(|&u| deg[u] != m.get(u));
    report.note(DEGREES, bad.map(|u| Witness::Vertex { vertex: u, expected: m.get(u), actual: deg[u] }));
    let k = functions.iter().map(|f| f.max_value()).max().expect("non-empty").max(0);
    let total = h.total_weight();
    report.note(TOTAL, (total != k).then_some(Witness::Bound { limit: k, actual: total }));
    if mode != CoverMode::Basic && k > 0 {
        let (lo, hi) = (Integer::div_floor(&m.total(), &k), Integer::div_ceil(&m.total(), &k));
        let off: Vec<Subset> =
            h.edges().map(|(e, _)| e).filter(|e| !(lo..=hi).contains(&(e.len() as i64))).collect();
        report.note(NEAR_UNIFORM, (!off.is_empty()).then_some(Witness::Sets { sets: off }));
    }
    let limit = edge_limit(mode, ground.len());
    let count = h.edge_count() as i64;
    report.note(EDGE_COUNT, (count > limit).then_some(Witness::Bound { limit, actual: count }));
    Ok(report)
}

// ---------------------------------------------------------------------------
// Laminar families

pub fn crossing_pair(family: &[Subset]) -> Option<(Subset, Subset)> {
    for (i, &x) in family.iter().enumerate() {
        for &y in &family[i + 1..] {
            if x.overlaps_properly(y) {
                return Some((x, y));
            }
        }
    }
    None
}

/// No two members cross.
pub fn check_laminar(family: &[Subset]) -> bool {
    crossing_pair(family).is_none()
}

/// `{X - Z : X ∈ L} - {∅}`, as a sorted set.
pub fn project(family: &[Subset], z: Subset) -> Vec<Subset> {
    let mut out: Vec<Subset> = family.iter().map(|&x| x - z).filter(|x| !x.is_empty()).collect();
    out.sort();
    out.dedup();
    out
}

/// `|L| ≤ |L'| + 3|Z|` for the projection `L'` of a laminar `L` (counted
/// as sets).
pub fn projection_bound_holds(family: &[Subset], z: Subset) -> bool {
    let mut l = family.to_vec();
    l.sort();
    l.dedup();
    l.len() <= project(&l, z).len() + 3 * z.len()
}

// ---------------------------------------------------------------------------
// Trace audit

/// Minimal maximizers by direct scan.
fn scan_minimal_maximizers(p: &SetFunction) -> Vec<Subset> {
    let k = p.max_value();
    let maxs: Vec<Subset> = p.ground().subsets().filter(|&x| p.value(x) == k).collect();
    maxs.iter().copied().filter(|&x| !maxs.iter().any(|&y| y != x && y.is_subset_of(x))).collect()
}

/// Candidate step sizes recomputed by scanning, in the trace's order.
fn scan_alphas(p: &SetFunction, m: &DegreeVector, a: Subset, uniform: bool) -> Vec<Bound> {
    let v = p.ground().members();
    let k = p.max_value();
    let fin = |it: &mut dyn Iterator<Item = i64>| it.min().map_or(Bound::Infinite, Bound::Finite);
    let mut out = vec![
        fin(&mut a.iter().map(|u| m.get(u))),
        fin(&mut (v - a).subsets().map(|x| k - p.value(x))),
        fin(&mut (v - a).iter().map(|u| k - m.get(u))),
    ];
    if uniform {
        out.push(fin(&mut v.subsets().filter(|x| (a & *x).len() >= 2).map(|x| {
            Integer::div_floor(&(m.sum(x) - p.value(x)), &((a & x).len() as i64 - 1))
        })));
        out.push(compute_alpha5(m.total(), k, a.len() as i64));
    }
    out
}

fn step_fail(depth: usize, detail: impl Into<String>) -> Option<Witness> {
    Some(Witness::Step { depth, detail: detail.into() })
}

/// Re-derive every per-call invariant of a cover trace from the instance
/// `(functions, m)`. Inconsistent traces are reported, not returned as
/// errors.
pub fn audit_trace(functions: &[SetFunction], m: &DegreeVector, trace: &CoverTrace) -> Result<VerificationReport> {
    let mut report = VerificationReport::default();
    let mode = CoverMode::from(trace.algorithm);
    let uniform = mode != CoverMode::Basic;
    let n = m.ground().len();
    let steps = &trace.steps;

    // Checks on recorded numbers alone.
    for s in steps {
        report.note(ALPHA_POSITIVE, (s.alpha < 1).then(|| step_fail(s.depth, format!("α = {}", s.alpha))).flatten());
    }
    for w in steps.windows(2) {
        let ok = w[1].k == w[0].k - w[0].alpha;
        report.note(K_SEQUENCE, (!ok).then(|| step_fail(w[1].depth, format!("K = {}", w[1].k))).flatten());
    }
    let d = trace.depth as i64;
    report.note(DEPTH, (d > depth_limit(mode, n) || d != steps.len() as i64 + 1).then_some(Witness::Bound {
        limit: depth_limit(mode, n),
        actual: d,
    }));
    if uniform {
        let fives = steps.iter().filter(|s| s.attains(5)).count() as i64;
        report.note(ALPHA5_ONCE, (fives > 1).then_some(Witness::Bound { limit: 1, actual: fives }));
    }
    if report.check(ALPHA_POSITIVE).is_some_and(|c| !c.passed) {
        return Ok(report);
    }

    // Replay, checking each call against its input.
    let z0 = trace.preprocessed;
    if z0 != m.ground().members() - m.support() {
        report.note(RECORDED, step_fail(0, "preprocessed set differs from the zero-degree vertices"));
        return Ok(report);
    }
    let mut cur = CallInput {
        functions: functions.iter().map(|f| f.contract_tabulated(z0)).collect::<Result<_>>()?,
        m: m.remove(z0),
    };
    let p1: Vec<SetFunction> = functions.iter().map(|f| f.tabulate()).collect::<Result<_>>()?;
    let mut acc = WeightedHypergraph::new(m.ground().universe());
    let mut contracted = z0;
    let mut cumulative: Vec<Vec<Subset>> = vec![Vec::new(); functions.len()];
    let mut prev_d: Option<Subset> = None;
    for s in steps {
        let p = cur.p()?;
        let mm = &cur.m;
        let v = p.ground().members();
        let k = p.max_value();
        let a = s.hyperedge;
        let depth = s.depth;
        let mismatch = if s.ground != v {
            Some("ground set")
        } else if s.k != k {
            Some("K")
        } else if s.degrees != mm.as_slice() {
            Some("degrees")
        } else if !a.is_subset_of(v) {
            Some("hyperedge outside ground set")
        } else if s.contracted != Subset::from_indices(a.iter().filter(|&u| mm.get(u) == s.alpha)) {
            Some("contracted set")
        } else {
            None
        };
        report.note(RECORDED, mismatch.and_then(|what| step_fail(depth, what)));
        if mismatch.is_some() {
            return Ok(report);
        }
        let alphas = scan_alphas(&p, mm, a, uniform);
        let min = alphas.iter().min().copied();
        let ok = alphas == s.alphas && min == Some(Bound::Finite(s.alpha));
        report.note(RECORDED, (!ok).then(|| step_fail(depth, "step-size candidates")).flatten());

        // Hypotheses and the post-step slack bound.
        let hyp = v.subsets().find(|&x| mm.sum(x) < p.value(x)).map(|x| Witness::Set {
            set: x,
            required: p.value(x),
            actual: mm.sum(x),
        });
        let hyp = hyp.or_else(|| {
            v.iter().find(|&u| mm.get(u) > k).map(|u| Witness::Vertex { vertex: u, expected: k, actual: mm.get(u) })
        });
        report.note(HYPOTHESES, hyp);
        let slack = v.subsets().find(|&x| mm.sum(x) < p.value(x) + s.alpha * (a & x).len() as i64 - s.alpha);
        report.note(SLACK_AFTER_STEP, slack.map(|x| Witness::Set { set: x, required: p.value(x), actual: mm.sum(x) }));

        // Iterated functions agree with the stacked representation.
        if v.len() <= 10 {
            for (f1, fi) in p1.iter().zip(&cur.functions) {
                let st = stacked_oracle(f1, &acc, contracted)?;
                let bad = v.subsets().find(|&x| st.value(x) != fi.value(x));
                report.note(STACKED, bad.and_then(|x| step_fail(depth, format!("{x:?}"))));
            }
        }

        // Cumulative minimal maximizers, one family per input function.
        for (fam, f) in cumulative.iter_mut().zip(&cur.functions) {
            for x in scan_minimal_maximizers(f) {
                if !fam.contains(&x) {
                    fam.push(x);
                }
            }
            report.note(LAMINAR, crossing_pair(fam).map(|(x, y)| Witness::Sets { sets: vec![x, y] }));
        }

        if uniform {
            let q = QInstance::new(&p, mm)?;
            let props = q_support_properties(&q, a);
            report.note(SUPPORT, (!props.all()).then(|| step_fail(depth, format!("{props:?}"))).flatten());
        } else {
            let dd = Subset::from_indices(v.iter().filter(|&u| mm.get(u) == k));
            let fam = scan_minimal_maximizers(&p);
            let hits = fam.iter().all(|x| x.intersects(a));
            let ok = dd.is_subset_of(a) && hits && s.tight_degree == dd;
            report.note(SUPPORT, (!ok).then(|| step_fail(depth, "A misses a maximizer or a full-degree vertex")).flatten());
            if let Some(prev) = prev_d {
                report.note(PROGRESS, (!prev.is_subset_of(dd)).then(|| step_fail(depth, "full-degree set shrank")).flatten());
            }
            prev_d = Some(dd);
        }

        // Next call.
        let next = CallInput {
            functions: cur
                .functions
                .iter()
                .map(|f| next_function(f, a, s.alpha, s.contracted))
                .collect::<Result<_>>()?,
            m: match mm.decrease(a, s.alpha) {
                Ok(x) => x.remove(s.contracted),
                Err(_) => {
                    report.note(HYPOTHESES, step_fail(depth, "degree would go negative"));
                    return Ok(report);
                }
            },
        };
        let pn = next.p()?;
        let kn = if next.ground().is_empty() { 0 } else { pn.max_value() };
        let kn_actual = pn.max_value();
        report.note(K_SEQUENCE, (kn_actual != k - s.alpha).then(|| step_fail(depth, format!("K'' = {kn_actual}"))).flatten());
        if s.attains(1) != !s.contracted.is_empty() {
            report.note(PROGRESS, step_fail(depth, "α = α⁽¹⁾ exactly when a vertex is contracted"));
        }
        if !uniform && kn > 0 {
            let fam_next = scan_minimal_maximizers(&pn);
            if s.attains(2) && !s.attains(1) && fam_next.iter().all(|x| cumulative[0].contains(x)) {
                report.note(PROGRESS, step_fail(depth, "α = α⁽²⁾ < α⁽¹⁾ found no new maximizer"));
            }
            let d_after = Subset::from_indices(v.iter().filter(|&u| mm.get(u) - s.alpha * a.contains(u) as i64 == k - s.alpha));
            let dd = Subset::from_indices(v.iter().filter(|&u| mm.get(u) == k));
            if s.attains(3) && d_after == dd {
                report.note(PROGRESS, step_fail(depth, "α = α⁽³⁾ did not grow the full-degree set"));
            }
        }
        if uniform && kn > 0 {
            if s.contracted.is_empty() {
                let qn = QInstance::new(&pn, &next.m)?;
                let inside = is_member(&qn, &indicator(m.ground().universe_size(), a))?;
                report.note(LEAVES_Q, inside.then(|| step_fail(depth, format!("{a:?}"))).flatten());
            }
            let (t0, t1) = (mm.total(), next.m.total());
            let before = (Integer::div_floor(&t0, &k), Integer::div_ceil(&t0, &k));
            let after = (Integer::div_floor(&t1, &kn), Integer::div_ceil(&t1, &kn));
            let ok = if s.attains(5) { t1 % kn == 0 && t1 / kn != a.len() as i64 } else { before == after };
            report.note(RATIO, (!ok).then(|| step_fail(depth, format!("{t1}/{kn}"))).flatten());
        }
        acc.add_edge(a, s.alpha)?;
        contracted |= s.contracted;
        cur = next;
    }
    let final_k = cur.p()?.max_value();
    let done = cur.ground().is_empty() && (steps.is_empty() || final_k == 0);
    report.note(K_SEQUENCE, (!done).then(|| step_fail(trace.depth, format!("final K = {final_k}"))).flatten());
    let total: i64 = steps.iter().map(|s| s.alpha).sum();
    let k1 = functions.iter().map(|f| f.max_value()).max().unwrap_or(NEG_INF);
    report.note(TOTAL, (total != k1.max(0)).then_some(Witness::Bound { limit: k1, actual: total }));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover_basic::{weak_cover_basic, CoverInstance};
    use crate::sets::GroundSet;

    fn flat() -> CoverInstance {
        let g = GroundSet::indexed(5).unwrap();
        let v = g.members();
        let p = SetFunction::from_fn(g.clone(), |x| if x.is_empty() { 0 } else if x == v { 26 } else { 15 }).unwrap();
        CoverInstance::new(p, DegreeVector::constant(g, 15).unwrap()).unwrap()
    }

    #[test]
    fn solver_output_passes() {
        let inst = flat();
        let (h, trace) = weak_cover_basic(&inst).unwrap();
        let r = verify_cover(std::slice::from_ref(&inst.p), &inst.m, &h, Flavor::Weak, CoverMode::Basic).unwrap();
        assert!(r.passed(), "{r:?}");
        let a = audit_trace(std::slice::from_ref(&inst.p), &inst.m, &trace).unwrap();
        assert!(a.passed(), "{a:?}");
    }

    #[test]
    fn dropped_edge_fails_degrees() {
        let inst = flat();
        let (h, _) = weak_cover_basic(&inst).unwrap();
        let (e, _) = h.edges().next().unwrap();
        let kept = WeightedHypergraph::from_edges(h.vertices().clone(), h.edges().filter(|&(x, _)| x != e)).unwrap();
        let r = verify_cover(std::slice::from_ref(&inst.p), &inst.m, &kept, Flavor::Weak, CoverMode::Basic).unwrap();
        let c = r.check(DEGREES).unwrap();
        assert!(!c.passed);
        assert!(matches!(c.witness, Some(Witness::Vertex { vertex, .. }) if e.contains(vertex)));
    }

    #[test]
    fn raised_requirement_fails_cover() {
        let inst = flat();
        let (h, _) = weak_cover_basic(&inst).unwrap();
        let target = Subset::from_bits(0b00011);
        let bumped = SetFunction::from_fn(inst.p.ground().clone(), |x| {
            inst.p.value(x) + (x == target) as i64 * (h.coverage(target) - 15 + 1)
        })
        .unwrap();
        let r = verify_cover(&[bumped], &inst.m, &h, Flavor::Weak, CoverMode::Basic).unwrap();
        assert_eq!(r.check(WEAK).unwrap().witness, Some(Witness::Set { set: target, required: h.coverage(target) + 1, actual: h.coverage(target) }));
    }

    #[test]
    fn tampered_traces() {
        let inst = flat();
        let (_, trace) = weak_cover_basic(&inst).unwrap();
        let mut t = trace.clone();
        t.steps[0].alpha = 0;
        let r = audit_trace(std::slice::from_ref(&inst.p), &inst.m, &t).unwrap();
        assert!(!r.check(ALPHA_POSITIVE).unwrap().passed);
        let mut t = trace;
        if t.steps.len() > 1 {
            t.steps[1].k += 1;
        }
        let r = audit_trace(std::slice::from_ref(&inst.p), &inst.m, &t).unwrap();
        assert!(!r.check(K_SEQUENCE).unwrap().passed);
    }

    #[test]
    fn laminar_examples() {
        let s = Subset::from_bits;
        assert!(check_laminar(&[s(0b001), s(0b011), s(0b111)]));
        assert!(!check_laminar(&[s(0b011), s(0b110)]));
        assert!(projection_bound_holds(&[s(0b001), s(0b011), s(0b111)], s(0b001)));
    }
}
