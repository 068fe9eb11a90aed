//! Seeded random instances. Every generator draws from a caller-supplied
//! ChaCha stream, so a seed fixes the output.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::augmentation::{build_p_local, max_gap, min_degree_vector, PairTargets};
use crate::error::Result;
use crate::hypergraph::{MixedHypergraph, WeightedHypergraph};
use crate::sets::{DegreeVector, GroundSet, SetFunction, Subset};

/// Largest target drawn by the generators; keeps function values ≤ 50.
pub const MAX_TARGET: i64 = 50;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ground(n: usize) -> Result<GroundSet> {
    GroundSet::new((0..n).map(|i| format!("v{i}")))
}

fn random_set(n: usize, size: usize, rng: &mut ChaCha8Rng) -> Subset {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    Subset::from_indices(idx.into_iter().take(size))
}

/// About `density * n` hyperedges of size 2..=4 (capped at `n`) with weights 1..=3.
pub fn random_hypergraph(g: &GroundSet, density: f64, rng: &mut ChaCha8Rng) -> Result<WeightedHypergraph> {
    let n = g.len();
    let mut h = WeightedHypergraph::new(g.clone());
    if n < 2 {
        return Ok(h);
    }
    let count = (density * n as f64).round() as usize;
    for _ in 0..count {
        let size = rng.gen_range(2..=n.min(4));
        let e = random_set(n, size, rng);
        h.add_edge(e, rng.gen_range(1..=3))?;
    }
    Ok(h)
}

/// Each pair gets a target with probability `density`, drawn from `1..=max`.
pub fn random_targets(n: usize, density: f64, max: i64, rng: &mut ChaCha8Rng) -> PairTargets {
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                out.push((u, v, rng.gen_range(1..=max)));
            }
        }
    }
    if out.is_empty() && n >= 2 {
        out.push((0, 1, rng.gen_range(1..=max)));
    }
    out
}

/// Lower targets so that the largest gap `r - λ` equals `gap` exactly.
pub fn match_gap(g: &WeightedHypergraph, r: &mut PairTargets, gap: i64) -> Result<()> {
    for t in r.iter_mut() {
        let lam = g.min_cut(t.0, t.1)?;
        t.2 = t.2.min(lam + gap);
    }
    if max_gap(g, r)? < gap {
        let (u, v) = (r[0].0, r[0].1);
        r[0].2 = g.min_cut(u, v)? + gap;
    }
    Ok(())
}

/// A random local augmentation instance `(G, r)` on `n` vertices.
pub fn random_local(n: usize, density: f64, rng: &mut ChaCha8Rng) -> Result<(WeightedHypergraph, PairTargets)> {
    let g = ground(n)?;
    let h = random_hypergraph(&g, density, rng)?;
    let cap = rng.gen_range(10..=MAX_TARGET);
    Ok((h, random_targets(n, 0.5, cap, rng)))
}

/// Symmetric skew-supermodular `R - d_G` from a random local instance.
pub fn symmetric_function(n: usize, density: f64, rng: &mut ChaCha8Rng) -> Result<SetFunction> {
    let (h, r) = random_local(n, density, rng)?;
    build_p_local(&h, &r)
}

/// `R - d_G - b_H`: skew-supermodular and in general not symmetric.
pub fn skew_function(n: usize, density: f64, rng: &mut ChaCha8Rng) -> Result<SetFunction> {
    let p = symmetric_function(n, density, rng)?;
    let extra = random_hypergraph(p.ground(), density / 2.0, rng)?;
    let h = WeightedHypergraph::from_edges(p.ground().clone(), extra.edges().map(|(e, w)| (e, w.min(2))))?;
    p.minus_coverage(&h)?.tabulate()
}

/// Two symmetric functions with the same maximum.
pub fn symmetric_pair(n: usize, density: f64, rng: &mut ChaCha8Rng) -> Result<(SetFunction, SetFunction)> {
    let (g1, r1) = random_local(n, density, rng)?;
    let (g2, mut r2) = random_local(n, density, rng)?;
    match_gap(&g2, &mut r2, max_gap(&g1, &r1)?)?;
    Ok((build_p_local(&g1, &r1)?, build_p_local(&g2, &r2)?))
}

/// Raise a feasible `m` at random vertices while staying at most `K_p`.
pub fn raise(m: &DegreeVector, k: i64, rng: &mut ChaCha8Rng) -> Result<DegreeVector> {
    let vals: Vec<i64> = m
        .member_values()
        .iter()
        .map(|&v| if v < k && rng.gen_bool(0.5) { rng.gen_range(v..=k) } else { v })
        .collect();
    DegreeVector::new(m.ground().clone(), &vals)
}

/// The minimum degree vector, randomly raised.
pub fn feasible_degrees(p: &SetFunction, rng: &mut ChaCha8Rng) -> Result<DegreeVector> {
    raise(&min_degree_vector(p)?, p.max_value().max(0), rng)
}

/// Uniform random degrees in `0..=K_p`; usually infeasible.
pub fn random_degrees(p: &SetFunction, rng: &mut ChaCha8Rng) -> Result<DegreeVector> {
    let k = p.max_value().max(0);
    let vals: Vec<i64> = (0..p.ground().len()).map(|_| rng.gen_range(0..=k)).collect();
    DegreeVector::new(p.ground().clone(), &vals)
}

/// One to three areas of size `1..n`, targets `1..=15`.
pub fn random_areas(n: usize, rng: &mut ChaCha8Rng) -> Vec<(Subset, i64)> {
    let count = rng.gen_range(1..=3);
    (0..count)
        .map(|_| {
            let size = rng.gen_range(1..n.max(2));
            (random_set(n, size.min(n), rng), rng.gen_range(1..=15))
        })
        .collect()
}

/// Random hyperarcs of the three kinds (directed, partly directed, undirected).
pub fn random_mixed(n: usize, density: f64, rng: &mut ChaCha8Rng) -> Result<MixedHypergraph> {
    let g = ground(n)?;
    let mut mixed = MixedHypergraph::new(g);
    let count = (density * n as f64).round() as usize;
    for _ in 0..count {
        let size = rng.gen_range(2..=n.min(4));
        let mut members: Vec<usize> = random_set(n, size, rng).iter().collect();
        members.shuffle(rng);
        let w = rng.gen_range(1..=3);
        let (tails, heads, ht) = match rng.gen_range(0..3) {
            0 => {
                let cut = rng.gen_range(1..members.len());
                (&members[..cut], &members[cut..], &members[..0])
            }
            1 => (&members[..1], &members[..0], &members[1..]),
            _ => (&members[..0], &members[..0], &members[..]),
        };
        let s = |v: &[usize]| Subset::from_indices(v.iter().copied());
        mixed.add_arc(s(tails), s(heads), s(ht), w)?;
    }
    Ok(mixed)
}

/// Laminar family built by recursive splitting.
pub fn random_laminar(n: usize, rng: &mut ChaCha8Rng) -> Vec<Subset> {
    fn split(set: Vec<usize>, rng: &mut ChaCha8Rng, out: &mut Vec<Subset>) {
        if set.is_empty() {
            return;
        }
        if rng.gen_bool(0.7) {
            out.push(Subset::from_indices(set.iter().copied()));
        }
        if set.len() == 1 {
            return;
        }
        let mut set = set;
        set.shuffle(rng);
        let cut = rng.gen_range(0..set.len());
        let (a, b) = set.split_at(cut);
        split(a.to_vec(), rng, out);
        split(b.to_vec(), rng, out);
    }
    let mut out = Vec::new();
    split((0..n).collect(), rng, &mut out);
    out.sort_by_key(|s| s.bits());
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute;
    use crate::verify::check_laminar;

    #[test]
    fn generated_functions_are_skew_supermodular() {
        let mut r = rng(7);
        for n in 2..=6 {
            let p = skew_function(n, 1.0, &mut r).unwrap();
            assert!(brute::skew_violation(&p).is_none());
            let (q, s) = symmetric_pair(n, 1.0, &mut r).unwrap();
            assert!(q.is_symmetric() && s.is_symmetric());
            assert_eq!(q.max_value(), s.max_value());
            assert!(p.max_value() <= MAX_TARGET);
        }
    }

    #[test]
    fn seeds_repeat() {
        let a = skew_function(5, 1.0, &mut rng(3)).unwrap();
        let b = skew_function(5, 1.0, &mut rng(3)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn laminar_families() {
        let mut r = rng(1);
        for n in 1..=8 {
            assert!(check_laminar(&random_laminar(n, &mut r)));
        }
    }
}
