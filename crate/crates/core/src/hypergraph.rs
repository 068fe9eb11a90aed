//! Weighted hypergraphs and mixed hypergraphs: coverage, cuts, in-cuts and
//! exhaustive connectivity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{check_value, GroundSet, Subset};

/// Vertex set plus hyperedges with positive integer weights. Hyperedges are
/// stored as bitmasks in a sorted map, so repeated edges merge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedHypergraph {
    vertices: GroundSet,
    edges: BTreeMap<Subset, i64>,
}

impl WeightedHypergraph {
    pub fn new(vertices: GroundSet) -> Self {
        WeightedHypergraph { vertices, edges: BTreeMap::new() }
    }

    pub fn from_edges(vertices: GroundSet, edges: impl IntoIterator<Item = (Subset, i64)>) -> Result<Self> {
        let mut h = Self::new(vertices);
        for (e, w) in edges {
            h.add_edge(e, w)?;
        }
        Ok(h)
    }

    pub fn vertices(&self) -> &GroundSet {
        &self.vertices
    }

    pub fn add_edge(&mut self, e: Subset, w: i64) -> Result<()> {
        if e.is_empty() {
            return Err(Error::InvalidEdge("empty hyperedge".into()));
        }
        if let Some(i) = (e - self.vertices.members()).first() {
            return Err(Error::InvalidEdge(format!("element {i} is not a vertex")));
        }
        if w < 1 {
            return Err(Error::InvalidWeight(w));
        }
        let slot = self.edges.entry(e).or_insert(0);
        *slot = check_value(*slot as i128 + w as i128)?;
        Ok(())
    }

    pub fn edges(&self) -> impl Iterator<Item = (Subset, i64)> + '_ {
        self.edges.iter().map(|(&e, &w)| (e, w))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn weight(&self, e: Subset) -> i64 {
        self.edges.get(&e).copied().unwrap_or(0)
    }

    pub fn total_weight(&self) -> i64 {
        self.edges.values().sum()
    }

    /// `b(X)`: weight of hyperedges meeting `X`.
    pub fn coverage(&self, x: Subset) -> i64 {
        self.edges.iter().filter(|(e, _)| e.intersects(x)).map(|(_, w)| w).sum()
    }

    /// `d(X)`: weight of hyperedges meeting both `X` and its complement.
    pub fn cut(&self, x: Subset) -> i64 {
        self.edges
            .iter()
            .filter(|(&e, _)| e.intersects(x) && !e.is_subset_of(x))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn degree(&self, u: usize) -> i64 {
        self.coverage(Subset::singleton(u))
    }

    /// Degrees of all vertices, universe-indexed.
    pub fn degrees(&self) -> Vec<i64> {
        let mut deg = vec![0; self.vertices.universe_size()];
        for (e, w) in self.edges() {
            for u in e.iter() {
                deg[u] += w;
            }
        }
        deg
    }

    pub fn add(&self, other: &WeightedHypergraph) -> Result<Self> {
        if self.vertices != other.vertices {
            return Err(Error::GroundMismatch);
        }
        let mut out = self.clone();
        for (e, w) in other.edges() {
            out.add_edge(e, w)?;
        }
        Ok(out)
    }

    pub fn edge_sizes(&self) -> Vec<usize> {
        self.edges.keys().map(|e| e.len()).collect()
    }

    /// `λ(u, v) = min{d(X) : u ∈ X ⊆ V − v}`, by enumeration.
    pub fn min_cut(&self, u: usize, v: usize) -> Result<i64> {
        self.vertices.check(Subset::singleton(u) | Subset::singleton(v))?;
        if u == v {
            return Err(Error::Invalid("min_cut needs two distinct vertices".into()));
        }
        self.min_cut_to_area(u, Subset::singleton(v))
    }

    /// `λ(u, W) = min{d(X) : u ∈ X ⊆ V − W}`.
    pub fn min_cut_to_area(&self, u: usize, w: Subset) -> Result<i64> {
        self.vertices.check(w | Subset::singleton(u))?;
        if w.is_empty() {
            return Err(Error::Invalid("area is empty".into()));
        }
        if w.contains(u) {
            return Err(Error::Invalid(format!("vertex {u} lies in the area")));
        }
        let su = Subset::singleton(u);
        let free = self.vertices.members() - w - su;
        Ok(free.subsets().map(|r| self.cut(r | su)).min().unwrap_or(0))
    }

    pub fn to_json(&self) -> HypergraphJson {
        HypergraphJson {
            vertices: self.vertices.names(self.vertices.members()),
            edges: self
                .edges()
                .map(|(e, w)| EdgeJson { vs: self.vertices.names(e), w })
                .collect(),
        }
    }

    pub fn from_json(j: &HypergraphJson) -> Result<Self> {
        let vertices = GroundSet::new(j.vertices.iter().cloned())?;
        Self::from_json_on(&vertices, &j.edges)
    }

    pub fn from_json_on(vertices: &GroundSet, edges: &[EdgeJson]) -> Result<Self> {
        let mut h = Self::new(vertices.clone());
        for e in edges {
            h.add_edge(vertices.subset(&e.vs)?, e.w)?;
        }
        Ok(h)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub vs: Vec<String>,
    pub w: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeJson>,
}

// ---------------------------------------------------------------------------
// Mixed hypergraphs

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hyperarc {
    pub tails: Subset,
    pub heads: Subset,
    pub heads_tails: Subset,
    pub weight: i64,
}

impl Hyperarc {
    /// Hyperarc enters `X` if its heads side meets `X` and its tails side
    /// meets the complement.
    pub fn enters(&self, x: Subset, complement: Subset) -> bool {
        (self.heads | self.heads_tails).intersects(x) && (self.tails | self.heads_tails).intersects(complement)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedHypergraph {
    vertices: GroundSet,
    arcs: Vec<Hyperarc>,
}

impl MixedHypergraph {
    pub fn new(vertices: GroundSet) -> Self {
        MixedHypergraph { vertices, arcs: Vec::new() }
    }

    pub fn vertices(&self) -> &GroundSet {
        &self.vertices
    }

    pub fn arcs(&self) -> &[Hyperarc] {
        &self.arcs
    }

    pub fn add_arc(&mut self, tails: Subset, heads: Subset, heads_tails: Subset, weight: i64) -> Result<()> {
        self.vertices.check(tails | heads | heads_tails)?;
        if tails.intersects(heads) || tails.intersects(heads_tails) || heads.intersects(heads_tails) {
            return Err(Error::InvalidEdge("tails, heads and heads-tails must be disjoint".into()));
        }
        if (tails | heads_tails).is_empty() || (heads | heads_tails).is_empty() {
            return Err(Error::InvalidEdge("hyperarc needs a tail side and a head side".into()));
        }
        if weight < 1 {
            return Err(Error::InvalidWeight(weight));
        }
        check_value(weight as i128)?;
        self.arcs.push(Hyperarc { tails, heads, heads_tails, weight });
        Ok(())
    }

    /// Add every hyperedge of `h` as an undirected hyperarc.
    pub fn with_undirected(&self, h: &WeightedHypergraph) -> Result<Self> {
        if !self.vertices.same_universe(h.vertices()) || self.vertices.members() != h.vertices().members() {
            return Err(Error::GroundMismatch);
        }
        let mut out = self.clone();
        for (e, w) in h.edges() {
            out.add_arc(Subset::EMPTY, Subset::EMPTY, e, w)?;
        }
        Ok(out)
    }

    /// `d^in(X)`.
    pub fn in_cut(&self, x: Subset) -> i64 {
        let comp = self.vertices.members() - x;
        self.arcs.iter().filter(|a| a.enters(x, comp)).map(|a| a.weight).sum()
    }

    /// `λ(u, v) = min{d^in(X) : v ∈ X ⊆ V − u}`: connectivity from `u` to `v`.
    pub fn arc_connectivity(&self, u: usize, v: usize) -> Result<i64> {
        self.vertices.check(Subset::singleton(u) | Subset::singleton(v))?;
        if u == v {
            return Err(Error::Invalid("connectivity needs two distinct vertices".into()));
        }
        let sv = Subset::singleton(v);
        let free = self.vertices.members() - sv - Subset::singleton(u);
        Ok(free.subsets().map(|r| self.in_cut(r | sv)).min().unwrap_or(0))
    }

    pub fn to_json(&self) -> MixedJson {
        let names = |s| self.vertices.names(s);
        MixedJson {
            vertices: names(self.vertices.members()),
            arcs: self
                .arcs
                .iter()
                .map(|a| ArcJson { tails: names(a.tails), heads: names(a.heads), ht: names(a.heads_tails), w: a.weight })
                .collect(),
        }
    }

    pub fn from_json(j: &MixedJson) -> Result<Self> {
        let vertices = GroundSet::new(j.vertices.iter().cloned())?;
        Self::from_json_on(&vertices, &j.arcs)
    }

    pub fn from_json_on(vertices: &GroundSet, arcs: &[ArcJson]) -> Result<Self> {
        let mut m = Self::new(vertices.clone());
        for a in arcs {
            m.add_arc(vertices.subset(&a.tails)?, vertices.subset(&a.heads)?, vertices.subset(&a.ht)?, a.w)?;
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcJson {
    #[serde(default)]
    pub tails: Vec<String>,
    #[serde(default)]
    pub heads: Vec<String>,
    #[serde(default)]
    pub ht: Vec<String>,
    pub w: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedJson {
    pub vertices: Vec<String>,
    pub arcs: Vec<ArcJson>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ground(n: usize) -> GroundSet {
        GroundSet::indexed(n).unwrap()
    }

    fn arb_graph(n: usize, max_edges: usize) -> impl Strategy<Value = WeightedHypergraph> {
        prop::collection::vec((1u32..(1 << n), 1i64..6), 0..=max_edges).prop_map(move |es| {
            WeightedHypergraph::from_edges(ground(n), es.into_iter().map(|(e, w)| (Subset::from_bits(e), w))).unwrap()
        })
    }

    #[test]
    fn coverage_basics() {
        let g = ground(4);
        let mut h = WeightedHypergraph::new(g.clone());
        assert_eq!(h.coverage(Subset::EMPTY), 0);
        h.add_edge(g.members(), 5).unwrap();
        assert_eq!(h.coverage(Subset::singleton(2)), 5);
        assert_eq!(h.min_cut(0, 1).unwrap(), 5);
    }

    #[test]
    fn singleton_edge_has_no_cut() {
        let mut h = WeightedHypergraph::new(ground(3));
        h.add_edge(Subset::singleton(1), 4).unwrap();
        assert_eq!(h.cut(Subset::singleton(1)), 0);
        assert_eq!(h.coverage(Subset::singleton(1)), 4);
    }

    #[test]
    fn merge_weights() {
        let g = ground(3);
        let ab = Subset::from_bits(0b011);
        let h1 = WeightedHypergraph::from_edges(g.clone(), [(ab, 2)]).unwrap();
        let h2 = WeightedHypergraph::from_edges(g.clone(), [(ab, 3)]).unwrap();
        assert_eq!(h1.add(&h2).unwrap().weight(ab), 5);
        assert_eq!(h1.add(&WeightedHypergraph::new(g)).unwrap(), h1);
        assert_eq!(h1.add(&WeightedHypergraph::new(ground(4))), Err(Error::GroundMismatch));
    }

    #[test]
    fn invalid_edges() {
        let mut h = WeightedHypergraph::new(ground(2));
        assert!(h.add_edge(Subset::EMPTY, 1).is_err());
        assert!(h.add_edge(Subset::singleton(3), 1).is_err());
        assert_eq!(h.add_edge(Subset::singleton(0), 0), Err(Error::InvalidWeight(0)));
    }

    #[test]
    fn empty_graph_cut() {
        let h = WeightedHypergraph::new(ground(3));
        assert_eq!(h.min_cut(0, 2).unwrap(), 0);
        assert!(h.min_cut_to_area(0, Subset::EMPTY).is_err());
        assert!(h.min_cut_to_area(0, Subset::from_bits(0b11)).is_err());
    }

    #[test]
    fn directed_arc() {
        let mut m = MixedHypergraph::new(ground(2));
        m.add_arc(Subset::singleton(0), Subset::singleton(1), Subset::EMPTY, 3).unwrap();
        assert_eq!(m.in_cut(Subset::singleton(1)), 3);
        assert_eq!(m.in_cut(Subset::singleton(0)), 0);
        assert_eq!(m.in_cut(Subset::EMPTY), 0);
        assert_eq!(m.arc_connectivity(0, 1).unwrap(), 3);
        assert_eq!(m.arc_connectivity(1, 0).unwrap(), 0);
    }

    #[test]
    fn arc_invariants() {
        let mut m = MixedHypergraph::new(ground(3));
        assert!(m.add_arc(Subset::singleton(0), Subset::singleton(0), Subset::EMPTY, 1).is_err());
        assert!(m.add_arc(Subset::EMPTY, Subset::singleton(0), Subset::EMPTY, 1).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let g = ground(3);
        let h = WeightedHypergraph::from_edges(g, [(Subset::from_bits(0b101), 2), (Subset::from_bits(0b010), 1)]).unwrap();
        let back = WeightedHypergraph::from_json(&h.to_json()).unwrap();
        assert_eq!(h, back);
    }

    proptest! {
        #[test]
        fn coverage_matches_recount(h in arb_graph(5, 6)) {
            for x in h.vertices().subsets() {
                let mut b = 0;
                let mut d = 0;
                for (e, w) in h.edges() {
                    if (0..5).any(|i| e.contains(i) && x.contains(i)) {
                        b += w;
                        if (0..5).any(|i| e.contains(i) && !x.contains(i)) {
                            d += w;
                        }
                    }
                }
                prop_assert_eq!(h.coverage(x), b);
                prop_assert_eq!(h.cut(x), d);
            }
        }

        #[test]
        fn cut_symmetric_submodular(h in arb_graph(5, 6)) {
            let v = h.vertices().members();
            for x in v.subsets() {
                prop_assert_eq!(h.cut(x), h.cut(v - x));
                for y in v.subsets() {
                    prop_assert!(h.cut(x) + h.cut(y) >= h.cut(x & y) + h.cut(x | y));
                    prop_assert!(h.coverage(x) + h.coverage(y) >= h.coverage(x & y) + h.coverage(x | y));
                    if x.is_subset_of(y) {
                        prop_assert!(h.coverage(x) <= h.coverage(y));
                    }
                }
            }
        }

        #[test]
        fn coverage_distributes(h1 in arb_graph(5, 5), h2 in arb_graph(5, 5)) {
            let s = h1.add(&h2).unwrap();
            prop_assert!(s.edges().all(|(_, w)| w >= 1));
            for x in s.vertices().subsets() {
                prop_assert_eq!(s.coverage(x), h1.coverage(x) + h2.coverage(x));
            }
        }

        #[test]
        fn min_cut_matches_scan(h in arb_graph(6, 8), u in 0usize..6, v in 0usize..6) {
            prop_assume!(u != v);
            let mut best = i64::MAX;
            for x in 0u32..64 {
                if x >> u & 1 == 1 && x >> v & 1 == 0 {
                    best = best.min(h.cut(Subset::from_bits(x)));
                }
            }
            prop_assert_eq!(h.min_cut(u, v).unwrap(), best);
            prop_assert_eq!(h.min_cut(v, u).unwrap(), best);
            prop_assert_eq!(h.min_cut_to_area(u, Subset::singleton(v)).unwrap(), best);
        }

        #[test]
        fn undirected_embedding(h in arb_graph(5, 6)) {
            let m = MixedHypergraph::new(h.vertices().clone()).with_undirected(&h).unwrap();
            for x in h.vertices().subsets() {
                prop_assert_eq!(m.in_cut(x), h.cut(x));
            }
        }
    }
}
