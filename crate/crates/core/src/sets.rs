//! Ground sets, bitmask subsets, degree vectors and composable integer set
//! functions.
//!
//! Every subset is a bitmask over a fixed *universe* of labelled elements.
//! A [`GroundSet`] is the universe together with the members that are still
//! present, so contraction can drop elements without renumbering anything.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, Not, Sub, SubAssign};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hypergraph::WeightedHypergraph;

/// Default bound on the number of elements for anything that enumerates 2^V.
pub const DEFAULT_CAP: usize = 20;
/// Hard limit; tables are indexed by `u32` masks and must fit in memory.
pub const HARD_CAP: usize = 26;
/// Largest magnitude accepted for function values and weights.
pub const VALUE_LIMIT: i64 = 1 << 48;
/// Minus infinity. Loses every max and absorbs every addition.
pub const NEG_INF: i64 = i64::MIN;

/// Enumeration cap from `HYPERCOVER_CAP`, falling back to [`DEFAULT_CAP`].
pub fn configured_cap() -> usize {
    std::env::var("HYPERCOVER_CAP")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .map(|c| c.min(HARD_CAP))
        .unwrap_or(DEFAULT_CAP)
}

pub fn check_value(v: i128) -> Result<i64> {
    if v.abs() > VALUE_LIMIT as i128 {
        Err(Error::ValueOutOfRange(v))
    } else {
        Ok(v as i64)
    }
}

#[inline]
pub fn sat_add(a: i64, b: i64) -> i64 {
    if a == NEG_INF || b == NEG_INF {
        NEG_INF
    } else {
        a + b
    }
}

// ---------------------------------------------------------------------------
// Subset

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < 32);
        Subset(1 << i)
    }

    /// `{0, .., n-1}`
    pub fn full(n: usize) -> Self {
        if n >= 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(Subset::EMPTY, |s, i| s.with(i))
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    /// Neither nested nor disjoint.
    pub fn overlaps_properly(self, other: Subset) -> bool {
        self.intersects(other) && !self.is_subset_of(other) && !other.is_subset_of(self)
    }

    #[inline]
    pub fn with(self, i: usize) -> Self {
        Subset(self.0 | 1 << i)
    }

    #[inline]
    pub fn without(self, i: usize) -> Self {
        Subset(self.0 & !(1 << i))
    }

    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    /// All subsets of `self` in increasing bitmask order, from `∅` to `self`.
    pub fn subsets(self) -> Submasks {
        Submasks { mask: self.0, next: Some(0) }
    }

    /// Sum of `w` over the members.
    pub fn weight(self, w: &[i64]) -> i64 {
        self.iter().map(|i| w[i]).sum()
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl BitOr for Subset {
    type Output = Subset;
    fn bitor(self, rhs: Subset) -> Subset {
        Subset(self.0 | rhs.0)
    }
}

impl BitAnd for Subset {
    type Output = Subset;
    fn bitand(self, rhs: Subset) -> Subset {
        Subset(self.0 & rhs.0)
    }
}

impl Sub for Subset {
    type Output = Subset;
    fn sub(self, rhs: Subset) -> Subset {
        Subset(self.0 & !rhs.0)
    }
}

impl Not for Subset {
    type Output = Subset;
    fn not(self) -> Subset {
        Subset(!self.0)
    }
}

impl BitOrAssign for Subset {
    fn bitor_assign(&mut self, rhs: Subset) {
        self.0 |= rhs.0;
    }
}

impl BitAndAssign for Subset {
    fn bitand_assign(&mut self, rhs: Subset) {
        self.0 &= rhs.0;
    }
}

impl SubAssign for Subset {
    fn sub_assign(&mut self, rhs: Subset) {
        self.0 &= !rhs.0;
    }
}

pub struct Elements(u32);

impl Iterator for Elements {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(i as usize)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

pub struct Submasks {
    mask: u32,
    next: Option<u32>,
}

impl Iterator for Submasks {
    type Item = Subset;
    fn next(&mut self) -> Option<Subset> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            Some((cur | !self.mask).wrapping_add(1) & self.mask)
        };
        Some(Subset(cur))
    }
}

// ---------------------------------------------------------------------------
// Integer-or-infinity

/// An integer or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Finite(i64),
    Infinite,
}

impl Bound {
    pub fn finite(self) -> Option<i64> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Bound::Infinite)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(v) => s.serialize_i64(*v),
            Bound::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(v) => Ok(Bound::Finite(v)),
            Repr::Text(s) if s == "inf" => Ok(Bound::Infinite),
            Repr::Text(s) => Err(serde::de::Error::custom(format!("expected integer or \"inf\", got {s:?}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Ground sets

#[derive(Clone)]
pub struct GroundSet {
    labels: Arc<[String]>,
    members: Subset,
}

impl PartialEq for GroundSet {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && (Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels)
    }
}

impl Eq for GroundSet {}

impl fmt::Debug for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.members.iter().map(|i| &self.labels[i])).finish()
    }
}

impl GroundSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() > HARD_CAP {
            return Err(Error::CapExceeded { n: labels.len(), cap: HARD_CAP });
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let members = Subset::full(labels.len());
        Ok(GroundSet { labels: labels.into(), members })
    }

    /// Elements labelled `v0`, `v1`, ...
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("v{i}")))
    }

    /// Number of elements in the underlying universe (present or not).
    pub fn universe_size(&self) -> usize {
        self.labels.len()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> Subset {
        self.members
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Same universe, members shrunk to `members ∖ z`.
    pub fn remove(&self, z: Subset) -> GroundSet {
        GroundSet { labels: self.labels.clone(), members: self.members - z }
    }

    /// The full universe this ground set lives in.
    pub fn universe(&self) -> GroundSet {
        GroundSet { labels: self.labels.clone(), members: Subset::full(self.labels.len()) }
    }

    pub fn same_universe(&self, other: &GroundSet) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }

    pub fn complement(&self, x: Subset) -> Subset {
        self.members - x
    }

    pub fn contains(&self, x: Subset) -> bool {
        x.is_subset_of(self.members)
    }

    pub fn check(&self, x: Subset) -> Result<()> {
        match (x - self.members).first() {
            None => Ok(()),
            Some(i) => Err(Error::OutsideGround(i)),
        }
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        if self.universe_size() > cap {
            Err(Error::CapExceeded { n: self.universe_size(), cap })
        } else {
            Ok(())
        }
    }

    /// All subsets of the members, increasing bitmask order.
    pub fn subsets(&self) -> Submasks {
        self.members.subsets()
    }

    pub fn subset<S: AsRef<str>>(&self, labels: &[S]) -> Result<Subset> {
        let mut s = Subset::EMPTY;
        for l in labels {
            let i = self.index_of(l.as_ref()).ok_or_else(|| Error::UnknownLabel(l.as_ref().to_string()))?;
            if !self.members.contains(i) {
                return Err(Error::OutsideGround(i));
            }
            s = s.with(i);
        }
        Ok(s)
    }

    pub fn names(&self, x: Subset) -> Vec<String> {
        x.iter().map(|i| self.labels[i].clone()).collect()
    }
}

// ---------------------------------------------------------------------------
// Degree vectors

#[derive(Clone, PartialEq, Eq)]
pub struct DegreeVector {
    ground: GroundSet,
    values: Vec<i64>,
}

impl fmt::Debug for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.ground.members().iter().map(|i| (self.ground.label(i), self.values[i])))
            .finish()
    }
}

impl DegreeVector {
    /// `values` lists one entry per member of `ground`, in index order.
    pub fn new(ground: GroundSet, values: &[i64]) -> Result<Self> {
        if values.len() != ground.len() {
            return Err(Error::Invalid(format!(
                "degree vector has {} entries for {} elements",
                values.len(),
                ground.len()
            )));
        }
        let mut full = vec![0; ground.universe_size()];
        for (i, &v) in ground.members().iter().zip(values) {
            if v < 0 {
                return Err(Error::Invalid(format!("negative degree {v} at {}", ground.label(i))));
            }
            full[i] = check_value(v as i128)?;
        }
        Ok(DegreeVector { ground, values: full })
    }

    pub fn constant(ground: GroundSet, v: i64) -> Result<Self> {
        let vals = vec![v; ground.len()];
        Self::new(ground, &vals)
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    #[inline]
    pub fn get(&self, u: usize) -> i64 {
        self.values[u]
    }

    /// Universe-indexed values; zero outside the ground set.
    pub fn as_slice(&self) -> &[i64] {
        &self.values
    }

    /// Values of the members, index order.
    pub fn member_values(&self) -> Vec<i64> {
        self.ground.members().iter().map(|i| self.values[i]).collect()
    }

    pub fn sum(&self, x: Subset) -> i64 {
        (x & self.ground.members()).weight(&self.values)
    }

    pub fn total(&self) -> i64 {
        self.sum(self.ground.members())
    }

    pub fn max(&self) -> i64 {
        self.ground.members().iter().map(|i| self.values[i]).max().unwrap_or(0)
    }

    pub fn support(&self) -> Subset {
        Subset::from_indices(self.ground.members().iter().filter(|&i| self.values[i] > 0))
    }

    pub fn with_value(&self, u: usize, v: i64) -> Result<Self> {
        self.ground.check(Subset::singleton(u))?;
        if v < 0 {
            return Err(Error::Invalid(format!("negative degree {v}")));
        }
        let mut out = self.clone();
        out.values[u] = v;
        Ok(out)
    }

    /// Drop the elements of `z`.
    pub fn remove(&self, z: Subset) -> Self {
        let ground = self.ground.remove(z);
        let mut values = self.values.clone();
        for i in z.iter() {
            if i < values.len() {
                values[i] = 0;
            }
        }
        DegreeVector { ground, values }
    }

    /// `m - alpha * χ_a`; errors if an entry would become negative.
    pub fn decrease(&self, a: Subset, alpha: i64) -> Result<Self> {
        self.ground.check(a)?;
        let mut out = self.clone();
        for i in a.iter() {
            out.values[i] -= alpha;
            if out.values[i] < 0 {
                return Err(Error::Hypothesis(format!("degree of {} would become negative", self.ground.label(i))));
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Set functions

type Evaluator = dyn Fn(Subset) -> i64 + Send + Sync;

#[derive(Clone)]
enum Node {
    Table(Arc<Vec<i64>>),
    Modular(Arc<Vec<i64>>),
    Contract(SetFunction, Subset),
    Restrict(SetFunction),
    MinusCoverage(SetFunction, WeightedHypergraph),
    MinusCut(SetFunction, WeightedHypergraph),
    Max(SetFunction, SetFunction),
    Symmetrize(SetFunction),
    Custom(&'static str, Arc<Evaluator>),
}

/// An integer-valued function on the subsets of its ground set.
#[derive(Clone)]
pub struct SetFunction {
    ground: GroundSet,
    node: Arc<Node>,
}

impl fmt::Debug for SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &*self.node {
            Node::Table(_) => "table",
            Node::Modular(_) => "modular",
            Node::Contract(..) => "contract",
            Node::Restrict(_) => "restrict",
            Node::MinusCoverage(..) => "minus_coverage",
            Node::MinusCut(..) => "minus_cut",
            Node::Max(..) => "max",
            Node::Symmetrize(_) => "symmetrize",
            Node::Custom(name, _) => name,
        };
        write!(f, "SetFunction({kind} on {:?})", self.ground)
    }
}

impl SetFunction {
    /// Table indexed by universe bitmask; must have `2^universe` entries.
    pub fn from_table(ground: GroundSet, values: Vec<i64>) -> Result<Self> {
        ground.check_cap(HARD_CAP)?;
        if values.len() != 1usize << ground.universe_size() {
            return Err(Error::Invalid(format!(
                "table has {} entries, expected {}",
                values.len(),
                1usize << ground.universe_size()
            )));
        }
        for x in ground.subsets() {
            let v = values[x.index()];
            if v != NEG_INF {
                check_value(v as i128)?;
            }
        }
        Ok(SetFunction { ground, node: Arc::new(Node::Table(Arc::new(values))) })
    }

    /// Tabulate `f` over the subsets of `ground`.
    pub fn from_fn(ground: GroundSet, f: impl Fn(Subset) -> i64) -> Result<Self> {
        let mut values = vec![0; 1usize << ground.universe_size()];
        for x in ground.subsets() {
            values[x.index()] = f(x);
        }
        Self::from_table(ground, values)
    }

    /// A lazily evaluated function; `f` is called on every evaluation.
    pub fn lazy(ground: GroundSet, name: &'static str, f: impl Fn(Subset) -> i64 + Send + Sync + 'static) -> Self {
        SetFunction { ground, node: Arc::new(Node::Custom(name, Arc::new(f))) }
    }

    pub fn zero(ground: GroundSet) -> Self {
        Self::modular(ground.clone(), &vec![0; ground.universe_size()]).expect("zero weights are in range")
    }

    /// `f(X) = Σ_{u∈X} w(u)`, `w` universe-indexed.
    pub fn modular(ground: GroundSet, w: &[i64]) -> Result<Self> {
        if w.len() != ground.universe_size() {
            return Err(Error::Invalid("weight vector length differs from universe size".into()));
        }
        for &v in w {
            check_value(v as i128)?;
        }
        Ok(SetFunction { ground, node: Arc::new(Node::Modular(Arc::new(w.to_vec()))) })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(&*self.node, Node::Table(_))
    }

    pub fn evaluate(&self, x: Subset) -> Result<i64> {
        self.ground.check(x)?;
        Ok(self.value(x))
    }

    /// Unchecked evaluation; `x` must be a subset of the ground set.
    pub fn value(&self, x: Subset) -> i64 {
        match &*self.node {
            Node::Table(t) => t[x.index()],
            Node::Modular(w) => x.weight(w),
            Node::Contract(f, z) => z.subsets().map(|r| f.value(x | r)).max().unwrap_or(NEG_INF),
            Node::Restrict(f) => f.value(x),
            Node::MinusCoverage(f, h) => {
                let v = f.value(x);
                if v == NEG_INF {
                    v
                } else {
                    v - h.coverage(x)
                }
            }
            Node::MinusCut(f, h) => {
                let v = f.value(x);
                if v == NEG_INF {
                    v
                } else {
                    v - h.cut(x)
                }
            }
            Node::Max(f, g) => f.value(x).max(g.value(x)),
            Node::Symmetrize(f) => f.value(x).max(f.value(self.ground.members() - x)),
            Node::Custom(_, f) => f(x),
        }
    }

    /// `(f/Z)(X) = max_{R ⊆ Z} f(X ∪ R)` on `ground ∖ Z`.
    pub fn contract(&self, z: Subset) -> Result<Self> {
        self.ground.check(z)?;
        if z.is_empty() {
            return Ok(self.clone());
        }
        Ok(SetFunction { ground: self.ground.remove(z), node: Arc::new(Node::Contract(self.clone(), z)) })
    }

    /// Contraction computed eagerly in one pass over the current table.
    pub fn contract_tabulated(&self, z: Subset) -> Result<Self> {
        self.ground.check(z)?;
        let ground = self.ground.remove(z);
        let mut values = vec![NEG_INF; 1usize << self.ground.universe_size()];
        for y in self.ground.subsets() {
            let slot = &mut values[(y - z).index()];
            *slot = (*slot).max(self.value(y));
        }
        Ok(SetFunction { ground, node: Arc::new(Node::Table(Arc::new(values))) })
    }

    /// The same values on the smaller ground set `ground ∖ z`.
    pub fn restrict(&self, z: Subset) -> Result<Self> {
        self.ground.check(z)?;
        Ok(SetFunction { ground: self.ground.remove(z), node: Arc::new(Node::Restrict(self.clone())) })
    }

    /// `f - b_H`.
    pub fn minus_coverage(&self, h: &WeightedHypergraph) -> Result<Self> {
        self.check_graph(h)?;
        Ok(SetFunction { ground: self.ground.clone(), node: Arc::new(Node::MinusCoverage(self.clone(), h.clone())) })
    }

    /// `f - d_H`.
    pub fn minus_cut(&self, h: &WeightedHypergraph) -> Result<Self> {
        self.check_graph(h)?;
        Ok(SetFunction { ground: self.ground.clone(), node: Arc::new(Node::MinusCut(self.clone(), h.clone())) })
    }

    fn check_graph(&self, h: &WeightedHypergraph) -> Result<()> {
        if !self.ground.same_universe(h.vertices()) || !self.ground.members().is_subset_of(h.vertices().members()) {
            return Err(Error::GroundMismatch);
        }
        Ok(())
    }

    /// Pointwise maximum.
    pub fn max(&self, other: &SetFunction) -> Result<Self> {
        if self.ground != other.ground {
            return Err(Error::GroundMismatch);
        }
        Ok(SetFunction { ground: self.ground.clone(), node: Arc::new(Node::Max(self.clone(), other.clone())) })
    }

    /// `X ↦ max{f(X), f(V∖X)}`.
    pub fn symmetrize(&self) -> Self {
        SetFunction { ground: self.ground.clone(), node: Arc::new(Node::Symmetrize(self.clone())) }
    }

    /// Evaluate every subset once and store the result as a table.
    pub fn tabulate(&self) -> Result<Self> {
        if self.is_tabulated() {
            return Ok(self.clone());
        }
        self.ground.check_cap(HARD_CAP)?;
        let mut values = vec![0; 1usize << self.ground.universe_size()];
        for x in self.ground.subsets() {
            let v = self.value(x);
            if v != NEG_INF {
                check_value(v as i128)?;
            }
            values[x.index()] = v;
        }
        Ok(SetFunction { ground: self.ground.clone(), node: Arc::new(Node::Table(Arc::new(values))) })
    }

    /// Values on the ground subsets, as `(set, value)` pairs in bitmask order.
    pub fn entries(&self) -> impl Iterator<Item = (Subset, i64)> + '_ {
        self.ground.subsets().map(move |x| (x, self.value(x)))
    }

    /// `K_f`.
    pub fn max_value(&self) -> i64 {
        self.entries().map(|(_, v)| v).max().unwrap_or(NEG_INF)
    }

    /// First pair (in bitmask order) where both local inequalities fail.
    pub fn skew_supermodular_violation(&self) -> Option<(Subset, Subset)> {
        let t = self.tabulate().ok()?;
        let members: Vec<Subset> = t.ground.subsets().collect();
        for &x in &members {
            let fx = t.value(x);
            for &y in &members {
                if y < x || !x.overlaps_properly(y) {
                    continue;
                }
                let lhs = sat_add(fx, t.value(y));
                if lhs == NEG_INF {
                    continue;
                }
                let sup = sat_add(t.value(x & y), t.value(x | y));
                let neg = sat_add(t.value(x - y), t.value(y - x));
                let sup_ok = sup != NEG_INF && lhs <= sup;
                let neg_ok = neg != NEG_INF && lhs <= neg;
                if !sup_ok && !neg_ok {
                    return Some((x, y));
                }
            }
        }
        None
    }

    pub fn is_skew_supermodular(&self) -> bool {
        self.skew_supermodular_violation().is_none()
    }

    /// First set with `f(X) != f(V∖X)`.
    pub fn symmetry_violation(&self) -> Option<Subset> {
        let v = self.ground.members();
        self.ground.subsets().find(|&x| self.value(x) != self.value(v - x))
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_violation().is_none()
    }

    pub fn to_json(&self) -> TabulatedJson {
        let labels: Vec<String> = self.ground.names(self.ground.members());
        let idx: Vec<usize> = self.ground.members().iter().collect();
        let mut values = BTreeMap::new();
        for local in 0u32..(1u32 << idx.len()) {
            let x = Subset::from_indices(idx.iter().enumerate().filter(|(k, _)| local >> k & 1 == 1).map(|(_, &i)| i));
            values.insert(local.to_string(), self.value(x));
        }
        TabulatedJson { ground: labels, values }
    }

    /// Read a tabulated function; its ground set becomes the universe.
    pub fn from_json(j: &TabulatedJson) -> Result<Self> {
        let ground = GroundSet::new(j.ground.iter().cloned())?;
        Self::from_json_on(&ground, j)
    }

    /// Read a tabulated function whose labels must be exactly `ground`'s members.
    pub fn from_json_on(ground: &GroundSet, j: &TabulatedJson) -> Result<Self> {
        let idx: Vec<usize> = j
            .ground
            .iter()
            .map(|l| ground.index_of(l).ok_or_else(|| Error::UnknownLabel(l.clone())))
            .collect::<Result<_>>()?;
        if Subset::from_indices(idx.iter().copied()) != ground.members() || idx.len() != ground.len() {
            return Err(Error::GroundMismatch);
        }
        let n = idx.len();
        ground.check_cap(configured_cap().max(n))?;
        let mut values = vec![0; 1usize << ground.universe_size()];
        let mut seen = 0usize;
        for (k, &v) in &j.values {
            let local: u64 = k.trim().parse().map_err(|_| Error::Json(format!("bad subset key {k:?}")))?;
            if local >> n != 0 {
                return Err(Error::Json(format!("subset key {k} outside a ground set of {n} elements")));
            }
            let x = Subset::from_indices((0..n).filter(|b| local >> b & 1 == 1).map(|b| idx[b]));
            values[x.index()] = check_value(v as i128)?;
            seen += 1;
        }
        if seen != 1usize << n {
            return Err(Error::Json(format!("table has {seen} of {} values", 1usize << n)));
        }
        Self::from_table(ground.clone(), values)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabulatedJson {
    pub ground: Vec<String>,
    pub values: BTreeMap<String, i64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> GroundSet {
        GroundSet::new(["a", "b", "c"]).unwrap()
    }

    #[test]
    fn submasks_ascending() {
        let s = Subset::from_bits(0b1010);
        let got: Vec<u32> = s.subsets().map(Subset::bits).collect();
        assert_eq!(got, vec![0, 2, 8, 10]);
        assert_eq!(Subset::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn table_lookup() {
        let g = GroundSet::new(["a", "b"]).unwrap();
        let f = SetFunction::from_table(g.clone(), vec![0, 2, 2, 0]).unwrap();
        assert_eq!(f.evaluate(g.subset(&["a"]).unwrap()).unwrap(), 2);
        assert_eq!(f.evaluate(Subset::singleton(3)), Err(Error::OutsideGround(3)));
    }

    #[test]
    fn contract_single() {
        let g = abc();
        let f = SetFunction::from_table(g.clone(), vec![0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        let c = g.subset(&["c"]).unwrap();
        let fc = f.contract(c).unwrap();
        let a = g.subset(&["a"]).unwrap();
        assert_eq!(fc.value(a), f.value(a).max(f.value(a | c)));
        let ab = g.subset(&["a", "b"]).unwrap();
        assert_eq!(fc.value(ab), f.value(ab).max(f.value(g.members())));
        assert_eq!(fc.ground().members(), ab);
        let t = f.contract_tabulated(c).unwrap();
        for x in fc.ground().subsets() {
            assert_eq!(t.value(x), fc.value(x));
        }
        let same = f.contract(Subset::EMPTY).unwrap();
        assert!(f.entries().all(|(x, v)| same.value(x) == v));
    }

    #[test]
    fn modular_is_skew_supermodular() {
        let g = GroundSet::indexed(4).unwrap();
        let f = SetFunction::modular(g, &[3, -1, 4, 0]).unwrap();
        assert!(f.is_skew_supermodular());
        assert_eq!(f.max_value(), 7);
    }

    #[test]
    fn handcrafted_violation() {
        let g = abc();
        // f({a})=f({b})=1 with -5 elsewhere is skew-supermodular: disjoint
        // pairs satisfy the negamodular inequality with equality.
        let mut t = vec![-5; 8];
        t[1] = 1;
        t[2] = 1;
        assert!(SetFunction::from_table(g.clone(), t).unwrap().is_skew_supermodular());
        let mut t = vec![-5; 8];
        t[0b011] = 1;
        t[0b110] = 1;
        let f = SetFunction::from_table(g, t).unwrap();
        let x = Subset::from_bits(0b011);
        let y = Subset::from_bits(0b110);
        // both inequalities fail at ({a,b},{b,c})
        assert!(f.value(x) + f.value(y) > f.value(x & y) + f.value(x | y));
        assert!(f.value(x) + f.value(y) > f.value(x - y) + f.value(y - x));
        assert!(!f.is_skew_supermodular());
    }

    #[test]
    fn zero_function() {
        let f = SetFunction::zero(GroundSet::indexed(3).unwrap());
        assert_eq!(f.max_value(), 0);
        assert!(f.is_symmetric());
    }

    #[test]
    fn flat_function_max() {
        let g = GroundSet::indexed(5).unwrap();
        let v = g.members();
        let f = SetFunction::from_fn(g, |x| if x.is_empty() { 0 } else if x == v { 26 } else { 15 }).unwrap();
        assert_eq!(f.max_value(), 26);
    }

    #[test]
    fn symmetrize_is_symmetric() {
        let g = GroundSet::indexed(4).unwrap();
        let f = SetFunction::from_fn(g, |x| (x.bits() as i64 * 7) % 5 - 2).unwrap();
        assert!(f.symmetrize().is_symmetric());
    }

    #[test]
    fn json_roundtrip() {
        let g = abc();
        let f = SetFunction::from_fn(g, |x| x.bits() as i64 - 3).unwrap();
        let j = f.to_json();
        assert_eq!(j.values.len(), 8);
        let back = SetFunction::from_json(&j).unwrap();
        assert!(f.entries().all(|(x, v)| back.value(x) == v));
        let mut bad = j.clone();
        bad.values.remove("3");
        assert!(SetFunction::from_json(&bad).is_err());
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert_eq!(GroundSet::new(["a", "a"]).unwrap_err(), Error::DuplicateLabel("a".into()));
    }

    #[test]
    fn bound_json() {
        assert_eq!(serde_json::to_string(&Bound::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<Bound>("7").unwrap(), Bound::Finite(7));
        assert!(Bound::Finite(i64::MAX) < Bound::Infinite);
    }

    #[test]
    fn neg_inf_loses_max() {
        let g = GroundSet::indexed(2).unwrap();
        let f = SetFunction::from_table(g.clone(), vec![NEG_INF, 1, NEG_INF, NEG_INF]).unwrap();
        let z = Subset::singleton(1);
        assert_eq!(f.contract(z).unwrap().value(Subset::EMPTY), NEG_INF);
        assert_eq!(f.contract(z).unwrap().value(Subset::singleton(0)), 1);
        assert_eq!(sat_add(NEG_INF, 5), NEG_INF);
    }
}
