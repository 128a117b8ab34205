//! The index set of quadratic monomial maps, its partial order, the
//! triangular and resonant subsets and the relation calculus on top of them.
//!
//! Coordinates are 0-based internally. `BasisIndex::i = 0` is the first
//! coordinate; serialized output shifts to 1-based.

use std::collections::HashMap;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A monomial `z^alpha e_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    pub alpha: Vec<u32>,
    pub i: usize,
}

impl BasisIndex {
    pub fn new(alpha: Vec<u32>, i: usize) -> Self {
        Self { alpha, i }
    }

    pub fn degree(&self) -> u32 {
        self.alpha.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }
}

impl Serialize for BasisIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("BasisIndex", 2)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("i", &(self.i + 1))?;
        st.end()
    }
}

impl std::fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "((")?;
        for (n, a) in self.alpha.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "),{})", self.i + 1)
    }
}

/// Prefix-sum comparison of two multi-indices.
pub fn alpha_leq(a: &[u32], b: &[u32]) -> bool {
    let (mut sa, mut sb) = (0u32, 0u32);
    for (x, y) in a.iter().zip(b) {
        sa += x;
        sb += y;
        if sa > sb {
            return false;
        }
    }
    true
}

/// `(alpha, i) <= (beta, j)` iff `i <= j` and every prefix sum of alpha is
/// at most the corresponding prefix sum of beta.
pub fn leq(s: &BasisIndex, t: &BasisIndex) -> bool {
    s.i <= t.i && alpha_leq(&s.alpha, &t.alpha)
}

/// All multi-indices of length `d` and total degree `k`, lexicographically
/// descending so that `z_1^k` comes first.
pub fn multi_indices(d: usize, k: u32) -> Vec<Vec<u32>> {
    fn rec(d: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == d {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=k).rev() {
            prefix.push(a);
            rec(d, k - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(d, k, &mut Vec::with_capacity(d), &mut out);
    }
    out
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, j| acc * (n - j) / (j + 1))
}

/// The ordered basis of homogeneous degree-`k` self-maps of `C^d`.
///
/// Order: target coordinate ascending, then multi-index lexicographically
/// descending (`z_1^2, z_1 z_2, ..., z_d^2` for each coordinate).
#[derive(Debug, Clone)]
pub struct IndexSet {
    d: usize,
    k: u32,
    elements: Vec<BasisIndex>,
    lookup: HashMap<BasisIndex, usize>,
}

impl IndexSet {
    pub fn new(d: usize, k: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension { d, reason: "dimension must be at least 1" });
        }
        if k == 0 {
            return Err(Error::InvalidParameter { name: "k", reason: "degree must be at least 1".into() });
        }
        let alphas = multi_indices(d, k);
        let elements: Vec<BasisIndex> = (0..d)
            .flat_map(|i| alphas.iter().map(move |a| BasisIndex::new(a.clone(), i)))
            .collect();
        let lookup = elements.iter().cloned().enumerate().map(|(n, s)| (s, n)).collect();
        Ok(Self { d, k, elements, lookup })
    }

    pub fn quadratic(d: usize) -> Result<Self> {
        Self::new(d, 2)
    }

    /// `binom(d+k-1, k) * d`.
    pub fn expected_len(d: usize, k: u32) -> usize {
        binomial(d + k as usize - 1, k as usize) * d
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Number of monomials per target coordinate.
    pub fn monomials(&self) -> usize {
        self.elements.len() / self.d
    }

    pub fn elements(&self) -> &[BasisIndex] {
        &self.elements
    }

    pub fn get(&self, pos: usize) -> &BasisIndex {
        &self.elements[pos]
    }

    pub fn position(&self, s: &BasisIndex) -> Option<usize> {
        self.lookup.get(s).copied()
    }

    /// Position of `z_a z_b e_i` (0-based `a`, `b`, `i`) for degree 2 without a lookup.
    pub fn quad_position(&self, a: usize, b: usize, i: usize) -> usize {
        debug_assert_eq!(self.k, 2);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        // monomials whose smaller factor precedes z_a, then offset within the block
        let within = a * self.d - a * a.saturating_sub(1) / 2 + (b - a);
        i * self.monomials() + within
    }
}

/// A subset of an `IndexSet`, stored as a membership mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    mask: Vec<bool>,
}

impl Subset {
    pub fn empty(n: usize) -> Self {
        Self { mask: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        Self { mask: vec![true; n] }
    }

    pub fn from_positions(n: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for p in positions {
            s.mask[p] = true;
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.mask[p]
    }

    pub fn insert(&mut self, p: usize) {
        self.mask[p] = true;
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(p, _)| p)
    }

    pub fn complement(&self) -> Self {
        Self { mask: self.mask.iter().map(|b| !b).collect() }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self { mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect() }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self { mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect() }
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self { mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a && !*b).collect() }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.mask.iter().zip(&other.mask).all(|(a, b)| !*a || *b)
    }
}

/// A relation on an index set as a dense boolean matrix; `(s, t)` is stored at row `s`, column `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Self { n, bits: vec![false; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for s in 0..n {
            r.insert(s, s);
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(n);
        for (s, t) in pairs {
            r.insert(s, t);
        }
        r
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let bits = (0..n * n).map(|p| f(p / n, p % n)).collect();
        Self { n, bits }
    }

    /// Product of two subsets.
    pub fn product(a: &Subset, b: &Subset) -> Self {
        Self::from_fn(a.universe(), |s, t| a.contains(s) && b.contains(t))
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn contains(&self, s: usize, t: usize) -> bool {
        self.bits[s * self.n + t]
    }

    pub fn insert(&mut self, s: usize, t: usize) {
        self.bits[s * self.n + t] = true;
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(move |(p, _)| (p / n, p % n))
    }

    pub fn first_pair(&self) -> Option<(usize, usize)> {
        self.pairs().next()
    }

    /// `self ∘ inner = {(s, u) : ∃ t, (s, t) ∈ inner and (t, u) ∈ self}`.
    pub fn compose(&self, inner: &Relation) -> Relation {
        let n = self.n;
        let mut out = Relation::empty(n);
        for s in 0..n {
            for t in 0..n {
                if !inner.contains(s, t) {
                    continue;
                }
                let row = &self.bits[t * n..(t + 1) * n];
                for (u, &b) in row.iter().enumerate() {
                    if b {
                        out.bits[s * n + u] = true;
                    }
                }
            }
        }
        out
    }

    /// `R(E) = {t : ∃ s ∈ E, (s, t) ∈ R}`.
    pub fn image(&self, e: &Subset) -> Subset {
        let mut out = Subset::empty(self.n);
        for s in e.iter() {
            for t in 0..self.n {
                if self.contains(s, t) {
                    out.insert(t);
                }
            }
        }
        out
    }

    pub fn union(&self, other: &Relation) -> Relation {
        Relation {
            n: self.n,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect(),
        }
    }

    pub fn difference(&self, other: &Relation) -> Relation {
        Relation {
            n: self.n,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a && !*b).collect(),
        }
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    pub fn domain(&self) -> Subset {
        Subset::from_positions(self.n, self.pairs().map(|(s, _)| s))
    }
}

/// A permutation of `{0, .., d-1}`; `map[j]` is the image of `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &m in &map {
            if m >= map.len() || seen[m] {
                return Err(Error::InvalidParameter {
                    name: "permutation",
                    reason: format!("{map:?} is not a bijection"),
                });
            }
            seen[m] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(d: usize) -> Self {
        Self { map: (0..d).collect() }
    }

    /// The cycle `1 -> 2 -> ... -> h -> 1` (1-based), fixing everything above `h`.
    pub fn cycle(d: usize, h: usize) -> Self {
        assert!(h <= d);
        let map = (0..d)
            .map(|j| if j + 1 < h { j + 1 } else if j + 1 == h { 0 } else { j })
            .collect();
        Self { map }
    }

    /// The transposition of `a` and `b` (0-based).
    pub fn transposition(d: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<usize> = (0..d).collect();
        map.swap(a, b);
        Self { map }
    }

    /// All permutations of `{0..d-1}` in lexicographic order of their arrays.
    pub fn all(d: usize) -> Vec<Self> {
        fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Permutation>) {
            if cur.len() == used.len() {
                out.push(Permutation { map: cur.clone() });
                return;
            }
            for v in 0..used.len() {
                if !used[v] {
                    used[v] = true;
                    cur.push(v);
                    rec(cur, used, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; d], &mut out);
        out
    }

    pub fn d(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, j: usize) -> usize {
        self.map[j]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(j, &m)| j == m)
    }

    /// `self ∘ inner`, i.e. `j ↦ self(inner(j))`.
    pub fn compose(&self, inner: &Permutation) -> Permutation {
        Permutation { map: inner.map.iter().map(|&j| self.map[j]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut map = vec![0; self.map.len()];
        for (j, &m) in self.map.iter().enumerate() {
            map[m] = j;
        }
        Permutation { map }
    }

    /// `σ·(α, i) = (α ∘ σ⁻¹, σ(i))`.
    pub fn act(&self, s: &BasisIndex) -> BasisIndex {
        let mut alpha = vec![0; s.alpha.len()];
        for (j, &a) in s.alpha.iter().enumerate() {
            alpha[self.map[j]] = a;
        }
        BasisIndex::new(alpha, self.map[s.i])
    }

    /// The action on positions of `set`.
    pub fn act_position(&self, set: &IndexSet, p: usize) -> usize {
        set.position(&self.act(set.get(p))).expect("action preserves the index set")
    }

    pub fn act_set(&self, set: &IndexSet, e: &Subset) -> Subset {
        Subset::from_positions(set.len(), e.iter().map(|p| self.act_position(set, p)))
    }

    /// The graph `{(s, σ·s)}` as a relation on `set`.
    pub fn graph(&self, set: &IndexSet) -> Relation {
        Relation::from_pairs(set.len(), (0..set.len()).map(|p| (p, self.act_position(set, p))))
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let one_based: Vec<usize> = self.map.iter().map(|m| m + 1).collect();
        one_based.serialize(serializer)
    }
}

/// An index set together with its partial order.
#[derive(Debug, Clone)]
pub struct Poset {
    set: IndexSet,
    order: Relation,
}

impl Poset {
    pub fn new(d: usize, k: u32) -> Result<Self> {
        let set = IndexSet::new(d, k)?;
        let order = Relation::from_fn(set.len(), |s, t| leq(set.get(s), set.get(t)));
        Ok(Self { set, order })
    }

    pub fn quadratic(d: usize) -> Result<Self> {
        Self::new(d, 2)
    }

    pub fn set(&self) -> &IndexSet {
        &self.set
    }

    pub fn d(&self) -> usize {
        self.set.d()
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn order(&self) -> &Relation {
        &self.order
    }

    pub fn leq(&self, s: usize, t: usize) -> bool {
        self.order.contains(s, t)
    }

    /// `E↑ = {t : ∃ s ∈ E, s <= t}`.
    pub fn up_closure(&self, e: &Subset) -> Subset {
        self.order.image(e)
    }

    /// Cardinality of the longest chain.
    pub fn max_chain_len(&self) -> usize {
        let n = self.len();
        // Sort by a linear extension: a strict predecessor has a smaller (i, prefix-sum total).
        let key = |p: usize| {
            let s = self.set.get(p);
            let mut acc = 0u32;
            let weight: u32 = s.alpha.iter().map(|a| {
                acc += a;
                acc
            }).sum();
            (s.i, weight)
        };
        let mut topo: Vec<usize> = (0..n).collect();
        topo.sort_by_key(|&p| key(p));
        let mut best = vec![1usize; n];
        for (a, &t) in topo.iter().enumerate() {
            for &s in &topo[..a] {
                if s != t && self.leq(s, t) && best[s] + 1 > best[t] {
                    best[t] = best[s] + 1;
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    pub fn minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&s| (0..self.len()).all(|t| self.leq(s, t)))
    }

    pub fn maximum(&self) -> Option<usize> {
        (0..self.len()).find(|&t| (0..self.len()).all(|s| self.leq(s, t)))
    }
}

/// The triangular set `T`, the resonant set `V` and the relation `W` for degree 2.
#[derive(Debug, Clone)]
pub struct Resonance {
    pub t: Subset,
    pub v: Subset,
    pub w: Relation,
}

impl Resonance {
    pub fn new(poset: &Poset) -> Result<Self> {
        let set = poset.set();
        if set.k() != 2 {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: "triangular and resonant sets are defined for degree 2 only".into(),
            });
        }
        let n = set.len();
        let t = Subset::from_positions(
            n,
            (0..n).filter(|&p| {
                let s = set.get(p);
                s.alpha[..=s.i].iter().all(|&a| a == 0)
            }),
        );
        let v = Subset::from_positions(n, (0..n).filter(|&p| {
            let s = set.get(p);
            s.alpha[s.i] == 0
        }));
        let tc = t.complement();
        let w = Relation::from_fn(n, |s, u| {
            tc.contains(s) && v.iter().any(|r| poset.leq(s, r) && poset.leq(r, u))
        });
        Ok(Self { t, v, w })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(alpha: &[u32], i1: usize) -> BasisIndex {
        BasisIndex::new(alpha.to_vec(), i1 - 1)
    }

    #[test]
    fn enumeration_d2() {
        let h = IndexSet::quadratic(2).unwrap();
        let expect = [
            idx(&[2, 0], 1),
            idx(&[1, 1], 1),
            idx(&[0, 2], 1),
            idx(&[2, 0], 2),
            idx(&[1, 1], 2),
            idx(&[0, 2], 2),
        ];
        assert_eq!(h.elements(), &expect);
    }

    #[test]
    fn sizes() {
        assert_eq!(IndexSet::quadratic(1).unwrap().len(), 1);
        assert_eq!(IndexSet::quadratic(3).unwrap().len(), 18);
        for d in 1..7 {
            assert_eq!(IndexSet::quadratic(d).unwrap().len(), d * d * (d + 1) / 2);
            for k in 1..4 {
                assert_eq!(IndexSet::new(d, k).unwrap().len(), IndexSet::expected_len(d, k));
            }
        }
    }

    #[test]
    fn rejects_zero() {
        assert!(IndexSet::new(0, 2).is_err());
        assert!(IndexSet::new(2, 0).is_err());
    }

    #[test]
    fn quad_position_matches_lookup() {
        for d in 1..7 {
            let h = IndexSet::quadratic(d).unwrap();
            for a in 0..d {
                for b in a..d {
                    for i in 0..d {
                        let mut alpha = vec![0; d];
                        alpha[a] += 1;
                        alpha[b] += 1;
                        let p = h.position(&BasisIndex::new(alpha, i)).unwrap();
                        assert_eq!(h.quad_position(a, b, i), p);
                        assert_eq!(h.quad_position(b, a, i), p);
                    }
                }
            }
        }
    }

    #[test]
    fn leq_examples() {
        assert!(leq(&idx(&[0, 2], 1), &idx(&[2, 0], 2)));
        assert!(!leq(&idx(&[2, 0], 2), &idx(&[0, 2], 1)));
        let s = idx(&[1, 1], 2);
        assert!(leq(&s, &s));
    }

    #[test]
    fn closure_examples_d2() {
        let p = Poset::quadratic(2).unwrap();
        let h = p.set();
        let max = h.position(&idx(&[2, 0], 2)).unwrap();
        let min = h.position(&idx(&[0, 2], 1)).unwrap();
        assert_eq!(p.maximum(), Some(max));
        assert_eq!(p.minimum(), Some(min));
        let up = p.up_closure(&Subset::from_positions(6, [max]));
        assert_eq!(up.iter().collect::<Vec<_>>(), vec![max]);
        assert_eq!(p.up_closure(&Subset::from_positions(6, [min])).len(), 6);
        assert!(p.up_closure(&Subset::empty(6)).is_empty());
    }

    #[test]
    fn resonance_sets_d2_and_d1() {
        let p = Poset::quadratic(2).unwrap();
        let h = p.set();
        let r = Resonance::new(&p).unwrap();
        let t: Vec<_> = r.t.iter().map(|q| h.get(q).clone()).collect();
        let v: Vec<_> = r.v.iter().map(|q| h.get(q).clone()).collect();
        assert_eq!(t, vec![idx(&[0, 2], 1)]);
        assert_eq!(v, vec![idx(&[0, 2], 1), idx(&[2, 0], 2)]);
        assert_eq!(r.w.len(), 5);
        let max = h.position(&idx(&[2, 0], 2)).unwrap();
        assert_eq!(r.w.image(&Subset::full(6)).iter().collect::<Vec<_>>(), vec![max]);

        let p1 = Poset::quadratic(1).unwrap();
        let r1 = Resonance::new(&p1).unwrap();
        assert!(r1.t.is_empty() && r1.v.is_empty() && r1.w.is_empty());
    }

    #[test]
    fn t_in_d3() {
        let p = Poset::quadratic(3).unwrap();
        let r = Resonance::new(&p).unwrap();
        assert_eq!(r.t.len(), 4);
    }

    #[test]
    fn cycle_and_action() {
        let s = Permutation::transposition(2, 0, 1);
        assert_eq!(s.act(&idx(&[2, 0], 2)), idx(&[0, 2], 1));
        assert_eq!(Permutation::cycle(3, 3).as_slice(), &[1, 2, 0]);
        assert_eq!(Permutation::cycle(3, 2).as_slice(), &[1, 0, 2]);
        assert!(Permutation::cycle(3, 1).is_identity());
        assert!(Permutation::new(vec![0, 0]).is_err());
    }

    #[test]
    fn composition_convention() {
        // R∘S takes S first.
        let s = Relation::from_pairs(3, [(0, 1)]);
        let r = Relation::from_pairs(3, [(1, 2)]);
        assert_eq!(r.compose(&s).pairs().collect::<Vec<_>>(), vec![(0, 2)]);
        assert!(s.compose(&r).is_empty());
    }

    #[test]
    fn max_chain_small() {
        for d in 1..5 {
            assert_eq!(Poset::quadratic(d).unwrap().max_chain_len(), 3 * d - 2);
        }
    }
}
