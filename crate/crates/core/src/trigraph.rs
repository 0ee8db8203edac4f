//! Trigraphs: vertices `0..n` with a symmetric adjacency function valued in
//! `{-1, 0, +1}`. Zero marks a switchable (semiadjacent) pair.

use std::fmt;

use crate::error::{cap_check, Error, Result};
use crate::vset::{VertexSet, MAX_VERTICES};

/// Value of the adjacency function on one pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theta {
    StrongAnti = -1,
    Switchable = 0,
    Strong = 1,
}

impl Theta {
    pub fn value(self) -> i8 {
        self as i8
    }

    pub fn from_value(v: i8) -> Option<Theta> {
        match v {
            -1 => Some(Theta::StrongAnti),
            0 => Some(Theta::Switchable),
            1 => Some(Theta::Strong),
            _ => None,
        }
    }

    pub fn negate(self) -> Theta {
        match self {
            Theta::StrongAnti => Theta::Strong,
            Theta::Switchable => Theta::Switchable,
            Theta::Strong => Theta::StrongAnti,
        }
    }
}

/// A trigraph stored as two symmetric bitset adjacency matrices: strong
/// edges and switchable pairs. Every other pair is a strong antiedge.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Trigraph {
    n: usize,
    strong: Vec<VertexSet>,
    semi: Vec<VertexSet>,
}

impl Trigraph {
    /// `n` vertices, every pair a strong antiedge.
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::InvalidInput(format!(
                "{n} vertices exceeds the supported maximum of {MAX_VERTICES}"
            )));
        }
        Ok(Trigraph {
            n,
            strong: vec![VertexSet::EMPTY; n],
            semi: vec![VertexSet::EMPTY; n],
        })
    }

    /// Graph (no switchable pairs) from an edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut t = Trigraph::new(n)?;
        for &(u, v) in edges {
            t.try_set(u, v, Theta::Strong)?;
        }
        Ok(t)
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Trigraph::from_edges(n, &edges).expect("cycle")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Trigraph::from_edges(n, &edges).expect("path")
    }

    pub fn clique(n: usize) -> Self {
        Trigraph::stable(n).complement()
    }

    pub fn stable(n: usize) -> Self {
        Trigraph::new(n).expect("stable")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    #[inline]
    pub fn theta(&self, u: usize, v: usize) -> Theta {
        debug_assert!(u != v);
        if self.strong[u].contains(v) {
            Theta::Strong
        } else if self.semi[u].contains(v) {
            Theta::Switchable
        } else {
            Theta::StrongAnti
        }
    }

    pub fn try_set(&mut self, u: usize, v: usize, t: Theta) -> Result<()> {
        if u == v || u >= self.n || v >= self.n {
            return Err(Error::InvalidInput(format!(
                "pair ({u},{v}) is not a pair of distinct vertices of a {}-vertex trigraph",
                self.n
            )));
        }
        self.set(u, v, t);
        Ok(())
    }

    /// Panics on self-pairs or out-of-range indices.
    pub fn set(&mut self, u: usize, v: usize, t: Theta) {
        assert!(u != v && u < self.n && v < self.n);
        self.strong[u].remove(v);
        self.strong[v].remove(u);
        self.semi[u].remove(v);
        self.semi[v].remove(u);
        match t {
            Theta::Strong => {
                self.strong[u].insert(v);
                self.strong[v].insert(u);
            }
            Theta::Switchable => {
                self.semi[u].insert(v);
                self.semi[v].insert(u);
            }
            Theta::StrongAnti => {}
        }
    }

    /// Strong neighbors.
    #[inline]
    pub fn strong_nbrs(&self, v: usize) -> VertexSet {
        self.strong[v]
    }

    /// Switchable partners of `v`.
    #[inline]
    pub fn semi_nbrs(&self, v: usize) -> VertexSet {
        self.semi[v]
    }

    /// Neighbors: `theta >= 0`.
    #[inline]
    pub fn nbrs(&self, v: usize) -> VertexSet {
        self.strong[v] | self.semi[v]
    }

    /// Antineighbors: `theta <= 0`.
    #[inline]
    pub fn anti_nbrs(&self, v: usize) -> VertexSet {
        self.vertices() - self.strong[v] - VertexSet::singleton(v)
    }

    /// Strong antineighbors: `theta = -1`.
    #[inline]
    pub fn strong_anti_nbrs(&self, v: usize) -> VertexSet {
        self.vertices() - self.nbrs(v) - VertexSet::singleton(v)
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.nbrs(u).contains(v)
    }

    #[inline]
    pub fn antiadjacent(&self, u: usize, v: usize) -> bool {
        !self.strong[u].contains(v)
    }

    /// Switchable pairs `(u, v)` with `u < v`, in lexicographic order.
    pub fn switchable_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in self.semi[u].above(u) {
                out.push((u, v));
            }
        }
        out
    }

    pub fn num_switchable(&self) -> usize {
        (0..self.n).map(|u| self.semi[u].above(u).len()).sum()
    }

    pub fn is_graph(&self) -> bool {
        self.semi.iter().all(|s| s.is_empty())
    }

    /// The trigraph with `theta` negated.
    pub fn complement(&self) -> Trigraph {
        let all = self.vertices();
        let strong = (0..self.n)
            .map(|v| all - self.strong[v] - self.semi[v] - VertexSet::singleton(v))
            .collect();
        Trigraph {
            n: self.n,
            strong,
            semi: self.semi.clone(),
        }
    }

    /// Trigraph induced on `x`; vertex `i` of the result is the `i`-th
    /// smallest element of `x`, returned as the relabeling map.
    pub fn induced(&self, x: VertexSet) -> Result<(Trigraph, Vec<usize>)> {
        if !x.is_subset(self.vertices()) {
            return Err(Error::InvalidInput(format!(
                "subset {x:?} is not inside 0..{}",
                self.n
            )));
        }
        let map = x.to_vec();
        let mut t = Trigraph::new(map.len())?;
        for (i, &u) in map.iter().enumerate() {
            for (j, &v) in map.iter().enumerate().skip(i + 1) {
                t.set(i, j, self.theta(u, v));
            }
        }
        Ok((t, map))
    }

    /// Every switchable pair becomes a strong edge.
    pub fn full_realization(&self) -> Trigraph {
        let strong = (0..self.n).map(|v| self.strong[v] | self.semi[v]).collect();
        Trigraph {
            n: self.n,
            strong,
            semi: vec![VertexSet::EMPTY; self.n],
        }
    }

    /// All `2^|sigma|` realizations, in binary counting order over the
    /// switchable pairs (bit set = strong edge).
    pub fn realizations(&self, cap: usize) -> Result<Realizations<'_>> {
        let pairs = self.switchable_pairs();
        cap_check("switchable pairs for realization enumeration", pairs.len(), cap)?;
        Ok(Realizations {
            base: self,
            total: 1u128 << pairs.len(),
            pairs,
            next: 0,
        })
    }

    /// Connected components of the switchable graph, each with its edge
    /// count, ordered by smallest vertex.
    pub fn switchable_components(&self) -> Vec<(VertexSet, usize)> {
        let mut seen = VertexSet::EMPTY;
        let mut out = Vec::new();
        for v in 0..self.n {
            if seen.contains(v) {
                continue;
            }
            let comp = closure(VertexSet::singleton(v), VertexSet::full(self.n), |u| {
                self.semi[u]
            });
            seen |= comp;
            let edges: usize = comp.iter().map(|u| (self.semi[u] & comp).len()).sum::<usize>() / 2;
            out.push((comp, edges));
        }
        out
    }

    /// `x` is connected in the full realization of `T[x]`.
    pub fn is_connected(&self, x: VertexSet) -> bool {
        match x.first() {
            None => true,
            Some(v) => closure(VertexSet::singleton(v), x, |u| self.nbrs(u)) == x,
        }
    }

    /// `x` is connected in the full realization of the complement of `T[x]`.
    pub fn is_anticonnected(&self, x: VertexSet) -> bool {
        match x.first() {
            None => true,
            Some(v) => closure(VertexSet::singleton(v), x, |u| self.anti_nbrs(u)) == x,
        }
    }

    /// Components of `T[x]` (full realization).
    pub fn components(&self, x: VertexSet) -> Vec<VertexSet> {
        partition_by(x, |u| self.nbrs(u))
    }

    /// Anticomponents of `T[x]`.
    pub fn anticomponents(&self, x: VertexSet) -> Vec<VertexSet> {
        partition_by(x, |u| self.anti_nbrs(u))
    }

    /// `a` strongly complete to `b`.
    pub fn strongly_complete(&self, a: VertexSet, b: VertexSet) -> bool {
        a.iter().all(|u| b.is_subset(self.strong[u]))
    }

    /// `a` strongly anticomplete to `b`.
    pub fn strongly_anticomplete(&self, a: VertexSet, b: VertexSet) -> bool {
        a.iter().all(|u| b.is_disjoint(self.nbrs(u)))
    }

    /// All pairs inside `x` are strong edges.
    pub fn is_strong_clique(&self, x: VertexSet) -> bool {
        x.iter().all(|u| (x.without(u)).is_subset(self.strong[u]))
    }

    /// All pairs inside `x` are strong antiedges.
    pub fn is_strong_stable(&self, x: VertexSet) -> bool {
        x.iter().all(|u| x.is_disjoint(self.nbrs(u)))
    }

    pub fn is_clique(&self, x: VertexSet) -> bool {
        x.iter().all(|u| x.without(u).is_subset(self.nbrs(u)))
    }

    pub fn is_stable(&self, x: VertexSet) -> bool {
        x.iter().all(|u| x.is_disjoint(self.strong[u]))
    }

    /// Has at least one strong edge or strong antiedge.
    pub fn has_strong_pair(&self) -> bool {
        let total = self.n * self.n.saturating_sub(1) / 2;
        total > self.num_switchable()
    }

    /// Stable content hash over `n` and theta, for tagging separators.
    pub fn fingerprint(&self) -> u64 {
        // FNV-1a over the upper-triangular theta sequence.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |b: u8| {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        };
        for b in (self.n as u64).to_le_bytes() {
            feed(b);
        }
        for u in 0..self.n {
            for v in u + 1..self.n {
                feed((self.theta(u, v).value() + 1) as u8);
            }
        }
        h
    }
}

impl fmt::Debug for Trigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Trigraph(n={}", self.n)?;
        for u in 0..self.n {
            for v in self.strong[u].above(u) {
                write!(f, " {u}-{v}")?;
            }
            for v in self.semi[u].above(u) {
                write!(f, " {u}~{v}")?;
            }
        }
        write!(f, ")")
    }
}

/// Iterator over realizations of a trigraph.
pub struct Realizations<'a> {
    base: &'a Trigraph,
    pairs: Vec<(usize, usize)>,
    next: u128,
    total: u128,
}

impl Iterator for Realizations<'_> {
    type Item = Trigraph;

    fn next(&mut self) -> Option<Trigraph> {
        if self.next >= self.total {
            return None;
        }
        let mask = self.next;
        self.next += 1;
        let mut t = self.base.clone();
        for (i, &(u, v)) in self.pairs.iter().enumerate() {
            let val = if mask >> i & 1 == 1 {
                Theta::Strong
            } else {
                Theta::StrongAnti
            };
            t.set(u, v, val);
        }
        Some(t)
    }
}

/// Closure of `start` inside `within` under `step`.
pub(crate) fn closure(start: VertexSet, within: VertexSet, step: impl Fn(usize) -> VertexSet) -> VertexSet {
    let mut reached = start & within;
    let mut frontier = reached;
    while let Some(v) = frontier.first() {
        frontier.remove(v);
        let new = step(v) & within & !reached;
        reached |= new;
        frontier |= new;
    }
    reached
}

fn partition_by(x: VertexSet, step: impl Fn(usize) -> VertexSet) -> Vec<VertexSet> {
    let mut rest = x;
    let mut out = Vec::new();
    while let Some(v) = rest.first() {
        let c = closure(VertexSet::singleton(v), x, &step);
        rest = rest - c;
        out.push(c);
    }
    out
}
