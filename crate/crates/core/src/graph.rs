//! Immutable simple graphs on at most [`MAX_VERTICES`] vertices with bitset rows.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest supported vertex count.
pub const MAX_VERTICES: usize = 1024;

const WORDS: usize = MAX_VERTICES / 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex count {0} exceeds the supported maximum of {MAX_VERTICES}")]
    TooManyVertices(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("{{{u}, {v}}} is not an edge")]
    NotAnEdge { u: usize, v: usize },
}

/// A set of vertex indices below [`MAX_VERTICES`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    words: [u64; WORDS],
}

impl Default for VertexSet {
    fn default() -> Self {
        Self::new()
    }
}

impl VertexSet {
    pub const fn new() -> Self {
        VertexSet { words: [0; WORDS] }
    }

    /// The set `{0, 1, ..., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_VERTICES);
        let mut s = Self::new();
        let whole = n / 64;
        for w in s.words.iter_mut().take(whole) {
            *w = u64::MAX;
        }
        if n % 64 != 0 {
            s.words[whole] = (1u64 << (n % 64)) - 1;
        }
        s
    }

    /// The interval `{lo, ..., hi-1}`.
    pub fn range(lo: usize, hi: usize) -> Self {
        Self::full(hi).difference(&Self::full(lo.min(hi)))
    }

    pub fn singleton(v: usize) -> Self {
        let mut s = Self::new();
        s.insert(v);
        s
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.words[v >> 6] |= 1u64 << (v & 63);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.words[v >> 6] &= !(1u64 << (v & 63));
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < MAX_VERTICES && self.words[v >> 6] >> (v & 63) & 1 == 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Smallest element.
    #[inline]
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    /// Largest element.
    pub fn last(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    #[inline]
    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
        out
    }

    #[inline]
    pub fn union(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
        out
    }

    #[inline]
    pub fn difference(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
        out
    }

    /// `|self ∩ other|` without materializing the intersection.
    #[inline]
    pub fn intersection_len(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection_len(other) == 0
    }

    /// Elements strictly greater than `v`.
    pub fn above(&self, v: usize) -> Self {
        if v + 1 >= MAX_VERTICES {
            return Self::new();
        }
        self.difference(&Self::full(v + 1))
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            set: self,
            word: 0,
            bits: self.words[0],
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = Self::new();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = Iter<'a>;
    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

/// Ascending iterator over a [`VertexSet`].
pub struct Iter<'a> {
    set: &'a VertexSet,
    word: usize,
    bits: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.bits != 0 {
                let tz = self.bits.trailing_zeros() as usize;
                self.bits &= self.bits - 1;
                return Some(self.word * 64 + tz);
            }
            self.word += 1;
            if self.word >= WORDS {
                return None;
            }
            self.bits = self.set.words[self.word];
        }
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let items = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&bad) = items.iter().find(|&&v| v >= MAX_VERTICES) {
            return Err(serde::de::Error::custom(format!(
                "vertex {bad} exceeds {MAX_VERTICES}"
            )));
        }
        Ok(items.into_iter().collect())
    }
}

/// Simple undirected graph on vertices `0..n`.
///
/// Row `v` of the adjacency holds `N(v)`. Values are never mutated after
/// construction; every edit returns a new graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<VertexSet>,
    edges: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        Ok(Graph {
            n,
            adj: vec![VertexSet::new(); n],
            edges: 0,
        })
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        let all = VertexSet::full(n);
        for v in 0..n {
            let mut row = all;
            row.remove(v);
            g.adj[v] = row;
        }
        g.edges = n * n.saturating_sub(1) / 2;
        Ok(g)
    }

    /// The cycle `0-1-...-(n-1)-0`; `n` must be at least 3.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        assert!(n >= 3, "a cycle needs at least three vertices");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    /// The path `0-1-...-(n-1)`.
    pub fn path(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            g.check_pair(u, v)?;
            g.link(u, v);
        }
        Ok(g)
    }

    /// Builds a graph from adjacency rows, enforcing symmetry and the absence of loops.
    pub fn from_rows(rows: Vec<VertexSet>) -> Result<Self, GraphError> {
        let n = rows.len();
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        let all = VertexSet::full(n);
        for (v, row) in rows.iter().enumerate() {
            if row.contains(v) {
                return Err(GraphError::Loop(v));
            }
            if let Some(bad) = row.difference(&all).first() {
                return Err(GraphError::VertexOutOfRange { vertex: bad, n });
            }
            for u in row {
                if !rows[u].contains(v) {
                    return Err(GraphError::NotAnEdge { u, v });
                }
            }
        }
        let edges = rows.iter().map(VertexSet::len).sum::<usize>() / 2;
        Ok(Graph {
            n,
            adj: rows,
            edges,
        })
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            });
        }
        Ok(())
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::Loop(u));
        }
        Ok(())
    }

    // Callers validate the pair first.
    pub(crate) fn link(&mut self, u: usize, v: usize) {
        if !self.adj[u].contains(v) {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
            self.edges += 1;
        }
    }

    pub fn add_edge(&self, u: usize, v: usize) -> Result<Self, GraphError> {
        self.check_pair(u, v)?;
        let mut g = self.clone();
        g.link(u, v);
        Ok(g)
    }

    /// `self ∪ other`, with `other`'s vertices shifted by `self.order()`.
    pub fn disjoint_union(&self, other: &Graph) -> Result<Self, GraphError> {
        let n = self.n + other.n;
        let mut g = Self::empty(n)?;
        g.adj[..self.n].copy_from_slice(&self.adj);
        for v in 0..other.n {
            g.adj[self.n + v] = other.adj[v].iter().map(|u| u + self.n).collect();
        }
        g.edges = self.edges + other.edges;
        Ok(g)
    }

    /// `self ∨ other`: the disjoint union plus every edge between the two sides.
    pub fn join(&self, other: &Graph) -> Result<Self, GraphError> {
        let mut g = self.disjoint_union(other)?;
        let left = VertexSet::full(self.n);
        let right = VertexSet::range(self.n, g.n);
        for v in 0..self.n {
            g.adj[v] = g.adj[v].union(&right);
        }
        for v in self.n..g.n {
            g.adj[v] = g.adj[v].union(&left);
        }
        g.edges += self.n * other.n;
        Ok(g)
    }

    /// `G[S]`, with vertices renumbered by ascending original index.
    pub fn induced(&self, s: &VertexSet) -> Self {
        let keep: Vec<usize> = s.iter().filter(|&v| v < self.n).collect();
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut edges = 0;
        let adj: Vec<VertexSet> = keep
            .iter()
            .map(|&v| {
                let row: VertexSet = self.adj[v].intersection(s).iter().map(|u| index[u]).collect();
                edges += row.len();
                row
            })
            .collect();
        Graph {
            n: keep.len(),
            adj,
            edges: edges / 2,
        }
    }

    pub fn complement(&self) -> Self {
        let all = VertexSet::full(self.n);
        let adj = (0..self.n)
            .map(|v| {
                let mut row = all.difference(&self.adj[v]);
                row.remove(v);
                row
            })
            .collect();
        Graph {
            n: self.n,
            adj,
            edges: self.n * self.n.saturating_sub(1) / 2 - self.edges,
        }
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length must equal the order");
        let mut adj = vec![VertexSet::new(); self.n];
        for v in 0..self.n {
            adj[perm[v]] = self.adj[v].iter().map(|u| perm[u]).collect();
        }
        Graph {
            n: self.n,
            adj,
            edges: self.edges,
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    /// Edge count `e(G)`.
    #[inline]
    pub fn size(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].contains(v)
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// Lowest-index vertex among those of minimum degree.
    pub fn min_degree_vertex(&self) -> Option<usize> {
        (0..self.n).min_by_key(|&v| (self.degree(v), v))
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edges);
        for u in 0..self.n {
            out.extend(self.adj[u].above(u).iter().map(|v| (u, v)));
        }
        out
    }

    /// Non-adjacent pairs `(u, v)` with `u < v`, in lexicographic order.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let all = VertexSet::full(self.n);
        let mut out = Vec::new();
        for u in 0..self.n {
            let missing = all.difference(&self.adj[u]).above(u);
            out.extend(missing.iter().map(|v| (u, v)));
        }
        out
    }

    pub fn is_clique(&self, s: &VertexSet) -> bool {
        s.iter().all(|v| {
            let mut rest = *s;
            rest.remove(v);
            rest.is_subset(&self.adj[v])
        })
    }

    /// Number of edges with both ends in `s`.
    pub fn edges_within(&self, s: &VertexSet) -> usize {
        s.iter().map(|v| self.adj[v].intersection_len(s)).sum::<usize>() / 2
    }

    /// Validates `uv` as an existing edge.
    pub fn require_edge(&self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_pair(u, v)?;
        if !self.has_edge(u, v) {
            return Err(GraphError::NotAnEdge { u, v });
        }
        Ok(())
    }

    pub fn require_vertex(&self, v: usize) -> Result<(), GraphError> {
        self.check_vertex(v)
    }

    /// Graphviz text: `graph G { ... }` with one `u -- v;` line per edge, `u < v`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.n {
            let _ = writeln!(out, "  {v};");
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges())
            .finish()
    }
}
