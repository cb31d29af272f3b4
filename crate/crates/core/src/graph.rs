//! Finite simple graphs on at most 64 vertices.
//!
//! Adjacency is stored as one `u64` bit-row per vertex, so every set
//! operation on links, stars and vertex subsets is a handful of word
//! operations. Vertex order is the construction order and is preserved by
//! [`Graph::induced`] and [`Graph::compose`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Hard cap on the number of vertices (one machine word per adjacency row).
pub const MAX_VERTICES: usize = 64;

/// A subset of the vertices `0..n` of some graph.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexSet {
    mask: u64,
    n: usize,
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { mask: 0, n }
    }

    pub fn full(n: usize) -> Self {
        VertexSet {
            mask: full_mask(n),
            n,
        }
    }

    pub fn singleton(n: usize, v: usize) -> Self {
        debug_assert!(v < n);
        VertexSet { mask: 1 << v, n }
    }

    /// Builds a set from a raw mask; bits at or above `n` are dropped.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        VertexSet {
            mask: mask & full_mask(n),
            n,
        }
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for v in indices {
            s.insert(v);
        }
        s
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Size of the ground set this subset lives in.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.mask >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        assert!(
            v < self.n,
            "vertex {v} out of range for {} vertices",
            self.n
        );
        self.mask |= 1 << v;
    }

    pub fn remove(&mut self, v: usize) {
        if v < self.n {
            self.mask &= !(1 << v);
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            mask: self.mask | other.mask,
            n: self.n.max(other.n),
        }
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            mask: self.mask & other.mask,
            n: self.n,
        }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            mask: self.mask & !other.mask,
            n: self.n,
        }
    }

    /// Complement inside `0..n`.
    pub fn complement(&self) -> VertexSet {
        VertexSet {
            mask: !self.mask & full_mask(self.n),
            n: self.n,
        }
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn first(&self) -> Option<usize> {
        if self.mask == 0 {
            None
        } else {
            Some(self.mask.trailing_zeros() as usize)
        }
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> {
        let mut rest = self.mask;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(v)
            }
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Image of the set under a vertex map `v -> image[v]`.
    pub fn map(&self, image: &[usize]) -> VertexSet {
        VertexSet::from_indices(self.n, self.iter().map(|v| image[v]))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

/// Link, star and degree of a single vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighborhood {
    pub link: VertexSet,
    pub star: VertexSet,
    pub degree: usize,
}

/// How [`Graph::compose`] joins its two operands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Composition {
    DisjointUnion,
    SimplicialJoin,
}

/// Whole-graph structural summary consumed by the certification rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureFlags {
    pub connected_components: Vec<VertexSet>,
    pub is_complete: bool,
    pub is_regular: bool,
    pub regularity_degree: Option<usize>,
    pub max_degree: usize,
    pub v_max: VertexSet,
    pub centre_vertices: VertexSet,
}

/// Parameters `(n, k, lambda, mu)` of a strongly regular graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SrgParameters {
    pub n: usize,
    pub k: usize,
    pub lambda: usize,
    pub mu: usize,
}

/// Parameters `(n, k, d)` of a max-by-abelian graph: vertex count, number of
/// maximal-degree vertices, maximal degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MbaParameters {
    pub n: usize,
    pub k: usize,
    pub d: usize,
}

/// An immutable finite simple graph.
///
/// Equality compares the vertex count and adjacency under the vertex order;
/// display labels are carried along but ignored by `==`.
#[derive(Clone)]
pub struct Graph {
    n: usize,
    rows: Vec<u64>,
    labels: Vec<String>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.rows == other.rows
    }
}

impl Eq for Graph {}

impl std::hash::Hash for Graph {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.rows.hash(state);
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|v| v.to_string()).collect()
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn edgeless(n: usize) -> Result<Graph> {
        if n > MAX_VERTICES {
            return invalid(format!("{n} vertices exceeds the cap of {MAX_VERTICES}"));
        }
        Ok(Graph {
            n,
            rows: vec![0; n],
            labels: default_labels(n),
        })
    }

    /// The graph with no vertices. Only quotients produce it.
    pub fn empty() -> Graph {
        Graph {
            n: 0,
            rows: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut g = Graph::edgeless(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return invalid(format!("edge {u}-{v} out of range for {} vertices", self.n));
        }
        if u == v {
            return invalid(format!("self-loop at vertex {u}"));
        }
        self.rows[u] |= 1 << v;
        self.rows[v] |= 1 << u;
        Ok(())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Graph> {
        if labels.len() != self.n {
            return invalid(format!("{} labels for {} vertices", labels.len(), self.n));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn complete(n: usize) -> Result<Graph> {
        let mut g = Graph::edgeless(n)?;
        let all = full_mask(n);
        for v in 0..n {
            g.rows[v] = all & !(1 << v);
        }
        Ok(g)
    }

    /// `C_n` with edges `i ~ i+1 (mod n)`; requires `n >= 3`.
    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return invalid("a cycle needs at least 3 vertices");
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Result<Graph> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges)
    }

    /// Join of edgeless graphs of the given part sizes.
    pub fn complete_multipartite(parts: &[usize]) -> Result<Graph> {
        let mut g = Graph::edgeless(0)?;
        for &p in parts {
            g = g.compose(&Graph::edgeless(p)?, Composition::SimplicialJoin)?;
        }
        Ok(g)
    }

    /// Petersen graph: outer 5-cycle, inner pentagram, spokes `i ~ i+5`.
    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
            edges.push((i, i + 5));
        }
        Graph::from_edges(10, &edges).expect("static construction")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.rows[u] >> v & 1 == 1
    }

    /// Raw adjacency row of `v`.
    pub fn row(&self, v: usize) -> u64 {
        self.rows[v]
    }

    /// `lk(v)`; panics if `v` is out of range.
    pub fn link(&self, v: usize) -> VertexSet {
        VertexSet::from_mask(self.n, self.rows[v])
    }

    /// `st(v) = lk(v) ∪ {v}`.
    pub fn star(&self, v: usize) -> VertexSet {
        VertexSet::from_mask(self.n, self.rows[v] | 1 << v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones() as usize
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Number of unordered pairs of distinct non-adjacent vertices.
    pub fn non_edge_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2 - self.edge_count()
    }

    /// Edges `(u, v)` with `u < v`, ordered by `u` then `v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            VertexSet::from_mask(self.n, self.rows[u] & !full_mask(u + 1))
                .iter()
                .map(move |v| (u, v))
        })
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            invalid(format!("vertex {v} out of range for {} vertices", self.n))
        } else {
            Ok(())
        }
    }

    pub fn neighborhoods(&self, v: usize) -> Result<Neighborhood> {
        self.check_vertex(v)?;
        Ok(Neighborhood {
            link: self.link(v),
            star: self.star(v),
            degree: self.degree(v),
        })
    }

    /// `w` dominates `v` when `lk(v) ⊆ st(w)`; defined for distinct vertices.
    pub fn dominates(&self, v: usize, w: usize) -> Result<bool> {
        self.check_vertex(v)?;
        self.check_vertex(w)?;
        if v == w {
            return invalid("domination is defined for distinct vertices");
        }
        Ok(self.dominated_by(v, w))
    }

    /// Unchecked domination test `lk(v) ⊆ st(w)`.
    pub(crate) fn dominated_by(&self, v: usize, w: usize) -> bool {
        self.rows[v] & !(self.rows[w] | 1 << w) == 0
    }

    pub fn compose(&self, other: &Graph, mode: Composition) -> Result<Graph> {
        let n = self.n + other.n;
        if n > MAX_VERTICES {
            return invalid(format!("{n} vertices exceeds the cap of {MAX_VERTICES}"));
        }
        let shift = self.n;
        let low = full_mask(self.n);
        let high = full_mask(n) & !low;
        let mut rows = Vec::with_capacity(n);
        for &r in &self.rows {
            rows.push(match mode {
                Composition::DisjointUnion => r,
                Composition::SimplicialJoin => r | high,
            });
        }
        for &r in &other.rows {
            let r = if shift >= 64 { 0 } else { r << shift };
            rows.push(match mode {
                Composition::DisjointUnion => r,
                Composition::SimplicialJoin => r | low,
            });
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Ok(Graph { n, rows, labels })
    }

    pub fn complement(&self) -> Graph {
        let all = full_mask(self.n);
        let rows = (0..self.n)
            .map(|v| !self.rows[v] & all & !(1 << v))
            .collect();
        Graph {
            n: self.n,
            rows,
            labels: self.labels.clone(),
        }
    }

    /// Subgraph induced on `keep`, vertices renumbered in ascending order.
    pub fn induced(&self, keep: &VertexSet) -> Graph {
        let kept = keep.intersection(&self.vertices()).to_vec();
        let mut rows = vec![0u64; kept.len()];
        for (i, &u) in kept.iter().enumerate() {
            for (j, &v) in kept.iter().enumerate() {
                if self.rows[u] >> v & 1 == 1 {
                    rows[i] |= 1 << j;
                }
            }
        }
        let labels = kept.iter().map(|&v| self.labels[v].clone()).collect();
        Graph {
            n: kept.len(),
            rows,
            labels,
        }
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        let mut rows = vec![0u64; self.n];
        let mut labels = vec![String::new(); self.n];
        for u in 0..self.n {
            rows[perm[u]] = self.link(u).map(perm).mask();
            labels[perm[u]] = self.labels[u].clone();
        }
        Graph {
            n: self.n,
            rows,
            labels,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() * 2 == self.n * self.n.saturating_sub(1)
    }

    /// Connected components, each as a vertex set, ordered by least member.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut seen = 0u64;
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen >> start & 1 == 1 {
                continue;
            }
            let mut comp = 1u64 << start;
            let mut frontier = comp;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let fresh = self.rows[v] & !comp;
                comp |= fresh;
                frontier |= fresh;
            }
            seen |= comp;
            out.push(VertexSet::from_mask(self.n, comp));
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// `Some(k)` if every vertex has degree `k`.
    pub fn regularity(&self) -> Option<usize> {
        let k = if self.n == 0 { 0 } else { self.degree(0) };
        (0..self.n).all(|v| self.degree(v) == k).then_some(k)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Vertices of maximal degree.
    pub fn v_max(&self) -> VertexSet {
        let d = self.max_degree();
        VertexSet::from_indices(self.n, (0..self.n).filter(|&v| self.degree(v) == d))
    }

    /// Vertices adjacent to every other vertex; they generate the centre of the group.
    pub fn centre_vertices(&self) -> VertexSet {
        VertexSet::from_indices(
            self.n,
            (0..self.n).filter(|&v| self.degree(v) + 1 == self.n),
        )
    }

    pub fn structure_flags(&self) -> Result<StructureFlags> {
        if self.n == 0 {
            return invalid("the empty graph has no structure flags");
        }
        let regularity_degree = self.regularity();
        Ok(StructureFlags {
            connected_components: self.components(),
            is_complete: self.is_complete(),
            is_regular: regularity_degree.is_some(),
            regularity_degree,
            max_degree: self.max_degree(),
            v_max: self.v_max(),
            centre_vertices: self.centre_vertices(),
        })
    }

    fn common_neighbours(&self, u: usize, v: usize) -> usize {
        (self.rows[u] & self.rows[v]).count_ones() as usize
    }

    /// Strongly regular parameters, if the graph is strongly regular with
    /// `1 <= k < n - 1`.
    pub fn srg_parameters(&self) -> Option<SrgParameters> {
        let n = self.n;
        if n < 2 {
            return None;
        }
        let k = self.regularity()?;
        if k < 1 || k + 1 >= n {
            return None;
        }
        let mut lambda = None;
        let mut mu = None;
        for u in 0..n {
            for v in u + 1..n {
                let c = self.common_neighbours(u, v);
                let slot = if self.has_edge(u, v) {
                    &mut lambda
                } else {
                    &mut mu
                };
                match *slot {
                    None => *slot = Some(c),
                    Some(x) if x != c => return None,
                    _ => {}
                }
            }
        }
        // 1 <= k < n-1 guarantees both kinds of pair exist.
        Some(SrgParameters {
            n,
            k,
            lambda: lambda?,
            mu: mu?,
        })
    }

    /// `(n, k, d)` when the graph is connected, non-regular and the vertices
    /// outside `V_max` induce a complete graph.
    pub fn mba_parameters(&self) -> Option<MbaParameters> {
        if self.n == 0 || !self.is_connected() || self.regularity().is_some() {
            return None;
        }
        let vmax = self.v_max();
        if !self.induced(&vmax.complement()).is_complete() {
            return None;
        }
        Some(MbaParameters {
            n: self.n,
            k: vmax.len(),
            d: self.max_degree(),
        })
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({self})")
    }
}

/// Edge-list form `n; u-v, u-v, ...`.
impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.n)?;
        for (i, (u, v)) in self.edges().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{u}-{v}")?;
        }
        Ok(())
    }
}
