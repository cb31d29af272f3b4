//! Automorphisms, canonical forms and isomorphism-class enumeration.
//!
//! Both searches start from the coarsest equitable ordered partition
//! (iterated refinement by neighbour counts into each cell). Canonical
//! labeling individualizes one vertex of the first smallest non-trivial cell
//! at a time, refines again, and keeps the leaf whose relabeled adjacency
//! string is lexicographically least. Branches on a vertex whose twin (same
//! neighbourhood outside the pair) was already explored are skipped: the
//! transposition of twins is an automorphism fixing every individualized
//! vertex, so both subtrees yield the same set of leaves.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{budget, invalid, Result};
use crate::graph::Graph;
use crate::io::to_graph6;

/// Largest graph for automorphism and canonical-form searches.
pub const SEARCH_MAX_VERTICES: usize = 10;
/// Largest vertex count accepted by [`enumerate_graphs`].
pub const ENUMERATE_MAX_VERTICES: usize = 8;
/// Automorphism groups larger than this are refused rather than listed.
pub const MAX_GROUP_ORDER: usize = 1_000_000;

/// A bijection of `0..n`, stored as its image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VertexPermutation {
    image: Vec<usize>,
}

impl VertexPermutation {
    pub fn identity(n: usize) -> Self {
        VertexPermutation {
            image: (0..n).collect(),
        }
    }

    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            if v >= n || seen[v] {
                return invalid(format!("{image:?} is not a permutation"));
            }
            seen[v] = true;
        }
        Ok(VertexPermutation { image })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, v: usize) -> usize {
        self.image[v]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &VertexPermutation) -> VertexPermutation {
        VertexPermutation {
            image: other.image.iter().map(|&v| self.image[v]).collect(),
        }
    }

    pub fn inverse(&self) -> VertexPermutation {
        let mut image = vec![0; self.image.len()];
        for (v, &w) in self.image.iter().enumerate() {
            image[w] = v;
        }
        VertexPermutation { image }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(v, &w)| v == w)
    }

    pub fn is_automorphism_of(&self, g: &Graph) -> bool {
        self.image.len() == g.n()
            && (0..g.n()).all(|v| g.link(v).map(&self.image).mask() == g.row(self.image[v]))
    }
}

type Cells = Vec<Vec<usize>>;

fn split_by_counts(g: &Graph, cell: &[usize], splitter: u64) -> Option<Cells> {
    let mut keyed: Vec<(u32, usize)> = cell
        .iter()
        .map(|&v| ((g.row(v) & splitter).count_ones(), v))
        .collect();
    let first = keyed[0].0;
    if keyed.iter().all(|&(c, _)| c == first) {
        return None;
    }
    keyed.sort();
    let mut out: Cells = Vec::new();
    let mut last = None;
    for (c, v) in keyed {
        if last != Some(c) {
            out.push(Vec::new());
            last = Some(c);
        }
        out.last_mut().expect("pushed above").push(v);
    }
    Some(out)
}

/// Refines an ordered partition until it is equitable. The result depends
/// only on the graph structure and the input cell order.
fn refine(g: &Graph, mut cells: Cells) -> Cells {
    'outer: loop {
        for s in 0..cells.len() {
            let splitter = cells[s].iter().fold(0u64, |m, &v| m | 1 << v);
            for c in 0..cells.len() {
                if cells[c].len() < 2 {
                    continue;
                }
                if let Some(parts) = split_by_counts(g, &cells[c], splitter) {
                    cells.splice(c..=c, parts);
                    continue 'outer;
                }
            }
        }
        return cells;
    }
}

fn initial_cells(g: &Graph) -> Cells {
    if g.n() == 0 {
        return Vec::new();
    }
    refine(g, vec![(0..g.n()).collect()])
}

fn are_twins(g: &Graph, u: usize, v: usize) -> bool {
    g.row(u) & !(1 << v) == g.row(v) & !(1 << u)
}

fn target_cell(cells: &Cells) -> Option<usize> {
    cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() > 1)
        .min_by_key(|(i, c)| (c.len(), *i))
        .map(|(i, _)| i)
}

fn check_search_size(g: &Graph, what: &str) -> Result<()> {
    if g.n() > SEARCH_MAX_VERTICES {
        return budget(format!(
            "{what} is limited to {SEARCH_MAX_VERTICES} vertices, got {}",
            g.n()
        ));
    }
    Ok(())
}

struct CanonSearch<'a> {
    g: &'a Graph,
    best: Option<(String, Vec<usize>)>,
}

impl CanonSearch<'_> {
    fn run(&mut self, cells: Cells) {
        let cells = refine(self.g, cells);
        let Some(t) = target_cell(&cells) else {
            let mut perm = vec![0; self.g.n()];
            for (pos, cell) in cells.iter().enumerate() {
                perm[cell[0]] = pos;
            }
            let key = to_graph6(&self.g.permute(&perm));
            if self.best.as_ref().is_none_or(|(b, _)| key < *b) {
                self.best = Some((key, perm));
            }
            return;
        };
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cells[t] {
            if tried.iter().any(|&u| are_twins(self.g, u, v)) {
                continue;
            }
            tried.push(v);
            let mut next = cells.clone();
            let rest: Vec<usize> = cells[t].iter().copied().filter(|&u| u != v).collect();
            next.splice(t..=t, [vec![v], rest]);
            self.run(next);
        }
    }
}

/// Permutation sending each vertex to its canonical position.
pub fn canonical_labeling(g: &Graph) -> Result<VertexPermutation> {
    check_search_size(g, "canonical labeling")?;
    if g.n() == 0 {
        return Ok(VertexPermutation::identity(0));
    }
    let mut search = CanonSearch { g, best: None };
    search.run(initial_cells(g));
    let (_, perm) = search.best.expect("search visits at least one leaf");
    Ok(VertexPermutation { image: perm })
}

/// The canonical representative of the isomorphism class of `g`.
pub fn canonical_graph(g: &Graph) -> Result<Graph> {
    let perm = canonical_labeling(g)?;
    Ok(g.permute(perm.image()))
}

/// Byte string equal for two graphs iff they are isomorphic (graph6 of the
/// canonical representative).
pub fn canonical_form(g: &Graph) -> Result<Vec<u8>> {
    Ok(to_graph6(&canonical_graph(g)?).into_bytes())
}

pub fn are_isomorphic(a: &Graph, b: &Graph) -> Result<bool> {
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

/// All adjacency-preserving bijections, in lexicographic order of image arrays
/// (so the identity comes first).
pub fn automorphisms(g: &Graph) -> Result<Vec<VertexPermutation>> {
    check_search_size(g, "automorphism search")?;
    let n = g.n();
    let mut colour = vec![0usize; n];
    for (i, cell) in initial_cells(g).iter().enumerate() {
        for &v in cell {
            colour[v] = i;
        }
    }
    let mut out = Vec::new();
    let mut image = vec![usize::MAX; n];
    let mut used = 0u64;
    extend_automorphism(g, &colour, 0, &mut image, &mut used, &mut out)?;
    Ok(out)
}

fn extend_automorphism(
    g: &Graph,
    colour: &[usize],
    v: usize,
    image: &mut Vec<usize>,
    used: &mut u64,
    out: &mut Vec<VertexPermutation>,
) -> Result<()> {
    let n = g.n();
    if v == n {
        if out.len() >= MAX_GROUP_ORDER {
            return budget(format!(
                "automorphism group has more than {MAX_GROUP_ORDER} elements"
            ));
        }
        out.push(VertexPermutation {
            image: image.clone(),
        });
        return Ok(());
    }
    for w in 0..n {
        if *used >> w & 1 == 1 || colour[w] != colour[v] {
            continue;
        }
        let consistent = (0..v).all(|u| g.has_edge(u, v) == g.has_edge(image[u], w));
        if !consistent {
            continue;
        }
        image[v] = w;
        *used |= 1 << w;
        extend_automorphism(g, colour, v + 1, image, used, out)?;
        *used &= !(1 << w);
    }
    image[v] = usize::MAX;
    Ok(())
}

/// Orbit of each vertex under the automorphism group, as a vertex set mask.
pub fn orbits(auts: &[VertexPermutation], n: usize) -> Vec<u64> {
    (0..n)
        .map(|v| auts.iter().fold(0u64, |m, a| m | 1 << a.apply(v)))
        .collect()
}

/// One canonical representative per isomorphism class of graphs on `n`
/// vertices, sorted by canonical form.
///
/// Classes on `n` vertices are grown from the classes on `n - 1` vertices by
/// attaching a new vertex to every possible neighbour subset; every graph on
/// `n` vertices arises this way from the class of its first `n - 1` vertices.
pub fn enumerate_graphs(n: usize) -> Result<Vec<Graph>> {
    if n == 0 || n > ENUMERATE_MAX_VERTICES {
        return budget(format!(
            "enumeration supports 1..={ENUMERATE_MAX_VERTICES} vertices, got {n}"
        ));
    }
    let mut level = vec![Graph::edgeless(1)?];
    for size in 2..=n {
        level = extend_classes(&level, size)?;
    }
    Ok(level)
}

fn extend_classes(previous: &[Graph], size: usize) -> Result<Vec<Graph>> {
    let new = size - 1;
    let found: Vec<(Vec<u8>, Graph)> = previous
        .par_iter()
        .flat_map_iter(|base| {
            (0u64..1 << new).map(move |mask| {
                let mut edges: Vec<(usize, usize)> = base.edges().collect();
                edges.extend((0..new).filter(|&u| mask >> u & 1 == 1).map(|u| (u, new)));
                let g = Graph::from_edges(size, &edges)?;
                let canon = canonical_graph(&g)?;
                Ok((to_graph6(&canon).into_bytes(), canon))
            })
        })
        .collect::<Result<_>>()?;
    let classes: BTreeMap<Vec<u8>, Graph> = found.into_iter().collect();
    Ok(classes.into_values().collect())
}
