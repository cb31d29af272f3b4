//! Characteristic closures and the vertex sets used by quotient rules.
//!
//! A vertex set `S` defines a characteristic quotient exactly when it is a
//! union of characteristic closures; the quotient graph is `induced(V ∖ S)`.

use serde::Serialize;

use crate::autgrp::{automorphisms, VertexPermutation};
use crate::error::{invalid, Result};
use crate::graph::{Graph, VertexSet};

fn check_vertex(g: &Graph, v: usize) -> Result<()> {
    if v >= g.n() {
        return invalid(format!("vertex {v} out of range for {} vertices", g.n()));
    }
    Ok(())
}

/// Vertices that dominate some member of `s` (including `s` itself).
fn domination_step(g: &Graph, s: u64) -> u64 {
    let mut out = s;
    for v in VertexSet::from_mask(g.n(), s).iter() {
        for w in 0..g.n() {
            if w != v && g.dominated_by(v, w) {
                out |= 1 << w;
            }
        }
    }
    out
}

/// Least domination-closed set containing `v`.
pub fn v_omega(g: &Graph, v: usize) -> Result<VertexSet> {
    check_vertex(g, v)?;
    let mut s = 1u64 << v;
    loop {
        let next = domination_step(g, s);
        if next == s {
            return Ok(VertexSet::from_mask(g.n(), s));
        }
        s = next;
    }
}

/// Characteristic closure: union of the images of `v_omega(v)` under every
/// automorphism.
pub fn v_char(g: &Graph, v: usize) -> Result<VertexSet> {
    check_vertex(g, v)?;
    let auts = automorphisms(g)?;
    v_char_with(g, &auts, v)
}

/// [`v_char`] against a precomputed automorphism list.
pub fn v_char_with(g: &Graph, auts: &[VertexPermutation], v: usize) -> Result<VertexSet> {
    let omega = v_omega(g, v)?;
    Ok(auts.iter().fold(VertexSet::empty(g.n()), |acc, a| {
        acc.union(&omega.map(a.image()))
    }))
}

/// `v_char` for every vertex, sharing one automorphism search.
pub fn all_v_char(g: &Graph) -> Result<Vec<VertexSet>> {
    let auts = automorphisms(g)?;
    (0..g.n()).map(|v| v_char_with(g, &auts, v)).collect()
}

/// Vertices dominated by no other vertex.
pub fn transvection_free_vertices(g: &Graph) -> VertexSet {
    VertexSet::from_indices(
        g.n(),
        (0..g.n()).filter(|&v| (0..g.n()).all(|w| w == v || !g.dominated_by(v, w))),
    )
}

/// Vertices dominated by some other vertex.
pub fn transvection_admitting_vertices(g: &Graph) -> VertexSet {
    transvection_free_vertices(g).complement()
}

/// Every vertex is transvection-free and the graph is not a single vertex.
pub fn is_transvection_free_graph(g: &Graph) -> bool {
    g.n() >= 2 && transvection_free_vertices(g).len() == g.n()
}

/// Union of the characteristic closures of the members of `s`.
pub fn characteristic_closure(g: &Graph, s: &VertexSet) -> Result<VertexSet> {
    let auts = automorphisms(g)?;
    characteristic_closure_with(g, &auts, s)
}

pub fn characteristic_closure_with(
    g: &Graph,
    auts: &[VertexPermutation],
    s: &VertexSet,
) -> Result<VertexSet> {
    s.iter().try_fold(VertexSet::empty(g.n()), |acc, v| {
        Ok(acc.union(&v_char_with(g, auts, v)?))
    })
}

/// Whether `s` is a union of characteristic closures.
pub fn is_characteristic_vertex_set(g: &Graph, s: &VertexSet) -> Result<bool> {
    if s.universe() != g.n() {
        return invalid(format!(
            "vertex set over {} vertices used with a graph on {}",
            s.universe(),
            g.n()
        ));
    }
    Ok(characteristic_closure(g, s)? == *s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MbaCharSets {
    /// Intersection of the links of the non-maximal-degree vertices.
    pub intersection_links: VertexSet,
    /// `V_max` intersected with the union of those links.
    pub vmax_cap_union_links: VertexSet,
}

pub fn mba_char_sets(g: &Graph) -> Result<MbaCharSets> {
    let vmax = g.v_max();
    let rest = vmax.complement();
    if rest.is_empty() {
        return invalid("graph is regular, every vertex has maximal degree");
    }
    let mut cap = VertexSet::full(g.n());
    let mut cup = VertexSet::empty(g.n());
    for v in rest.iter() {
        cap = cap.intersection(&g.link(v));
        cup = cup.union(&g.link(v));
    }
    Ok(MbaCharSets {
        intersection_links: cap,
        vmax_cap_union_links: vmax.intersection(&cup),
    })
}
