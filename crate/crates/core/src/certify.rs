//! Rule engine producing R∞ certificates.
//!
//! Rules are tried in a fixed order at every node. Leaf rules close a node
//! outright; reduction rules recurse into strictly smaller graphs (by vertex
//! count, then by number of non-edges) and succeed only when the recursion
//! does. A reduction that fails falls through to the next rule.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::autgrp::{canonical_graph, SEARCH_MAX_VERTICES};
use crate::charclose::{all_v_char, is_transvection_free_graph, transvection_free_vertices};
use crate::error::{invalid, Result};
use crate::graph::{Graph, VertexSet};
use crate::io::to_graph6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Rinf,
    NotRinfAbelian,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Rinf => "RINF",
            Verdict::NotRinfAbelian => "NOT_RINF_ABELIAN",
            Verdict::Undecided => "UNDECIDED",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Abelian,
    Disconnected,
    TransvectionFree,
    Srg,
    JoinFactor,
    RegularSmall,
    Simplification,
    MbaKN1,
    MbaKN2Split,
    MbaKN2Quotient,
    CharClosureGeneric,
    NoRule,
}

impl Rule {
    pub const ALL: [Rule; 12] = [
        Rule::Abelian,
        Rule::Disconnected,
        Rule::TransvectionFree,
        Rule::Srg,
        Rule::JoinFactor,
        Rule::RegularSmall,
        Rule::Simplification,
        Rule::MbaKN1,
        Rule::MbaKN2Split,
        Rule::MbaKN2Quotient,
        Rule::CharClosureGeneric,
        Rule::NoRule,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Abelian => "ABELIAN",
            Rule::Disconnected => "DISCONNECTED",
            Rule::TransvectionFree => "TRANSVECTION_FREE",
            Rule::Srg => "SRG",
            Rule::JoinFactor => "JOIN_FACTOR",
            Rule::RegularSmall => "REGULAR_SMALL",
            Rule::Simplification => "SIMPLIFICATION",
            Rule::MbaKN1 => "MBA_K_N1",
            Rule::MbaKN2Split => "MBA_K_N2_SPLIT",
            Rule::MbaKN2Quotient => "MBA_K_N2_QUOTIENT",
            Rule::CharClosureGeneric => "CHAR_CLOSURE_GENERIC",
            Rule::NoRule => "NO_RULE",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == name)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// A node of a certificate tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub rule: Rule,
    pub citation: String,
    /// graph6 of the node's graph, canonically relabeled when small enough.
    pub graph6: String,
    pub children: Vec<Certificate>,
}

impl Certificate {
    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Certificate::size).sum::<usize>()
    }

    /// Rules used anywhere in the tree, in pre-order.
    pub fn rules(&self) -> Vec<Rule> {
        let mut out = vec![self.rule];
        for c in &self.children {
            out.extend(c.rules());
        }
        out
    }
}

const CITE_ABELIAN: &str =
    "complete graph: the group is free abelian and -Id has finitely many twisted conjugacy classes";
const CITE_DISCONNECTED: &str =
    "disconnected graph: the group is a non-trivial free product, which has the R-infinity property";
const CITE_TRANSVECTION_FREE: &str =
    "transvection-free graph: every automorphism induces a map with \
     eigenvalue one on some lower central series factor";
const CITE_JOIN: &str = "join decomposition: the group is a direct product and a factor with the \
     R-infinity property passes it to the product";
const CITE_REGULAR_SMALL: &str =
    "k-regular with k in {1, 2, n-2, n-3}: a disjoint union of edges or \
     cycles, or the join of their complements";
const CITE_SIMPLIFICATION: &str =
    "the vertices of maximal degree generate a characteristic subgroup; pass to the quotient";
const CITE_MBA_N1: &str = "(n, n-1, d) max-by-abelian: the link of the non-maximal vertex is \
     characteristic and the quotient graph is disconnected";
const CITE_MBA_N2_SPLIT: &str = "(n, n-2, d) max-by-abelian whose two non-maximal links partition \
     the vertices: adding all edges between the links is a characteristic quotient";
const CITE_MBA_N2_CAP: &str =
    "(n, n-2, d) max-by-abelian: the intersection of the non-maximal links \
     is characteristic; the quotient is non-abelian and smaller";
const CITE_MBA_N2_CUP: &str =
    "(n, n-2, d) max-by-abelian: V_max meets the union of the non-maximal \
     links in a characteristic set; the quotient is non-abelian and smaller";
const CITE_CHAR_CLOSURE: &str =
    "a union of characteristic closures generates a characteristic subgroup; pass to the quotient";
const CITE_NO_RULE: &str =
    "no rule applies; the R-infinity property is conjectured but not derived";

/// Canonical graph6 when the canonical-form budget allows, plain otherwise.
pub fn certificate_key(g: &Graph) -> String {
    if g.n() <= SEARCH_MAX_VERTICES {
        if let Ok(c) = canonical_graph(g) {
            return to_graph6(&c);
        }
    }
    to_graph6(g)
}

/// `g = K^d * (factor_1 * ... * factor_m)` with every factor having a
/// connected complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JoinDecomposition {
    pub d: usize,
    pub centre: VertexSet,
    pub factor_sets: Vec<VertexSet>,
    #[serde(skip)]
    pub factors: Vec<Graph>,
}

impl JoinDecomposition {
    /// More than one piece, so each factor is strictly smaller.
    pub fn is_proper(&self) -> bool {
        self.d > 0 && !self.factors.is_empty() || self.factors.len() >= 2
    }
}

pub fn max_join_decomposition(g: &Graph) -> Result<JoinDecomposition> {
    if g.n() == 0 {
        return invalid("the empty graph has no join decomposition");
    }
    let centre = g.centre_vertices();
    let rest = centre.complement();
    let rest_graph = g.induced(&rest);
    let outside: Vec<usize> = rest.to_vec();
    let factor_sets: Vec<VertexSet> = rest_graph
        .complement()
        .components()
        .iter()
        .map(|c| VertexSet::from_indices(g.n(), c.iter().map(|i| outside[i])))
        .collect();
    let factors = factor_sets.iter().map(|s| g.induced(s)).collect();
    Ok(JoinDecomposition {
        d: centre.len(),
        centre,
        factor_sets,
        factors,
    })
}

/// Category where iterated removal of the maximal-degree vertices stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TerminalCategory {
    Disconnected,
    RegularNonComplete,
    MaxByAbelian,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplification {
    pub terminal: Graph,
    pub category: TerminalCategory,
    /// Every graph in the chain, starting with the input and ending with the terminal.
    pub chain: Vec<Graph>,
}

/// Iterated removal of the maximal-degree vertices.
pub fn simplify(g: &Graph) -> Result<Simplification> {
    if g.n() == 0 || g.is_complete() {
        return invalid("simplification needs a non-complete graph");
    }
    let mut chain = vec![g.clone()];
    loop {
        let cur = chain.last().expect("chain starts non-empty");
        let category = if !cur.is_connected() {
            Some(TerminalCategory::Disconnected)
        } else if cur.regularity().is_some() {
            Some(TerminalCategory::RegularNonComplete)
        } else if cur.mba_parameters().is_some() {
            Some(TerminalCategory::MaxByAbelian)
        } else {
            None
        };
        if let Some(category) = category {
            return Ok(Simplification {
                terminal: cur.clone(),
                category,
                chain,
            });
        }
        let next = cur.induced(&cur.v_max().complement());
        chain.push(next);
    }
}

/// Certificate for `g`.
pub fn certify(g: &Graph) -> Result<Certificate> {
    if g.n() == 0 {
        return invalid("certification needs at least one vertex");
    }
    Ok(certify_node(g))
}

fn leaf(g: &Graph, verdict: Verdict, rule: Rule, citation: impl Into<String>) -> Certificate {
    Certificate {
        verdict,
        rule,
        citation: citation.into(),
        graph6: certificate_key(g),
        children: Vec::new(),
    }
}

fn reduction(
    g: &Graph,
    rule: Rule,
    citation: impl Into<String>,
    children: Vec<Certificate>,
) -> Certificate {
    let verdict = if children.iter().any(|c| c.verdict == Verdict::Rinf) {
        Verdict::Rinf
    } else {
        Verdict::Undecided
    };
    Certificate {
        verdict,
        rule,
        citation: citation.into(),
        graph6: certificate_key(g),
        children,
    }
}

fn rinf(c: Certificate) -> Option<Certificate> {
    (c.verdict == Verdict::Rinf).then_some(c)
}

/// A quotient by `s` is usable when it leaves a non-complete graph.
fn legal_quotient(g: &Graph, s: &VertexSet) -> Option<Graph> {
    if s.is_empty() {
        return None;
    }
    let q = g.induced(&s.complement());
    (q.n() >= 2 && !q.is_complete()).then_some(q)
}

fn certify_node(g: &Graph) -> Certificate {
    if g.is_complete() {
        return leaf(g, Verdict::NotRinfAbelian, Rule::Abelian, CITE_ABELIAN);
    }
    if !g.is_connected() {
        return leaf(g, Verdict::Rinf, Rule::Disconnected, CITE_DISCONNECTED);
    }
    if is_transvection_free_graph(g) {
        return leaf(
            g,
            Verdict::Rinf,
            Rule::TransvectionFree,
            CITE_TRANSVECTION_FREE,
        );
    }
    let rules: [fn(&Graph) -> Option<Certificate>; 8] = [
        rule_srg,
        |g| rule_join(g, CITE_JOIN),
        rule_regular_small,
        rule_simplification,
        rule_mba_n1,
        rule_mba_n2_split,
        rule_mba_n2_quotient,
        rule_char_closure,
    ];
    rules
        .iter()
        .find_map(|r| r(g))
        .unwrap_or_else(|| leaf(g, Verdict::Undecided, Rule::NoRule, CITE_NO_RULE))
}

/// Strongly regular graphs split three ways; the certificate uses the
/// structural rule for the branch and records the parameters.
fn rule_srg(g: &Graph) -> Option<Certificate> {
    let p = g.srg_parameters()?;
    let params = format!("srg({}, {}, {}, {})", p.n, p.k, p.lambda, p.mu);
    if p.lambda + 1 == p.k {
        let cite = format!("{params} with lambda = k - 1 is a disjoint union of complete graphs; {CITE_DISCONNECTED}");
        return (!g.is_connected()).then(|| leaf(g, Verdict::Rinf, Rule::Disconnected, cite));
    }
    if p.mu == p.k {
        let cite = format!("{params} with mu = k is complete multipartite; {CITE_JOIN}");
        if let Some(c) = rule_join(g, &cite) {
            return Some(c);
        }
    } else if is_transvection_free_graph(g) {
        let cite = format!("{params} with lambda < k - 1 and mu < k; {CITE_TRANSVECTION_FREE}");
        return Some(leaf(g, Verdict::Rinf, Rule::TransvectionFree, cite));
    }
    Some(leaf(
        g,
        Verdict::Rinf,
        Rule::Srg,
        format!("{params}: strongly regular graphs have the R-infinity property"),
    ))
}

fn rule_join(g: &Graph, citation: &str) -> Option<Certificate> {
    let dec = max_join_decomposition(g).ok()?;
    if !dec.is_proper() {
        return None;
    }
    let children: Vec<Certificate> = dec
        .factors
        .iter()
        .filter(|f| !f.is_complete())
        .map(certify_node)
        .collect();
    if children.is_empty() {
        return None;
    }
    rinf(reduction(g, Rule::JoinFactor, citation, children))
}

fn rule_regular_small(g: &Graph) -> Option<Certificate> {
    let k = g.regularity()?;
    let n = g.n();
    (k == 1 || k == 2 || k + 2 == n || k + 3 == n).then(|| {
        leaf(
            g,
            Verdict::Rinf,
            Rule::RegularSmall,
            format!("{k}-regular on {n} vertices; {CITE_REGULAR_SMALL}"),
        )
    })
}

fn rule_simplification(g: &Graph) -> Option<Certificate> {
    if g.regularity().is_some() {
        return None;
    }
    let q = legal_quotient(g, &g.v_max())?;
    rinf(reduction(
        g,
        Rule::Simplification,
        CITE_SIMPLIFICATION,
        vec![certify_node(&q)],
    ))
}

/// The non-maximal-degree vertices of an MBA graph with `k = n - missing`.
fn mba_lows(g: &Graph, missing: usize) -> Option<Vec<usize>> {
    let p = g.mba_parameters()?;
    (p.k + missing == p.n).then(|| g.v_max().complement().to_vec())
}

fn rule_mba_n1(g: &Graph) -> Option<Certificate> {
    let lows = mba_lows(g, 1)?;
    let q = legal_quotient(g, &g.link(lows[0]))?;
    rinf(reduction(
        g,
        Rule::MbaKN1,
        CITE_MBA_N1,
        vec![certify_node(&q)],
    ))
}

fn split_links(g: &Graph, lows: &[usize]) -> (VertexSet, VertexSet) {
    (g.link(lows[0]), g.link(lows[1]))
}

fn rule_mba_n2_split(g: &Graph) -> Option<Certificate> {
    let lows = mba_lows(g, 2)?;
    let (l1, l2) = split_links(g, &lows);
    if !l1.intersection(&l2).is_empty() || l1.union(&l2) != g.vertices() {
        return None;
    }
    let joined = join_across(g, &l1, &l2);
    if joined.non_edge_count() >= g.non_edge_count() {
        return None;
    }
    rinf(reduction(
        g,
        Rule::MbaKN2Split,
        CITE_MBA_N2_SPLIT,
        vec![certify_node(&joined)],
    ))
}

/// `g` with every edge between `a` and `b` added.
pub(crate) fn join_across(g: &Graph, a: &VertexSet, b: &VertexSet) -> Graph {
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    for u in a.iter() {
        for v in b.iter() {
            if u != v && !g.has_edge(u, v) {
                edges.push((u.min(v), u.max(v)));
            }
        }
    }
    Graph::from_edges(g.n(), &edges).expect("indices come from g")
}

fn rule_mba_n2_quotient(g: &Graph) -> Option<Certificate> {
    let lows = mba_lows(g, 2)?;
    let (l1, l2) = split_links(g, &lows);
    let cap = l1.intersection(&l2);
    let cup = l1.union(&l2);
    let (s, cite) = if !cap.is_empty() {
        (cap, CITE_MBA_N2_CAP)
    } else if cup != g.vertices() {
        (g.v_max().intersection(&cup), CITE_MBA_N2_CUP)
    } else {
        return None;
    };
    let q = legal_quotient(g, &s)?;
    rinf(reduction(
        g,
        Rule::MbaKN2Quotient,
        cite,
        vec![certify_node(&q)],
    ))
}

fn rule_char_closure(g: &Graph) -> Option<Certificate> {
    if g.n() > SEARCH_MAX_VERTICES {
        return None;
    }
    let mut sets = all_v_char(g).ok()?;
    let free = transvection_free_vertices(g);
    if free.len() < g.n() {
        sets.push(free);
    }
    let mut tried: Vec<VertexSet> = Vec::new();
    for s in sets {
        if tried.contains(&s) {
            continue;
        }
        tried.push(s);
        if let Some(q) = legal_quotient(g, &s) {
            let child = certify_node(&q);
            if child.verdict == Verdict::Rinf {
                return Some(reduction(
                    g,
                    Rule::CharClosureGeneric,
                    CITE_CHAR_CLOSURE,
                    vec![child],
                ));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::fig_543;
    use crate::graph::Composition;

    fn k1_plus_k2() -> Graph {
        Graph::complete(1)
            .unwrap()
            .compose(&Graph::complete(2).unwrap(), Composition::DisjointUnion)
            .unwrap()
    }

    #[test]
    fn decomposition_examples() {
        let c4 = max_join_decomposition(&Graph::cycle(4).unwrap()).unwrap();
        assert_eq!(c4.d, 0);
        assert_eq!(c4.factors, vec![Graph::edgeless(2).unwrap(); 2]);
        let p3 = max_join_decomposition(&Graph::path(3).unwrap()).unwrap();
        assert_eq!(p3.d, 1);
        assert_eq!(p3.factors, vec![Graph::edgeless(2).unwrap()]);
        let k4 = max_join_decomposition(&Graph::complete(4).unwrap()).unwrap();
        assert_eq!((k4.d, k4.factors.len()), (4, 0));
    }

    #[test]
    fn simplify_examples() {
        let s = simplify(&fig_543()).unwrap();
        assert_eq!(s.category, TerminalCategory::MaxByAbelian);
        assert_eq!(s.terminal, fig_543());
        let s = simplify(&Graph::cycle(5).unwrap()).unwrap();
        assert_eq!(s.category, TerminalCategory::RegularNonComplete);
        let s = simplify(&Graph::path(3).unwrap()).unwrap();
        assert_eq!(s.category, TerminalCategory::Disconnected);
        assert_eq!(s.terminal, Graph::edgeless(2).unwrap());
        assert_eq!(s.chain.len(), 2);
        assert!(simplify(&Graph::complete(3).unwrap()).is_err());
    }

    #[test]
    fn certify_examples() {
        let c4 = certify(&Graph::cycle(4).unwrap()).unwrap();
        assert_eq!((c4.verdict, c4.rule), (Verdict::Rinf, Rule::JoinFactor));
        assert_eq!(c4.children.len(), 2);
        assert!(c4.children.iter().all(|c| c.rule == Rule::Disconnected));
        assert_eq!(c4.children[0].graph6, "A?");

        let c5 = certify(&Graph::cycle(5).unwrap()).unwrap();
        assert_eq!(
            (c5.verdict, c5.rule),
            (Verdict::Rinf, Rule::TransvectionFree)
        );

        let k3 = certify(&Graph::complete(3).unwrap()).unwrap();
        assert_eq!(
            (k3.verdict, k3.rule),
            (Verdict::NotRinfAbelian, Rule::Abelian)
        );

        let pet = certify(&Graph::petersen()).unwrap();
        assert_eq!(
            (pet.verdict, pet.rule),
            (Verdict::Rinf, Rule::TransvectionFree)
        );

        let g = k1_plus_k2()
            .compose(&k1_plus_k2(), Composition::SimplicialJoin)
            .unwrap();
        let c = certify(&g).unwrap();
        assert_eq!((c.verdict, c.rule), (Verdict::Rinf, Rule::JoinFactor));
        assert!(c.children.iter().all(|ch| ch.rule == Rule::Disconnected));

        assert!(certify(&Graph::empty()).is_err());
    }

    /// Five-cycle v0..v4 with chords, plus an edge w0-w1 attached at v0, v4 and v0, v1.
    fn gamma2() -> Graph {
        Graph::from_edges(
            7,
            &[
                (0, 2),
                (0, 3),
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 3),
                (2, 4),
                (3, 4),
                (5, 6),
                (5, 0),
                (5, 4),
                (6, 0),
                (6, 1),
            ],
        )
        .unwrap()
    }

    fn assert_audited(c: &Certificate) {
        assert_eq!(crate::audit::audit(c), vec![]);
    }

    #[test]
    fn join_example_needs_no_split() {
        // (K1 ⊔ K2) * (K1 ⊔ K2) satisfies the split hypothesis but is already the join.
        let g = k1_plus_k2()
            .compose(&k1_plus_k2(), Composition::SimplicialJoin)
            .unwrap();
        assert_eq!(g.mba_parameters().map(|p| (p.n, p.k, p.d)), Some((6, 4, 4)));
        assert!(rule_mba_n2_split(&g).is_none());
    }

    #[test]
    fn mba_split_rule() {
        let g = crate::io::parse_edge_list(
            "8; 0-1, 0-5, 0-6, 0-7, 1-2, 1-3, 1-4, 2-4, 2-5, 2-6, 2-7, 3-4, 3-5, 3-6, 3-7, 4-6, 4-7, 5-6, 5-7",
        )
        .unwrap();
        assert_eq!(g.mba_parameters().map(|p| (p.n, p.k)), Some((8, 6)));
        let c = certify(&g).unwrap();
        assert_eq!(
            c.rules(),
            vec![
                Rule::MbaKN2Split,
                Rule::JoinFactor,
                Rule::Disconnected,
                Rule::Disconnected
            ]
        );
        assert_audited(&c);
    }

    #[test]
    fn mba_quotient_rule() {
        let g = gamma2();
        assert_eq!(g.mba_parameters().map(|p| (p.n, p.k, p.d)), Some((7, 5, 4)));
        let c = certify(&g).unwrap();
        assert_eq!((c.verdict, c.rule), (Verdict::Rinf, Rule::MbaKN2Quotient));
        assert!(c.citation.contains("intersection"));
        assert_audited(&c);
    }

    #[test]
    fn mba_lone_vertex_rule() {
        let g = Graph::from_edges(
            6,
            &[
                (0, 5),
                (1, 3),
                (1, 4),
                (1, 5),
                (2, 3),
                (2, 4),
                (2, 5),
                (3, 4),
            ],
        )
        .unwrap();
        let c = certify(&g).unwrap();
        assert_eq!(c.rules(), vec![Rule::MbaKN1, Rule::Disconnected]);
        assert_audited(&c);
        let c = rule_mba_n1(&crate::graph::tests::fig_543()).unwrap();
        assert_eq!(c.children[0].rule, Rule::Disconnected);
        assert_audited(&c);
    }

    #[test]
    fn srg_dispatch() {
        let c4 = certify(&Graph::cycle(4).unwrap()).unwrap();
        assert!(c4.citation.starts_with("srg(4, 2, 0, 2)"));
        let k33 = Graph::complete_multipartite(&[3, 3, 3]).unwrap();
        let c = certify(&k33).unwrap();
        assert_eq!(c.rule, Rule::JoinFactor);
        assert_eq!(c.children.len(), 3);
        let pet = rule_srg(&Graph::petersen()).unwrap();
        assert_eq!(pet.rule, Rule::TransvectionFree);
        assert!(pet.citation.starts_with("srg(10, 3, 0, 1)"));
    }

    #[test]
    fn unused_rules_at_small_sizes_are_sound() {
        let c6 = Graph::cycle(6).unwrap();
        let c = rule_regular_small(&c6).unwrap();
        assert_eq!(c.rule, Rule::RegularSmall);
        assert_audited(&c);
        assert!(rule_regular_small(&Graph::petersen()).is_none());

        let p4 = Graph::path(4).unwrap();
        let c = rule_char_closure(&p4).unwrap();
        assert_eq!(
            (c.verdict, c.rule),
            (Verdict::Rinf, Rule::CharClosureGeneric)
        );
        assert_audited(&c);
    }

    #[test]
    fn serialized_field_order() {
        let json = serde_json::to_string(&certify(&Graph::cycle(5).unwrap()).unwrap()).unwrap();
        assert!(json.starts_with(r#"{"verdict":"RINF","rule":"TRANSVECTION_FREE","citation":"#));
        let key = certificate_key(&Graph::cycle(5).unwrap());
        assert!(json.ends_with(&format!(r#""graph6":"{key}","children":[]}}"#)));
    }
}
