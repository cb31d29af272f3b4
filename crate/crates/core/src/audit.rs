//! Independent re-validation of certificate trees.
//!
//! Each node's graph is decoded from its graph6 string and every rule
//! hypothesis is recomputed from raw adjacency with helpers local to this
//! module. Child graphs are matched up to isomorphism. The only shared
//! machinery is graph6 decoding, canonical forms and the automorphism list.

use serde::Serialize;

use crate::autgrp::{automorphisms, canonical_form, SEARCH_MAX_VERTICES};
use crate::certify::{Certificate, Rule, Verdict};
use crate::graph::Graph;
use crate::io::from_graph6;

/// One failed check, located by the path of child indices from the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditIssue {
    pub path: Vec<usize>,
    pub rule: Rule,
    pub message: String,
}

/// All failed checks in the tree; empty means the certificate is sound.
pub fn audit(cert: &Certificate) -> Vec<AuditIssue> {
    let mut issues = Vec::new();
    let mut path = Vec::new();
    audit_node(cert, &mut path, &mut issues);
    issues
}

struct Raw {
    n: usize,
    adj: Vec<Vec<bool>>,
}

impl Raw {
    fn new(g: &Graph) -> Raw {
        let n = g.n();
        Raw {
            n,
            adj: (0..n)
                .map(|u| (0..n).map(|v| g.has_edge(u, v)).collect())
                .collect(),
        }
    }

    fn deg(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&b| b).count()
    }

    fn complete(&self) -> bool {
        (0..self.n).all(|u| (0..self.n).all(|v| u == v || self.adj[u][v]))
    }

    fn non_edges(&self) -> usize {
        let mut c = 0;
        for u in 0..self.n {
            for v in u + 1..self.n {
                c += usize::from(!self.adj[u][v]);
            }
        }
        c
    }

    /// Component index per vertex for the graph (`flip = false`) or its complement.
    fn components(&self, keep: &[usize], flip: bool) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for &s in keep {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                for &v in keep {
                    if !seen[v] && u != v && self.adj[u][v] != flip {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    fn connected(&self) -> bool {
        let all: Vec<usize> = (0..self.n).collect();
        self.components(&all, false).len() <= 1
    }

    /// `lk(v) ⊆ st(w)`.
    fn dominated(&self, v: usize, w: usize) -> bool {
        (0..self.n).all(|x| !self.adj[v][x] || x == w || self.adj[w][x])
    }

    fn regular(&self) -> Option<usize> {
        let k = if self.n == 0 { 0 } else { self.deg(0) };
        (0..self.n).all(|v| self.deg(v) == k).then_some(k)
    }

    fn max_deg(&self) -> usize {
        (0..self.n).map(|v| self.deg(v)).max().unwrap_or(0)
    }

    fn vmax(&self) -> Vec<bool> {
        let d = self.max_deg();
        (0..self.n).map(|v| self.deg(v) == d).collect()
    }

    fn induced(&self, keep: &[usize]) -> Graph {
        let mut edges = Vec::new();
        for (a, &u) in keep.iter().enumerate() {
            for (b, &v) in keep.iter().enumerate().skip(a + 1) {
                if self.adj[u][v] {
                    edges.push((a, b));
                }
            }
        }
        Graph::from_edges(keep.len(), &edges).expect("indices are in range")
    }

    fn without(&self, removed: &[bool]) -> Graph {
        let keep: Vec<usize> = (0..self.n).filter(|&v| !removed[v]).collect();
        self.induced(&keep)
    }

    /// Non-regular, connected, and the non-maximal vertices form a clique.
    /// Returns the non-maximal vertices.
    fn mba_lows(&self) -> Option<Vec<usize>> {
        if self.regular().is_some() || !self.connected() {
            return None;
        }
        let vmax = self.vmax();
        let lows: Vec<usize> = (0..self.n).filter(|&v| !vmax[v]).collect();
        let clique = lows
            .iter()
            .all(|&u| lows.iter().all(|&v| u == v || self.adj[u][v]));
        clique.then_some(lows)
    }

    fn link(&self, v: usize) -> Vec<bool> {
        self.adj[v].clone()
    }

    /// Closed under domination and invariant under every automorphism.
    fn characteristic(&self, g: &Graph, s: &[bool]) -> std::result::Result<bool, String> {
        for v in 0..self.n {
            for w in 0..self.n {
                if s[v] && !s[w] && v != w && self.dominated(v, w) {
                    return Ok(false);
                }
            }
        }
        let auts = automorphisms(g).map_err(|e| e.to_string())?;
        for a in &auts {
            if !a.is_automorphism_of(g) {
                return Err("automorphism search returned a non-automorphism".into());
            }
            if (0..self.n).any(|v| s[v] != s[a.apply(v)]) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn same_class(a: &Graph, b: &Graph) -> bool {
    a.n() == b.n()
        && a.edge_count() == b.edge_count()
        && matches!((canonical_form(a), canonical_form(b)), (Ok(x), Ok(y)) if x == y)
}

struct Ctx<'a> {
    path: &'a [usize],
    rule: Rule,
    issues: &'a mut Vec<AuditIssue>,
}

impl Ctx<'_> {
    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) -> bool {
        if !ok {
            self.issues.push(AuditIssue {
                path: self.path.to_vec(),
                rule: self.rule,
                message: message(),
            });
        }
        ok
    }
}

fn audit_node(cert: &Certificate, path: &mut Vec<usize>, issues: &mut Vec<AuditIssue>) {
    let mut ctx = Ctx {
        path,
        rule: cert.rule,
        issues,
    };
    let g = match from_graph6(&cert.graph6) {
        Ok(g) => g,
        Err(e) => {
            ctx.check(false, || {
                format!("undecodable graph6 {:?}: {e}", cert.graph6)
            });
            return;
        }
    };
    let raw = Raw::new(&g);
    let children: Vec<Option<Graph>> = cert
        .children
        .iter()
        .map(|c| from_graph6(&c.graph6).ok())
        .collect();
    ctx.check(children.iter().all(Option::is_some), || {
        "undecodable child graph6".into()
    });
    let kids: Vec<Graph> = children.into_iter().flatten().collect();
    let any_rinf_child = cert.children.iter().any(|c| c.verdict == Verdict::Rinf);

    for k in &kids {
        let smaller = (k.n(), Raw::new(k).non_edges()) < (raw.n, raw.non_edges());
        ctx.check(smaller, || {
            format!("child {k} does not decrease the measure")
        });
    }

    let expects_rinf = !matches!(cert.rule, Rule::Abelian | Rule::NoRule);
    if expects_rinf {
        ctx.check(cert.verdict == Verdict::Rinf, || {
            format!("rule {} must give RINF", cert.rule)
        });
    }
    let is_reduction = matches!(
        cert.rule,
        Rule::JoinFactor
            | Rule::Simplification
            | Rule::MbaKN1
            | Rule::MbaKN2Split
            | Rule::MbaKN2Quotient
            | Rule::CharClosureGeneric
    );
    if is_reduction {
        ctx.check(any_rinf_child, || "reduction without an RINF child".into());
    } else {
        ctx.check(cert.children.is_empty(), || {
            "leaf rule with children".into()
        });
    }

    match cert.rule {
        Rule::Abelian => {
            ctx.check(cert.verdict == Verdict::NotRinfAbelian, || {
                "abelian leaf with wrong verdict".into()
            });
            ctx.check(raw.complete(), || "ABELIAN on a non-complete graph".into());
        }
        Rule::NoRule => {
            ctx.check(cert.verdict == Verdict::Undecided, || {
                "fallback must be UNDECIDED".into()
            });
        }
        Rule::Disconnected => {
            ctx.check(!raw.connected(), || "graph is connected".into());
        }
        Rule::TransvectionFree => {
            let free = (0..raw.n).all(|v| (0..raw.n).all(|w| v == w || !raw.dominated(v, w)));
            ctx.check(raw.n >= 2 && free, || "some vertex is dominated".into());
        }
        Rule::Srg => audit_srg(&raw, &mut ctx),
        Rule::JoinFactor => audit_join(&raw, &kids, &mut ctx),
        Rule::RegularSmall => {
            let n = raw.n;
            let ok = !raw.complete()
                && raw
                    .regular()
                    .is_some_and(|k| k == 1 || k == 2 || k + 2 == n || k + 3 == n);
            ctx.check(ok, || "not k-regular with k in {1, 2, n-2, n-3}".into());
        }
        Rule::Simplification => {
            let vmax = raw.vmax();
            ctx.check(raw.regular().is_none(), || "graph is regular".into());
            audit_quotient(&raw, &g, &vmax, &kids, &mut ctx);
        }
        Rule::MbaKN1 => match raw.mba_lows() {
            Some(lows) if lows.len() == 1 => {
                let lk = raw.link(lows[0]);
                audit_quotient(&raw, &g, &lk, &kids, &mut ctx);
                if let Some(k) = kids.first() {
                    ctx.check(!Raw::new(k).connected(), || "quotient is connected".into());
                }
            }
            _ => {
                ctx.check(false, || "not an (n, n-1, d) max-by-abelian graph".into());
            }
        },
        Rule::MbaKN2Split => audit_mba_split(&raw, &kids, &mut ctx),
        Rule::MbaKN2Quotient => match raw.mba_lows() {
            Some(lows) if lows.len() == 2 => {
                let (l1, l2) = (raw.link(lows[0]), raw.link(lows[1]));
                let cap: Vec<bool> = (0..raw.n).map(|v| l1[v] && l2[v]).collect();
                let cup: Vec<bool> = (0..raw.n).map(|v| l1[v] || l2[v]).collect();
                let vmax = raw.vmax();
                let s: Option<Vec<bool>> = if cap.iter().any(|&b| b) {
                    Some(cap)
                } else if cup.iter().any(|&b| !b) {
                    Some((0..raw.n).map(|v| vmax[v] && cup[v]).collect())
                } else {
                    None
                };
                match s {
                    Some(s) => audit_quotient(&raw, &g, &s, &kids, &mut ctx),
                    None => {
                        ctx.check(false, || "links partition the vertices".into());
                    }
                }
            }
            _ => {
                ctx.check(false, || "not an (n, n-2, d) max-by-abelian graph".into());
            }
        },
        Rule::CharClosureGeneric => audit_char_closure(&raw, &g, &kids, &mut ctx),
    }
    recurse(cert, path, issues);
}

fn recurse(cert: &Certificate, path: &mut Vec<usize>, issues: &mut Vec<AuditIssue>) {
    for (i, c) in cert.children.iter().enumerate() {
        path.push(i);
        audit_node(c, path, issues);
        path.pop();
    }
}

fn audit_srg(raw: &Raw, ctx: &mut Ctx) {
    let n = raw.n;
    let Some(k) = raw.regular() else {
        ctx.check(false, || "SRG node is not regular".into());
        return;
    };
    let mut lambda = None;
    let mut mu = None;
    let mut ok = k >= 1 && k + 1 < n;
    for u in 0..n {
        for v in u + 1..n {
            let common = (0..n).filter(|&x| raw.adj[u][x] && raw.adj[v][x]).count();
            let slot = if raw.adj[u][v] { &mut lambda } else { &mut mu };
            ok &= *slot.get_or_insert(common) == common;
        }
    }
    ctx.check(ok, || "not strongly regular".into());
}

/// Children must be distinct non-complete factors of the maximal join
/// decomposition, which must have more than one piece.
fn audit_join(raw: &Raw, kids: &[Graph], ctx: &mut Ctx) {
    let n = raw.n;
    let centre: Vec<usize> = (0..n).filter(|&v| raw.deg(v) + 1 == n).collect();
    let rest: Vec<usize> = (0..n).filter(|&v| raw.deg(v) + 1 != n).collect();
    let parts = raw.components(&rest, true);
    ctx.check(
        !centre.is_empty() && !parts.is_empty() || parts.len() >= 2,
        || "join decomposition is trivial".into(),
    );
    let mut factors: Vec<Graph> = parts.iter().map(|p| raw.induced(p)).collect();
    factors.retain(|f| !Raw::new(f).complete());
    for k in kids {
        match factors.iter().position(|f| same_class(f, k)) {
            Some(i) => {
                factors.remove(i);
            }
            None => {
                ctx.check(false, || {
                    format!("child {k} is not an unused non-complete join factor")
                });
            }
        }
    }
}

fn audit_quotient(raw: &Raw, g: &Graph, s: &[bool], kids: &[Graph], ctx: &mut Ctx) {
    if !ctx.check(kids.len() == 1, || {
        "quotient rule needs exactly one child".into()
    }) {
        return;
    }
    let q = raw.without(s);
    ctx.check(s.iter().any(|&b| b), || "quotient by the empty set".into());
    ctx.check(q.n() >= 2 && !Raw::new(&q).complete(), || {
        "quotient is complete".into()
    });
    ctx.check(same_class(&q, &kids[0]), || {
        format!("child is not the quotient {q}")
    });
    if g.n() <= SEARCH_MAX_VERTICES {
        match raw.characteristic(g, s) {
            Ok(ok) => {
                ctx.check(ok, || "removed set is not characteristic".into());
            }
            Err(e) => {
                ctx.check(false, || e);
            }
        }
    }
}

fn audit_mba_split(raw: &Raw, kids: &[Graph], ctx: &mut Ctx) {
    let Some(lows) = raw.mba_lows().filter(|l| l.len() == 2) else {
        ctx.check(false, || "not an (n, n-2, d) max-by-abelian graph".into());
        return;
    };
    let (l1, l2) = (raw.link(lows[0]), raw.link(lows[1]));
    let partition = (0..raw.n).all(|v| l1[v] != l2[v]);
    ctx.check(partition, || "links do not partition the vertices".into());
    if !ctx.check(kids.len() == 1, || {
        "split rule needs exactly one child".into()
    }) {
        return;
    }
    let mut edges = Vec::new();
    for u in 0..raw.n {
        for v in u + 1..raw.n {
            if raw.adj[u][v] || l1[u] != l1[v] {
                edges.push((u, v));
            }
        }
    }
    let joined = Graph::from_edges(raw.n, &edges).expect("indices are in range");
    ctx.check(same_class(&joined, &kids[0]), || {
        "child is not the join of the two links".into()
    });
}

/// Some non-empty characteristic set must produce the child as quotient.
fn audit_char_closure(raw: &Raw, g: &Graph, kids: &[Graph], ctx: &mut Ctx) {
    if !ctx.check(kids.len() == 1, || {
        "closure rule needs exactly one child".into()
    }) {
        return;
    }
    if !ctx.check(raw.n <= SEARCH_MAX_VERTICES, || {
        "graph too large to audit".into()
    }) {
        return;
    }
    let found = (1u32..1 << raw.n).any(|mask| {
        let s: Vec<bool> = (0..raw.n).map(|v| mask >> v & 1 == 1).collect();
        let q = raw.without(&s);
        q.n() >= 2 && same_class(&q, &kids[0]) && raw.characteristic(g, &s).unwrap_or(false)
    });
    ctx.check(found, || "no characteristic set yields the child".into());
}
