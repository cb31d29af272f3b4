//! Trace monoid over a graph's commutation relation and its Lyndon elements.
//!
//! Letters are vertex indices; two letters commute when the vertices are
//! adjacent. Words are ordered as `Vec<usize>` values are in Rust: the empty
//! word is smallest, a proper prefix precedes its extensions, and otherwise
//! the first differing letter decides. A class is represented by its largest
//! word.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{budget, invalid, Result};
use crate::graph::{Graph, VertexSet};

/// A word over the vertex alphabet.
pub type TraceWord = Vec<usize>;

/// Longest Lyndon length accepted by [`enumerate_lyndon`].
pub const MAX_LYNDON_LENGTH: usize = 6;
/// Upper bound on `n^length` words scanned by [`enumerate_lyndon`].
pub const MAX_SCANNED_WORDS: usize = 5_000_000;

/// An element of the trace monoid, stored by its standard representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct TraceClass {
    std: TraceWord,
}

impl TraceClass {
    /// The largest word of the class.
    pub fn std(&self) -> &[usize] {
        &self.std
    }

    pub fn len(&self) -> usize {
        self.std.len()
    }

    pub fn is_empty(&self) -> bool {
        self.std.is_empty()
    }
}

impl fmt::Display for TraceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.std.is_empty() {
            return write!(f, "1");
        }
        for v in &self.std {
            write!(f, "v{v}")?;
        }
        Ok(())
    }
}

/// Iterated commutator structure of a Lyndon element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BracketTree {
    Leaf(usize),
    Node(Box<BracketTree>, Box<BracketTree>),
}

impl BracketTree {
    /// Leaves from left to right.
    pub fn leaves(&self) -> Vec<usize> {
        match self {
            BracketTree::Leaf(v) => vec![*v],
            BracketTree::Node(l, r) => {
                let mut out = l.leaves();
                out.extend(r.leaves());
                out
            }
        }
    }
}

impl fmt::Display for BracketTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketTree::Leaf(v) => write!(f, "v{v}"),
            BracketTree::Node(l, r) => write!(f, "[{l},{r}]"),
        }
    }
}

fn commute(g: &Graph, a: usize, b: usize) -> bool {
    a != b && g.has_edge(a, b)
}

/// Distinct and non-adjacent: the generators do not commute.
fn non_commuting(g: &Graph, a: usize, b: usize) -> bool {
    a != b && !g.has_edge(a, b)
}

fn check_letters(g: &Graph, w: &[usize]) -> Result<()> {
    match w.iter().find(|&&v| v >= g.n()) {
        Some(v) => invalid(format!("letter {v} out of range for {} vertices", g.n())),
        None => Ok(()),
    }
}

/// All words equivalent to `w`, found by breadth-first closure under swaps of
/// adjacent commuting letters.
fn equivalent_words(g: &Graph, w: &[usize]) -> BTreeSet<TraceWord> {
    let mut seen: HashSet<TraceWord> = HashSet::from([w.to_vec()]);
    let mut queue = VecDeque::from([w.to_vec()]);
    while let Some(u) = queue.pop_front() {
        for i in 1..u.len() {
            if commute(g, u[i - 1], u[i]) {
                let mut next = u.clone();
                next.swap(i - 1, i);
                debug_assert_eq!(next.len(), w.len());
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    seen.into_iter().collect()
}

fn std_of(g: &Graph, w: &[usize]) -> TraceWord {
    equivalent_words(g, w)
        .pop_last()
        .expect("a class contains its own word")
}

pub fn trace_class(g: &Graph, w: &[usize]) -> Result<TraceClass> {
    check_letters(g, w)?;
    Ok(TraceClass { std: std_of(g, w) })
}

/// Every word representing `m`, in increasing order.
pub fn class_words(g: &Graph, m: &TraceClass) -> BTreeSet<TraceWord> {
    equivalent_words(g, &m.std)
}

pub fn trace_less(a: &TraceClass, b: &TraceClass) -> bool {
    a < b
}

/// Letters occurring in `m`.
pub fn supp(g: &Graph, m: &TraceClass) -> VertexSet {
    VertexSet::from_indices(g.n(), m.std.iter().copied())
}

/// Letters that can start a representative of `m`.
pub fn init(g: &Graph, m: &TraceClass) -> VertexSet {
    let w = &m.std;
    VertexSet::from_indices(
        g.n(),
        (0..w.len())
            .filter(|&p| w[..p].iter().all(|&a| commute(g, a, w[p])))
            .map(|p| w[p]),
    )
}

/// `supp(m)` together with every vertex that fails to commute with a letter of `m`.
pub fn zeta(g: &Graph, m: &TraceClass) -> VertexSet {
    let s = supp(g, m);
    let mut out = s;
    for a in s.iter() {
        for b in 0..g.n() {
            if non_commuting(g, a, b) {
                out.insert(b);
            }
        }
    }
    out
}

/// Lyndon test: `m < y` for every factorization `m = xy` with both factors
/// nontrivial.
pub fn is_lyndon(g: &Graph, m: &TraceClass) -> Result<bool> {
    if m.is_empty() {
        return invalid("the trivial element is not a candidate Lyndon element");
    }
    check_letters(g, &m.std)?;
    Ok(lyndon_unchecked(g, m))
}

fn lyndon_unchecked(g: &Graph, m: &TraceClass) -> bool {
    let mut suffixes: HashSet<&[usize]> = HashSet::new();
    let words = equivalent_words(g, &m.std);
    for u in &words {
        for s in 1..u.len() {
            suffixes.insert(&u[s..]);
        }
    }
    suffixes
        .into_iter()
        .all(|y| m.std.as_slice() < std_of(g, y).as_slice())
}

/// Whether the word is not beaten by one adjacent swap. Necessary for being
/// the largest word of its class.
fn locally_maximal(g: &Graph, w: &[usize]) -> bool {
    w.windows(2)
        .all(|p| !(p[0] < p[1] && commute(g, p[0], p[1])))
}

/// All Lyndon classes of the given length, sorted.
pub fn enumerate_lyndon(g: &Graph, length: usize) -> Result<Vec<TraceClass>> {
    if length == 0 || length > MAX_LYNDON_LENGTH {
        return budget(format!(
            "Lyndon length must lie in 1..={MAX_LYNDON_LENGTH}, got {length}"
        ));
    }
    let n = g.n();
    let scanned = (n as u128).pow(length as u32);
    if scanned > MAX_SCANNED_WORDS as u128 {
        return budget(format!(
            "{n}^{length} words exceeds the scan budget of {MAX_SCANNED_WORDS}"
        ));
    }
    let shards: Vec<Vec<TraceClass>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut w = vec![0; length];
            w[0] = first;
            let tail = (n as u64).pow(length as u32 - 1);
            for idx in 0..tail {
                let mut r = idx;
                for p in (1..length).rev() {
                    w[p] = (r % n as u64) as usize;
                    r /= n as u64;
                }
                if !locally_maximal(g, &w) || std_of(g, &w) != w {
                    continue;
                }
                let m = TraceClass { std: w.clone() };
                if lyndon_unchecked(g, &m) {
                    debug_assert_eq!(init(g, &m).len(), 1);
                    out.push(m);
                }
            }
            out
        })
        .collect();
    Ok(shards.into_iter().flatten().collect())
}

/// Ranks of the lower central series factors of lengths `1..=upto`.
pub fn lyndon_ranks(g: &Graph, upto: usize) -> Result<Vec<usize>> {
    (1..=upto)
        .map(|l| enumerate_lyndon(g, l).map(|v| v.len()))
        .collect()
}

/// Lyndon elements of length at most three, listed from their explicit
/// description in terms of adjacency.
pub fn closed_form_le(g: &Graph, length: usize) -> Result<Vec<TraceClass>> {
    let n = g.n();
    let nc = |a: usize, b: usize| non_commuting(g, a, b);
    let mut words: Vec<TraceWord> = Vec::new();
    match length {
        1 => words.extend((0..n).map(|i| vec![i])),
        2 => {
            for i in 0..n {
                words.extend((i + 1..n).filter(|&j| nc(i, j)).map(|j| vec![i, j]));
            }
        }
        3 => {
            for i in 0..n {
                for j in i + 1..n {
                    if nc(i, j) {
                        words.push(vec![i, i, j]);
                        words.push(vec![i, j, j]);
                    }
                    for k in j + 1..n {
                        if nc(i, j) && nc(i, k) {
                            words.push(vec![i, j, k]);
                        }
                    }
                    for k in i + 1..n {
                        if k != j && nc(i, j) && (nc(i, k) || nc(j, k)) {
                            words.push(vec![i, j, k]);
                        }
                    }
                }
            }
        }
        _ => {
            return invalid(format!(
                "closed forms exist for lengths 1..=3, got {length}"
            ))
        }
    }
    let classes: BTreeSet<TraceClass> = words
        .iter()
        .map(|w| TraceClass { std: std_of(g, w) })
        .collect();
    Ok(classes.into_iter().collect())
}

fn require_lyndon(g: &Graph, m: &TraceClass) -> Result<()> {
    if !is_lyndon(g, m)? {
        return invalid(format!("{m} is not a Lyndon element"));
    }
    Ok(())
}

/// The factorization `m = xy` into Lyndon elements with `x < y`,
/// `init(y) ∈ ζ(x)` and `y` as small as possible.
pub fn standard_factorization(g: &Graph, m: &TraceClass) -> Result<(TraceClass, TraceClass)> {
    require_lyndon(g, m)?;
    if m.len() < 2 {
        return invalid("a single letter has no factorization");
    }
    let mut pairs: BTreeSet<(TraceClass, TraceClass)> = BTreeSet::new();
    for u in equivalent_words(g, &m.std) {
        for s in 1..u.len() {
            let x = TraceClass {
                std: std_of(g, &u[..s]),
            };
            let y = TraceClass {
                std: std_of(g, &u[s..]),
            };
            pairs.insert((x, y));
        }
    }
    let best = pairs
        .into_iter()
        .filter(|(x, y)| {
            x < y
                && lyndon_unchecked(g, x)
                && lyndon_unchecked(g, y)
                && init(g, y).iter().all(|v| zeta(g, x).contains(v))
        })
        .min_by(|a, b| a.1.cmp(&b.1));
    match best {
        Some(pair) => Ok(pair),
        None => invalid(format!("{m} has no standard factorization")),
    }
}

pub fn bracketing(g: &Graph, m: &TraceClass) -> Result<BracketTree> {
    require_lyndon(g, m)?;
    bracket_lyndon(g, m)
}

fn bracket_lyndon(g: &Graph, m: &TraceClass) -> Result<BracketTree> {
    if m.len() == 1 {
        return Ok(BracketTree::Leaf(m.std[0]));
    }
    let (x, y) = standard_factorization(g, m)?;
    Ok(BracketTree::Node(
        Box::new(bracket_lyndon(g, &x)?),
        Box::new(bracket_lyndon(g, &y)?),
    ))
}
