//! Exact linear algebra on the first three lower central series factors.
//!
//! A [`SignedAut`] `a_i ↦ a_{σ(i)}^{e_i}` acts on
//! - level 1 through the vertex basis,
//! - level 2 through the basis of brackets `[v_i, v_j]`, `i < j` non-adjacent,
//! - level 3 on the span of `[v_i, v_j, v_i]` and `[v_i, v_j, v_j]`.
//!
//! Matrices use the column convention: column `c` holds the image of basis
//! vector `c`, so the matrix of a composite is the product of the matrices.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::autgrp::{automorphisms, VertexPermutation};
use crate::error::{budget, invalid, Result};
use crate::graph::Graph;

/// Largest graph for which [`signed_auts`] lists every element.
pub const SIGNED_AUT_MAX_VERTICES: usize = 7;
/// Largest graph accepted by [`check_autnottrans_theorem`].
pub const AUTCHECK_MAX_VERTICES: usize = 7;

/// A graph automorphism paired with a sign per generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SignedAut {
    perm: VertexPermutation,
    signs: Vec<i8>,
}

impl SignedAut {
    pub fn new(g: &Graph, perm: VertexPermutation, signs: Vec<i8>) -> Result<Self> {
        if !perm.is_automorphism_of(g) {
            return invalid("permutation is not an automorphism of the graph");
        }
        if signs.len() != g.n() || signs.iter().any(|&e| e != 1 && e != -1) {
            return invalid("signs must be one ±1 entry per vertex");
        }
        Ok(SignedAut { perm, signs })
    }

    pub fn identity(n: usize) -> Self {
        SignedAut {
            perm: VertexPermutation::identity(n),
            signs: vec![1; n],
        }
    }

    pub fn perm(&self) -> &VertexPermutation {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &SignedAut) -> SignedAut {
        let signs = (0..other.signs.len())
            .map(|i| self.signs[other.perm.apply(i)] * other.signs[i])
            .collect();
        SignedAut {
            perm: self.perm.compose(&other.perm),
            signs,
        }
    }

    pub fn inverse(&self) -> SignedAut {
        let inv = self.perm.inverse();
        let signs = (0..self.signs.len())
            .map(|i| self.signs[inv.apply(i)])
            .collect();
        SignedAut { perm: inv, signs }
    }

    fn fits(&self, g: &Graph) -> bool {
        self.signs.len() == g.n() && self.perm.is_automorphism_of(g)
    }
}

/// Every signed automorphism, ordered by automorphism then by sign mask
/// (bit `i` set means `e_i = -1`).
pub fn signed_auts(g: &Graph) -> Result<Vec<SignedAut>> {
    let n = g.n();
    if n > SIGNED_AUT_MAX_VERTICES {
        return budget(format!(
            "signed automorphisms are listed for at most {SIGNED_AUT_MAX_VERTICES} vertices, got {n}"
        ));
    }
    let auts = automorphisms(g)?;
    let mut out = Vec::with_capacity(auts.len() << n);
    for perm in auts {
        for mask in 0u32..1 << n {
            let signs = (0..n)
                .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                .collect();
            out.push(SignedAut {
                perm: perm.clone(),
                signs,
            });
        }
    }
    Ok(out)
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return invalid("rows have different lengths");
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// `I - self`.
    pub fn identity_minus(&self) -> Result<IntMatrix> {
        if !self.is_square() {
            return invalid("I - M needs a square matrix");
        }
        let mut out = self.clone();
        for v in &mut out.data {
            *v = -*v;
        }
        for i in 0..self.rows {
            out.data[i * self.cols + i] += 1;
        }
        Ok(out)
    }

    /// Exactly one non-zero entry, equal to ±1, in every row and column.
    pub fn is_signed_permutation(&self) -> bool {
        let row_ok = (0..self.rows).all(|r| {
            let nz: Vec<i64> = (0..self.cols)
                .map(|c| self.get(r, c))
                .filter(|&v| v != 0)
                .collect();
            nz.len() == 1 && nz[0].abs() == 1
        });
        let col_ok =
            (0..self.cols).all(|c| (0..self.rows).filter(|&r| self.get(r, c) != 0).count() == 1);
        self.is_square() && row_ok && col_ok
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[i64]> = self.data.chunks(self.cols.max(1)).take(self.rows).collect();
        write!(f, "IntMatrix{rows:?}")
    }
}

/// Fraction-free elimination; `None` on `i128` overflow.
fn bareiss_i128(m: &IntMatrix) -> Option<i128> {
    let n = m.rows;
    let mut a: Vec<i128> = m.data.iter().map(|&v| v as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k * n + k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                return Some(0);
            };
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = a[i * n + j].checked_mul(a[k * n + k])?;
                let y = a[i * n + k].checked_mul(a[k * n + j])?;
                a[i * n + j] = x.checked_sub(y)? / prev;
            }
        }
        prev = a[k * n + k];
    }
    Some(if n == 0 { 1 } else { sign * a[n * n - 1] })
}

fn bareiss_big(m: &IntMatrix) -> BigInt {
    let n = m.rows;
    let mut a: Vec<BigInt> = m.data.iter().map(|&v| BigInt::from(v)).collect();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k * n + k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                a[i * n + j] = v;
            }
        }
        prev = a[k * n + k].clone();
    }
    let det = if n == 0 {
        BigInt::one()
    } else {
        a[n * n - 1].clone()
    };
    if negate {
        -det
    } else {
        det
    }
}

/// Exact determinant.
pub fn det_exact(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return invalid(format!("determinant of a {}x{} matrix", m.rows, m.cols));
    }
    Ok(match bareiss_i128(m) {
        Some(d) => BigInt::from(d),
        None => bareiss_big(m),
    })
}

/// Cyclic shift matrix with `e_k` in the top-right corner and `e_1..e_{k-1}`
/// on the subdiagonal.
pub fn p_matrix(signs: &[i8]) -> Result<IntMatrix> {
    let k = signs.len();
    if k == 0 {
        return invalid("P needs at least one sign");
    }
    if signs.iter().any(|&e| e != 1 && e != -1) {
        return invalid("P entries must be ±1");
    }
    let mut m = IntMatrix::zeros(k, k);
    m.set(0, k - 1, signs[k - 1] as i64);
    for r in 1..k {
        m.set(r, r - 1, signs[r - 1] as i64);
    }
    Ok(m)
}

/// `det(I - m) = 0`.
pub fn has_eigenvalue_one(m: &IntMatrix) -> Result<bool> {
    Ok(det_exact(&m.identity_minus()?)?.is_zero())
}

/// Non-adjacent pairs `(i, j)`, `i < j`, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct L2Basis {
    pub pairs: Vec<(usize, usize)>,
}

/// `(i, j, i)` and `(i, j, j)` for each pair of the level-2 basis, interleaved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct L3SubBasis {
    pub triples: Vec<(usize, usize, usize)>,
}

pub fn l2_basis(g: &Graph) -> L2Basis {
    let n = g.n();
    L2Basis {
        pairs: (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !g.has_edge(i, j))
            .collect(),
    }
}

pub fn l3_sub_basis(g: &Graph) -> L3SubBasis {
    L3SubBasis {
        triples: l2_basis(g)
            .pairs
            .into_iter()
            .flat_map(|(i, j)| [(i, j, i), (i, j, j)])
            .collect(),
    }
}

/// Pair index lookup for the level-2 basis.
struct PairIndex {
    n: usize,
    index: Vec<usize>,
}

impl PairIndex {
    fn new(g: &Graph, basis: &L2Basis) -> Self {
        let n = g.n();
        let mut index = vec![usize::MAX; n * n];
        for (p, &(i, j)) in basis.pairs.iter().enumerate() {
            index[i * n + j] = p;
        }
        PairIndex { n, index }
    }

    fn get(&self, i: usize, j: usize) -> usize {
        let p = self.index[i * self.n + j];
        debug_assert_ne!(p, usize::MAX, "automorphisms preserve non-edges");
        p
    }
}

/// Matrix of the induced map on level 1, 2 or 3.
pub fn induced_matrix(g: &Graph, a: &SignedAut, level: u8) -> Result<IntMatrix> {
    if !a.fits(g) {
        return invalid("signed automorphism does not belong to this graph");
    }
    let s = |i: usize| a.perm.apply(i);
    let e = |i: usize| a.signs[i] as i64;
    match level {
        1 => {
            let n = g.n();
            let mut m = IntMatrix::zeros(n, n);
            for i in 0..n {
                m.set(s(i), i, e(i));
            }
            Ok(m)
        }
        2 => {
            let basis = l2_basis(g);
            let idx = PairIndex::new(g, &basis);
            let d = basis.pairs.len();
            let mut m = IntMatrix::zeros(d, d);
            for (c, &(i, j)) in basis.pairs.iter().enumerate() {
                let (si, sj) = (s(i), s(j));
                let swap = if si > sj { -1 } else { 1 };
                m.set(idx.get(si.min(sj), si.max(sj)), c, e(i) * e(j) * swap);
            }
            Ok(m)
        }
        3 => {
            let basis = l2_basis(g);
            let idx = PairIndex::new(g, &basis);
            let d = 2 * basis.pairs.len();
            let mut m = IntMatrix::zeros(d, d);
            for (p, &(i, j)) in basis.pairs.iter().enumerate() {
                let (si, sj) = (s(i), s(j));
                let q = idx.get(si.min(sj), si.max(sj));
                // [v_i, v_j, v_i] ↦ e_j [σi, σj, σi]; [v_i, v_j, v_j] ↦ e_i [σi, σj, σj].
                // Swapping the first two slots negates and exchanges the shapes.
                let (row_iji, row_ijj, swap) = if si < sj {
                    (2 * q, 2 * q + 1, 1)
                } else {
                    (2 * q + 1, 2 * q, -1)
                };
                m.set(row_iji, 2 * p, e(j) * swap);
                m.set(row_ijj, 2 * p + 1, e(i) * swap);
            }
            Ok(m)
        }
        _ => invalid(format!("levels are 1, 2 or 3, got {level}")),
    }
}

/// Outcome of checking every signed automorphism of one graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AutcheckReport {
    pub graph6: String,
    pub total: usize,
    /// Number of signed automorphisms whose least eigenvalue-one level is 1, 2, 3.
    pub witnesses_by_level: [usize; 3],
    pub failures: Vec<SignedAut>,
    /// Least witnessing level per signed automorphism, in [`signed_auts`] order.
    #[serde(skip)]
    pub levels: Vec<Option<u8>>,
}

/// Least level at which the induced map has eigenvalue one.
pub fn least_witness_level(g: &Graph, a: &SignedAut) -> Result<Option<u8>> {
    for level in 1..=3 {
        if has_eigenvalue_one(&induced_matrix(g, a, level)?)? {
            return Ok(Some(level));
        }
    }
    Ok(None)
}

/// Looks for an eigenvalue-one witness at levels 1-3 for every signed
/// automorphism of a non-complete graph.
pub fn check_autnottrans_theorem(g: &Graph) -> Result<AutcheckReport> {
    if g.n() == 0 {
        return invalid("the empty graph has no automorphisms to check");
    }
    if g.is_complete() {
        return invalid("the check applies to non-complete graphs only");
    }
    if g.n() > AUTCHECK_MAX_VERTICES {
        return budget(format!(
            "autcheck is limited to {AUTCHECK_MAX_VERTICES} vertices, got {}",
            g.n()
        ));
    }
    let auts = signed_auts(g)?;
    let levels: Vec<Option<u8>> = auts
        .par_iter()
        .map(|a| least_witness_level(g, a))
        .collect::<Result<_>>()?;
    let mut witnesses_by_level = [0; 3];
    let mut failures = Vec::new();
    for (a, level) in auts.iter().zip(&levels) {
        match level {
            Some(l) => witnesses_by_level[*l as usize - 1] += 1,
            None => failures.push(a.clone()),
        }
    }
    Ok(AutcheckReport {
        graph6: crate::io::to_graph6(g),
        total: auts.len(),
        witnesses_by_level,
        failures,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn signed(g: &Graph, image: Vec<usize>, signs: Vec<i8>) -> SignedAut {
        SignedAut::new(g, VertexPermutation::new(image).unwrap(), signs).unwrap()
    }

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// det(I - M) of a signed permutation matrix: product over cycles of
    /// `1 - (product of signs along the cycle)`.
    fn cycle_formula(mat: &IntMatrix) -> i64 {
        let n = mat.rows();
        let target = |c: usize| (0..n).find(|&r| mat.get(r, c) != 0).unwrap();
        let mut seen = vec![false; n];
        let mut det = 1;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut sign = 1;
            let mut c = start;
            while !seen[c] {
                seen[c] = true;
                let r = target(c);
                sign *= mat.get(r, c);
                c = r;
            }
            det *= 1 - sign;
        }
        det
    }

    /// Cofactor expansion along the first row.
    fn cofactor_det(mat: &[Vec<i64>]) -> i64 {
        let n = mat.len();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> = mat[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != c)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                sign * mat[0][c] * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn signed_aut_counts() {
        assert_eq!(signed_auts(&Graph::edgeless(2).unwrap()).unwrap().len(), 8);
        let c5 = signed_auts(&Graph::cycle(5).unwrap()).unwrap();
        assert_eq!(c5.len(), 320);
        assert_eq!(c5[0], SignedAut::identity(5));
        assert!(signed_auts(&Graph::cycle(8).unwrap()).is_err());
    }

    #[test]
    fn induced_examples() {
        let e2 = Graph::edgeless(2).unwrap();
        let swap = signed(&e2, vec![1, 0], vec![1, 1]);
        assert_eq!(induced_matrix(&e2, &swap, 2).unwrap(), m(&[&[-1]]));
        let inv = signed(&e2, vec![0, 1], vec![-1, -1]);
        assert_eq!(induced_matrix(&e2, &inv, 2).unwrap(), m(&[&[1]]));
        assert!(has_eigenvalue_one(&induced_matrix(&e2, &swap, 1).unwrap()).unwrap());
        let g = Graph::cycle(5).unwrap();
        for level in 1..=3 {
            let id = induced_matrix(&g, &SignedAut::identity(5), level).unwrap();
            assert_eq!(id, IntMatrix::identity(id.rows()));
        }
        assert!(induced_matrix(&g, &SignedAut::identity(5), 4).is_err());
        assert!(induced_matrix(&e2, &SignedAut::identity(5), 1).is_err());
    }

    #[test]
    fn level_three_swap_rule() {
        // Swapping two non-adjacent vertices: [v0,v1,v0] ↦ [v1,v0,v1] = -[v0,v1,v1].
        let e2 = Graph::edgeless(2).unwrap();
        let swap = signed(&e2, vec![1, 0], vec![1, 1]);
        assert_eq!(
            induced_matrix(&e2, &swap, 3).unwrap(),
            m(&[&[0, -1], &[-1, 0]])
        );
        let flip = signed(&e2, vec![0, 1], vec![-1, 1]);
        assert_eq!(
            induced_matrix(&e2, &flip, 3).unwrap(),
            m(&[&[1, 0], &[0, -1]])
        );
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(det_exact(&IntMatrix::identity(5)).unwrap(), BigInt::from(1));
        assert_eq!(det_exact(&m(&[&[2, 1], &[1, 1]])).unwrap(), BigInt::from(1));
        assert_eq!(det_exact(&IntMatrix::zeros(0, 0)).unwrap(), BigInt::from(1));
        assert_eq!(
            det_exact(&m(&[&[0, 1], &[1, 0]])).unwrap(),
            BigInt::from(-1)
        );
        assert!(det_exact(&IntMatrix::zeros(2, 3)).is_err());
        let p = p_matrix(&[-1, 1, 1]).unwrap();
        assert_eq!(
            det_exact(&p.identity_minus().unwrap()).unwrap(),
            BigInt::from(2)
        );
    }

    #[test]
    fn big_determinant_falls_back_exactly() {
        // Diagonal entries 2^40: the determinant 2^400 overflows i128.
        let n = 10;
        let mut a = IntMatrix::identity(n);
        for i in 0..n {
            a.set(i, i, 1 << 40);
        }
        assert_eq!(det_exact(&a).unwrap(), BigInt::from(2).pow(400));
    }

    #[test]
    fn p_matrix_examples() {
        assert_eq!(p_matrix(&[1]).unwrap(), m(&[&[1]]));
        assert!(has_eigenvalue_one(&p_matrix(&[1]).unwrap()).unwrap());
        assert!(has_eigenvalue_one(&p_matrix(&[-1, -1]).unwrap()).unwrap());
        assert!(!has_eigenvalue_one(&p_matrix(&[-1]).unwrap()).unwrap());
        assert!(p_matrix(&[]).is_err());
        assert!(has_eigenvalue_one(&IntMatrix::identity(3)).unwrap());
        assert!(!has_eigenvalue_one(&m(&[&[-1]])).unwrap());
    }

    #[test]
    fn autcheck_examples() {
        let r = check_autnottrans_theorem(&Graph::edgeless(2).unwrap()).unwrap();
        assert_eq!(r.total, 8);
        assert!(r.failures.is_empty());
        assert_eq!(r.witnesses_by_level[2], 0);
        let r = check_autnottrans_theorem(&Graph::cycle(5).unwrap()).unwrap();
        assert_eq!(r.total, 320);
        assert!(r.failures.is_empty());
        assert!(check_autnottrans_theorem(&Graph::complete(3).unwrap()).is_err());
        assert!(check_autnottrans_theorem(&Graph::cycle(8).unwrap()).is_err());
    }

    #[test]
    fn functorial_and_signed_permutation() {
        for n in 1..=4 {
            for g in crate::autgrp::enumerate_graphs(n).unwrap() {
                let auts = signed_auts(&g).unwrap();
                for level in 1..=3 {
                    let mats: Vec<IntMatrix> = auts
                        .iter()
                        .map(|a| induced_matrix(&g, a, level).unwrap())
                        .collect();
                    for (a, ma) in auts.iter().zip(&mats) {
                        assert!(ma.rows() == 0 || ma.is_signed_permutation());
                        assert_eq!(
                            cycle_formula(ma),
                            i64::try_from(det_exact(&ma.identity_minus().unwrap()).unwrap())
                                .unwrap()
                        );
                        for (b, mb) in auts.iter().zip(&mats) {
                            let lhs = induced_matrix(&g, &a.compose(b), level).unwrap();
                            assert_eq!(lhs, ma.mul(mb).unwrap(), "{g} level {level}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn eigenvalue_one_is_conjugation_invariant() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let auts = signed_auts(&g).unwrap();
        for a in auts.iter().step_by(3) {
            for b in auts.iter().step_by(5) {
                let conj = b.compose(a).compose(&b.inverse());
                for level in 1..=3 {
                    assert_eq!(
                        has_eigenvalue_one(&induced_matrix(&g, a, level).unwrap()).unwrap(),
                        has_eigenvalue_one(&induced_matrix(&g, &conj, level).unwrap()).unwrap()
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn p_matrix_identity(signs in proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 1..=12)) {
            let p = p_matrix(&signs).unwrap();
            let product: i64 = signs.iter().map(|&e| e as i64).product();
            prop_assert_eq!(det_exact(&p.identity_minus().unwrap()).unwrap(), BigInt::from(1 - product));
        }

        #[test]
        fn bareiss_matches_cofactors(rows in proptest::collection::vec(proptest::collection::vec(-9i64..=9, 5), 5), k in 1usize..=5) {
            let sub: Vec<Vec<i64>> = rows[..k].iter().map(|r| r[..k].to_vec()).collect();
            let mat = IntMatrix::from_rows(&sub).unwrap();
            prop_assert_eq!(det_exact(&mat).unwrap(), BigInt::from(cofactor_det(&sub)));
        }
    }
}
