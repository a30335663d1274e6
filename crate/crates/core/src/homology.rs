//! Cellular chains of the truncations `K^u_{n,m}` and their integer
//! homology.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chain_operad::{CellTree, ChainElement, Differential, SignConvention};
use crate::trees::enumerate_cell_trees;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("d∘d ≠ 0 on {cell}: {residue}")]
    NotAComplex { cell: String, residue: String },
    #[error("modulus {0} is not prime")]
    Modulus(u64),
}

/// Dense integer matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (c, v) in row.iter().enumerate() {
                m[(r, c)] = BigInt::from(*v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] += a * b;
                    }
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    // row[dst] -= f * row[src]
    fn sub_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for c in 0..self.cols {
            let v = &self.data[src * self.cols + c] * f;
            if !v.is_zero() {
                self.data[dst * self.cols + c] -= v;
            }
        }
    }

    fn sub_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for r in 0..self.rows {
            let v = &self.data[r * self.cols + src] * f;
            if !v.is_zero() {
                self.data[r * self.cols + dst] -= v;
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = BigInt;

    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

/// Nonzero invariant factors `d_1 | d_2 | …` of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub invariants: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }
}

/// Smith normal form by row and column reduction, pivoting on the entry of
/// least absolute value.
pub fn smith_normal_form(m: &Matrix) -> SmithForm {
    let mut a = m.clone();
    let mut invariants = Vec::new();
    let mut t = 0;
    while t < a.rows.min(a.cols) {
        let mut pivot: Option<(usize, usize)> = None;
        for r in t..a.rows {
            for c in t..a.cols {
                let v = &a[(r, c)];
                if !v.is_zero() && pivot.is_none_or(|(pr, pc)| v.abs() < a[(pr, pc)].abs()) {
                    pivot = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        a.swap_rows(t, pr);
        a.swap_cols(t, pc);
        loop {
            let p = a[(t, t)].clone();
            let mut moved = false;
            for r in t + 1..a.rows {
                if a[(r, t)].is_zero() {
                    continue;
                }
                let q = a[(r, t)].div_floor(&p);
                a.sub_row(r, t, &q);
                if !a[(r, t)].is_zero() {
                    a.swap_rows(t, r);
                    moved = true;
                    break;
                }
            }
            if moved {
                continue;
            }
            for c in t + 1..a.cols {
                if a[(t, c)].is_zero() {
                    continue;
                }
                let q = a[(t, c)].div_floor(&p);
                a.sub_col(c, t, &q);
                if !a[(t, c)].is_zero() {
                    a.swap_cols(t, c);
                    moved = true;
                    break;
                }
            }
            if moved {
                continue;
            }
            // the pivot must divide the remaining block
            let bad = (t + 1..a.rows)
                .flat_map(|r| (t + 1..a.cols).map(move |c| (r, c)))
                .find(|&(r, c)| !a[(r, c)].is_multiple_of(&p));
            match bad {
                Some((r, _)) => {
                    let one = -BigInt::one();
                    a.sub_row(t, r, &one);
                }
                None => break,
            }
        }
        invariants.push(a[(t, t)].abs());
        t += 1;
    }
    SmithForm { invariants }
}

/// Rank over `Z/p` by Gaussian elimination.
pub fn rank_mod_p(m: &Matrix, p: u64) -> usize {
    let pb = BigInt::from(p);
    let mut a: Vec<Vec<u64>> = (0..m.rows)
        .map(|r| {
            (0..m.cols)
                .map(|c| m[(r, c)].mod_floor(&pb).to_u64().expect("reduced"))
                .collect()
        })
        .collect();
    let inv = |x: u64| pow_mod(x, p - 2, p);
    let mut rank = 0;
    for c in 0..m.cols {
        let Some(r) = (rank..m.rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, r);
        let f = inv(a[rank][c]);
        for x in a[rank].iter_mut() {
            *x = *x * f % p;
        }
        let pivot = a[rank].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let g = row[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + p * p - g * y % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// The cellular chain complex of `K^u_{n,m}`.
#[derive(Clone, Debug)]
pub struct ChainComplexSlice {
    pub arity: usize,
    pub max_corks: usize,
    /// Cells of each dimension, sorted by notation.
    pub basis: Vec<Vec<CellTree>>,
    /// `boundaries[k]`: rows index `basis[k-1]`, columns `basis[k]`;
    /// `boundaries[0]` is the empty map out of `C_0`.
    pub boundaries: Vec<Matrix>,
}

/// Cells of `K^u_{n,m}` grouped by dimension.
pub fn cells_by_degree(n: usize, max_corks: usize) -> Vec<Vec<CellTree>> {
    let mut basis: Vec<Vec<CellTree>> = Vec::new();
    for t in enumerate_cell_trees(n, max_corks, true) {
        let c = CellTree::new(t).expect("enumerated trees are cells");
        let d = c.degree();
        if basis.len() <= d {
            basis.resize(d + 1, Vec::new());
        }
        basis[d].push(c);
    }
    basis
}

pub fn f_vector(n: usize, max_corks: usize) -> Vec<usize> {
    cells_by_degree(n, max_corks).iter().map(Vec::len).collect()
}

pub fn build_complex(
    n: usize,
    max_corks: usize,
    conv: &SignConvention,
) -> Result<ChainComplexSlice, HomologyError> {
    let basis = cells_by_degree(n, max_corks);
    let diffs: Vec<Vec<ChainElement>> = basis
        .iter()
        .map(|cells| {
            cells
                .par_iter()
                .map_init(|| Differential::new(*conv), |d, c| d.monomial(c))
                .collect()
        })
        .collect();
    let mut boundaries = Vec::with_capacity(basis.len());
    for (k, cells) in basis.iter().enumerate() {
        if k == 0 {
            boundaries.push(Matrix::zeros(0, cells.len()));
            continue;
        }
        let rows: HashMap<&CellTree, usize> =
            basis[k - 1].iter().enumerate().map(|(r, t)| (t, r)).collect();
        let mut m = Matrix::zeros(rows.len(), cells.len());
        for (c, dx) in diffs[k].iter().enumerate() {
            for (t, coef) in dx.terms() {
                let r = *rows
                    .get(t)
                    .unwrap_or_else(|| panic!("d leaves the truncation: {t}"));
                m[(r, c)] = coef.clone();
            }
        }
        boundaries.push(m);
    }
    // d∘d = 0 on every cell
    let mut d = Differential::new(*conv);
    for k in 2..basis.len() {
        if !boundaries[k - 1].mul(&boundaries[k]).is_zero() {
            for (c, dx) in diffs[k].iter().enumerate() {
                let dd = d.apply(dx);
                if !dd.is_zero() {
                    return Err(HomologyError::NotAComplex {
                        cell: basis[k][c].to_string(),
                        residue: dd.to_string(),
                    });
                }
            }
        }
    }
    Ok(ChainComplexSlice {
        arity: n,
        max_corks,
        basis,
        boundaries,
    })
}

impl ChainComplexSlice {
    pub fn f_vector(&self) -> Vec<usize> {
        self.basis.iter().map(Vec::len).collect()
    }
}

pub fn euler_characteristic(c: &ChainComplexSlice) -> i64 {
    c.basis
        .iter()
        .enumerate()
        .map(|(k, b)| if k % 2 == 0 { b.len() as i64 } else { -(b.len() as i64) })
        .sum()
}

/// Homology in one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub degree: usize,
    pub betti: usize,
    pub torsion: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologySummary {
    pub groups: Vec<HomologyGroup>,
}

impl HomologySummary {
    /// `H_0 = Z` and nothing else.
    pub fn is_point(&self) -> bool {
        self.groups.iter().all(|g| {
            g.torsion.is_empty() && g.betti == usize::from(g.degree == 0)
        }) && !self.groups.is_empty()
    }
}

pub fn homology_summary(c: &ChainComplexSlice) -> HomologySummary {
    let snf: Vec<SmithForm> = c.boundaries.par_iter().map(smith_normal_form).collect();
    let groups = (0..c.basis.len())
        .map(|k| {
            let rank_out = snf[k].rank();
            let rank_in = snf.get(k + 1).map_or(0, SmithForm::rank);
            let torsion = snf
                .get(k + 1)
                .map(|s| {
                    s.invariants
                        .iter()
                        .filter(|d| !d.is_one())
                        .map(|d| d.to_u64().expect("torsion fits in u64"))
                        .collect()
                })
                .unwrap_or_default();
            HomologyGroup {
                degree: k,
                betti: c.basis[k].len() - rank_out - rank_in,
                torsion,
            }
        })
        .collect();
    HomologySummary { groups }
}

/// Betti numbers over `Z/p`.
pub fn betti_mod_p(c: &ChainComplexSlice, p: u64) -> Result<Vec<usize>, HomologyError> {
    if !is_prime(p) {
        return Err(HomologyError::Modulus(p));
    }
    let ranks: Vec<usize> = c.boundaries.iter().map(|m| rank_mod_p(m, p)).collect();
    Ok((0..c.basis.len())
        .map(|k| c.basis[k].len() - ranks[k] - ranks.get(k + 1).copied().unwrap_or(0))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModPBetti {
    pub modulus: u64,
    pub betti: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyReport {
    pub arity: usize,
    pub max_corks: usize,
    pub f_vector: Vec<usize>,
    pub euler: i64,
    pub homology: Vec<HomologyGroup>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mod_p: Option<ModPBetti>,
}

pub fn homology_report(
    n: usize,
    max_corks: usize,
    conv: &SignConvention,
    modulus: Option<u64>,
) -> Result<HomologyReport, HomologyError> {
    let c = build_complex(n, max_corks, conv)?;
    let mod_p = modulus
        .map(|p| betti_mod_p(&c, p).map(|betti| ModPBetti { modulus: p, betti }))
        .transpose()?;
    Ok(HomologyReport {
        arity: n,
        max_corks,
        f_vector: c.f_vector(),
        euler: euler_characteristic(&c),
        homology: homology_summary(&c).groups,
        mod_p,
    })
}

/// A cell of the face poset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceNode {
    pub tree: String,
    pub dim: usize,
}

/// A codimension-one incidence `from → to` with its coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceArc {
    pub from: usize,
    pub to: usize,
    pub coef: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceGraph {
    pub nodes: Vec<FaceNode>,
    pub arcs: Vec<FaceArc>,
}

/// Cells ordered by (dimension, notation) and their boundary incidences.
pub fn face_graph(c: &ChainComplexSlice) -> FaceGraph {
    let mut nodes = Vec::new();
    let mut offsets = Vec::new();
    for (k, cells) in c.basis.iter().enumerate() {
        offsets.push(nodes.len());
        nodes.extend(cells.iter().map(|t| FaceNode {
            tree: t.to_string(),
            dim: k,
        }));
    }
    let mut arcs = Vec::new();
    for k in 1..c.basis.len() {
        let m = &c.boundaries[k];
        for col in 0..m.cols() {
            for row in 0..m.rows() {
                if !m[(row, col)].is_zero() {
                    arcs.push(FaceArc {
                        from: offsets[k] + col,
                        to: offsets[k - 1] + row,
                        coef: m[(row, col)].to_string(),
                    });
                }
            }
        }
    }
    FaceGraph { nodes, arcs }
}
