//! Exact all-pairs Hamming distances from arithmetic 0-1 products, and the
//! converse: the arithmetic product from the distances and the row/column
//! weights.
//!
//! For binary `A` (p x q) and `B` (q x r) with `C = AB` and
//! `C' = complement(A) complement(B)`:
//!
//! ```text
//! ham(A_i*, B_*j) = q - C_ij - C'_ij
//! C_ij            = (|A_i*| + |B_*j| - ham(A_i*, B_*j)) / 2
//! ```

use rayon::prelude::*;

use crate::bits::{and_popcount, BitMatrix, SymbolMatrix};
use crate::error::{Error, Result};
use crate::tree::{prim, SpanningTree, TreeEdge};

/// A dense matrix of nonnegative counts, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CountMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Entry `(i, j)` is `ham(A_i*, B_*j)`.
pub type DistanceMatrix = CountMatrix;
/// Entry `(i, j)` is the inner product of `A_i*` and `B_*j`.
pub type ProductMatrix = CountMatrix;

impl CountMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CountMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(CountMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CountMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.data
    }

    pub fn transpose(&self) -> CountMatrix {
        CountMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }
}

fn product_rows(a: &BitMatrix, bt: &BitMatrix) -> CountMatrix {
    let r = bt.rows();
    let data: Vec<u32> = (0..a.rows())
        .into_par_iter()
        .flat_map_iter(|i| {
            let row = a.row_words(i);
            (0..r).map(move |j| and_popcount(row, bt.row_words(j)))
        })
        .collect();
    CountMatrix {
        rows: a.rows(),
        cols: r,
        data,
    }
}

/// Arithmetic product of 0-1 matrices via AND-popcount of packed rows
/// against the packed rows of `B^T`.
pub fn exact_product(a: &BitMatrix, b: &BitMatrix) -> Result<ProductMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::dims(format!(
            "product of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(product_rows(a, &b.transpose()))
}

/// Binary all-pairs distances as `q - C - C'`.
pub fn binary_distances(a: &BitMatrix, b: &BitMatrix) -> Result<DistanceMatrix> {
    let direct = exact_product(a, b)?;
    let flipped = exact_product(&a.complement(), &b.complement())?;
    let q = a.cols() as u32;
    Ok(CountMatrix {
        rows: direct.rows,
        cols: direct.cols,
        data: direct
            .data
            .iter()
            .zip(&flipped.data)
            .map(|(c, cc)| q - c - cc)
            .collect(),
    })
}

/// Distances between every row of `A` and every column of `B` through
/// 0-1 products: one pair of products for binary input, one product of
/// indicator matrices per symbol otherwise.
pub fn distances_from_products(a: &SymbolMatrix, b: &SymbolMatrix) -> Result<DistanceMatrix> {
    if a.sigma() != b.sigma() {
        return Err(Error::Alphabet {
            left: a.sigma(),
            right: b.sigma(),
        });
    }
    if a.cols() != b.rows() {
        return Err(Error::dims(format!(
            "distances between {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if a.sigma() == 2 {
        return binary_distances(&a.to_bits()?, &b.to_bits()?);
    }

    let q = a.cols() as u32;
    let mut present_a = vec![false; a.sigma() as usize];
    let mut present_b = vec![false; b.sigma() as usize];
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            present_a[a.get(i, j) as usize] = true;
        }
    }
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            present_b[b.get(i, j) as usize] = true;
        }
    }
    let bt = b.transpose();
    let mut matches = CountMatrix::zeros(a.rows(), b.cols());
    for s in 0..a.sigma() as usize {
        if !(present_a[s] && present_b[s]) {
            continue;
        }
        let part = product_rows(&a.indicator(s as u16), &bt.indicator(s as u16));
        for (m, p) in matches.data.iter_mut().zip(&part.data) {
            *m += p;
        }
    }
    for m in &mut matches.data {
        *m = q - *m;
    }
    Ok(matches)
}

/// Recovers the arithmetic product from exact binary distances and the
/// one-counts of the rows of `A` and the columns of `B`.
///
/// Fails with [`Error::Inconsistent`] when an entry cannot come from an
/// exact binary distance matrix (odd or negative numerator, or an implied
/// product larger than a row or column weight).
pub fn product_from_distances(
    row_ones: &[u32],
    col_ones: &[u32],
    d: &DistanceMatrix,
) -> Result<ProductMatrix> {
    if row_ones.len() != d.rows() || col_ones.len() != d.cols() {
        return Err(Error::dims(format!(
            "{} row weights and {} column weights for a {}x{} distance matrix",
            row_ones.len(),
            col_ones.len(),
            d.rows(),
            d.cols()
        )));
    }
    let mut out = CountMatrix::zeros(d.rows(), d.cols());
    for (i, &a1) in row_ones.iter().enumerate() {
        for (j, &b1) in col_ones.iter().enumerate() {
            let num = a1 as i64 + b1 as i64 - d.get(i, j) as i64;
            if num < 0 {
                return Err(Error::Inconsistent { row: i, col: j, reason: "negative product" });
            }
            if num % 2 != 0 {
                return Err(Error::Inconsistent { row: i, col: j, reason: "odd numerator" });
            }
            let c = (num / 2) as u32;
            if c > a1.min(b1) {
                return Err(Error::Inconsistent {
                    row: i,
                    col: j,
                    reason: "product exceeds row or column weight",
                });
            }
            out.set(i, j, c);
        }
    }
    Ok(out)
}

/// Exact minimum spanning tree of the rows of `p`, by Prim over the
/// distance matrix of `p` against `p^T`.
pub fn exact_mst(p: &SymbolMatrix) -> Result<SpanningTree> {
    let d = distances_from_products(p, &p.transpose())?;
    Ok(tree_from_distances(&d))
}

pub(crate) fn tree_from_distances(d: &DistanceMatrix) -> SpanningTree {
    let edges = prim(d.rows(), |i, j| d.get(i, j))
        .into_iter()
        .map(|(u, v, w)| TreeEdge {
            u,
            v,
            weight: w,
            estimate: None,
        })
        .collect();
    SpanningTree {
        nodes: d.rows(),
        edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_examples() {
        let id = BitMatrix::from_fn(3, 3, |i, j| i == j);
        let b = BitMatrix::from_strs(&["10110", "01011", "11100"]).unwrap();
        let c = exact_product(&id, &b).unwrap();
        assert_eq!(c, CountMatrix::from_fn(3, 5, |i, j| b.get(i, j) as u32));

        let a = BitMatrix::from_strs(&["110"]).unwrap();
        let col = BitMatrix::from_strs(&["1", "0", "1"]).unwrap();
        assert_eq!(exact_product(&a, &col).unwrap().get(0, 0), 1);

        let ones_a = BitMatrix::from_fn(4, 70, |_, _| true);
        let ones_b = BitMatrix::from_fn(70, 3, |_, _| true);
        let c = exact_product(&ones_a, &ones_b).unwrap();
        assert!(c.as_slice().iter().all(|&v| v == 70));
    }

    #[test]
    fn product_dimension_mismatch() {
        let a = BitMatrix::zeros(2, 3);
        let b = BitMatrix::zeros(4, 2);
        assert!(matches!(exact_product(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn distances_examples() {
        let a = SymbolMatrix::from_rows(&[vec![1, 1, 0], vec![1, 0, 1]], 2).unwrap();
        let b = a.transpose();
        let d = distances_from_products(&a, &b).unwrap();
        assert_eq!(d.get(0, 0), 0);
        assert_eq!(d.get(1, 1), 0);
        assert_eq!(d.get(0, 1), 2);

        let bits = a.to_bits().unwrap();
        let c = exact_product(&bits, &bits.transpose()).unwrap();
        let cc = exact_product(&bits.complement(), &bits.transpose().complement()).unwrap();
        assert_eq!((c.get(0, 1), cc.get(0, 1)), (1, 0));
    }

    #[test]
    fn distances_errors() {
        let a = SymbolMatrix::zeros(2, 3, 3).unwrap();
        let b = SymbolMatrix::zeros(3, 2, 4).unwrap();
        assert!(matches!(distances_from_products(&a, &b), Err(Error::Alphabet { .. })));
        let b = SymbolMatrix::zeros(2, 2, 3).unwrap();
        assert!(matches!(distances_from_products(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn product_from_distances_examples() {
        let d = CountMatrix::from_vec(1, 1, vec![3]).unwrap();
        assert_eq!(product_from_distances(&[0], &[3], &d).unwrap().get(0, 0), 0);
        let d = CountMatrix::from_vec(1, 1, vec![0]).unwrap();
        assert_eq!(product_from_distances(&[4], &[4], &d).unwrap().get(0, 0), 4);
        let d = CountMatrix::from_vec(1, 1, vec![2]).unwrap();
        assert_eq!(product_from_distances(&[2], &[2], &d).unwrap().get(0, 0), 1);
    }

    #[test]
    fn product_from_distances_rejects_inexact() {
        let odd = CountMatrix::from_vec(1, 1, vec![1]).unwrap();
        assert!(matches!(
            product_from_distances(&[2], &[2], &odd),
            Err(Error::Inconsistent { reason: "odd numerator", .. })
        ));
        let big = CountMatrix::from_vec(1, 1, vec![6]).unwrap();
        assert!(matches!(
            product_from_distances(&[2], &[2], &big),
            Err(Error::Inconsistent { reason: "negative product", .. })
        ));
        let small = CountMatrix::from_vec(1, 1, vec![0]).unwrap();
        assert!(matches!(
            product_from_distances(&[4], &[2], &small),
            Err(Error::Inconsistent { .. })
        ));
        assert!(matches!(
            product_from_distances(&[4, 1], &[2], &small),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn mst_small_cases() {
        let one = SymbolMatrix::from_rows(&[vec![0, 1, 1]], 2).unwrap();
        let t = exact_mst(&one).unwrap();
        assert!(t.edges.is_empty());
        assert_eq!(t.cost(), 0);

        let two = SymbolMatrix::from_rows(&[vec![0, 1, 1, 0], vec![1, 1, 0, 0]], 2).unwrap();
        let t = exact_mst(&two).unwrap();
        assert_eq!(t.edges.len(), 1);
        assert_eq!(t.cost(), 2);
    }
}
