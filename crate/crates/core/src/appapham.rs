//! Approximate all-pairs Hamming distances between the rows of `A` and the
//! columns of `B`, and the spanning-tree and nearest-neighbour routines
//! built on them.
//!
//! 1. Rows of `A` and columns of `B` are radix-sorted together as `q`-bit
//!    numbers; every (row, column) pair inside a block of identical vectors
//!    gets distance 0.
//! 2. A [`SketchFamily`] is drawn for `q` columns with `k` sized by
//!    `N = pq + qr`.
//! 3. Every row and column is sketched at every scale.
//! 4. Each remaining pair gets the smallest accepting scale `(1+delta)^l`.
//!
//! With high probability every entry satisfies
//! `W/(1+delta) <= ham <= (1+delta) W`.

use rayon::prelude::*;

use crate::bits::{binary_embed, hamming_words, unchecked_sigma_distance, BitMatrix, SymbolMatrix};
use crate::error::{Error, Result};
use crate::sketch::{SketchFamily, SketchOptions, SketchParams};
use crate::tree::{prim, SpanningTree, TreeEdge};
use crate::Real;

/// The `W` matrix: every entry is 0 or a scale `(1+delta)^l`. Entries for
/// which no scale accepted hold `q` and are flagged as saturated.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxDistanceMatrix<T = f64> {
    rows: usize,
    cols: usize,
    delta: T,
    values: Vec<T>,
    saturated: Vec<bool>,
}

impl<T: Real> ApproxDistanceMatrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.cols + j]
    }

    pub fn is_saturated(&self, i: usize, j: usize) -> bool {
        self.saturated[i * self.cols + j]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn saturated_count(&self) -> usize {
        self.saturated.iter().filter(|&&s| s).count()
    }

    /// `min(W_ij, W_ji)` for a square matrix.
    pub fn symmetric(&self, i: usize, j: usize) -> T {
        debug_assert_eq!(self.rows, self.cols);
        self.get(i, j).min(self.get(j, i))
    }
}

/// Stable LSD radix sort of vector ids by their packed words, read as
/// `q`-bit numbers with the last word most significant.
fn radix_order(stride: usize, key: impl Fn(usize, usize) -> u64, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut scratch = vec![0usize; n];
    for w in 0..stride {
        for shift in (0..64).step_by(8) {
            let digit = |id: usize| ((key(id, w) >> shift) & 0xFF) as usize;
            let mut counts = [0usize; 257];
            for &id in &order {
                counts[digit(id) + 1] += 1;
            }
            if counts.contains(&n) {
                continue;
            }
            for d in 0..256 {
                counts[d + 1] += counts[d];
            }
            for &id in &order {
                let d = digit(id);
                scratch[counts[d]] = id;
                counts[d] += 1;
            }
            std::mem::swap(&mut order, &mut scratch);
        }
    }
    order
}

/// Marks every (row of `a`, row of `bt`) pair of identical vectors.
fn identical_pairs(a: &BitMatrix, bt: &BitMatrix) -> Vec<bool> {
    let (p, r) = (a.rows(), bt.rows());
    let stride = a.stride();
    // ids 0..p are rows of A, p..p+r rows of B^T
    let words = |id: usize| if id < p { a.row_words(id) } else { bt.row_words(id - p) };
    let order = radix_order(stride, |id, w| words(id)[w], p + r);

    let mut zero = vec![false; p * r];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && words(order[end]) == words(order[start]) {
            end += 1;
        }
        let block = &order[start..end];
        for &x in block.iter().filter(|&&x| x < p) {
            for &y in block.iter().filter(|&&y| y >= p) {
                zero[x * r + (y - p)] = true;
            }
        }
        start = end;
    }
    zero
}

/// Approximate distances between the rows of `a` and the rows of `bt`.
pub(crate) fn approx_rows<T: Real>(
    a: &BitMatrix,
    bt: &BitMatrix,
    params: &SketchParams<T>,
) -> Result<ApproxDistanceMatrix<T>> {
    params.validate()?;
    let (p, q, r) = (a.rows(), a.cols(), bt.rows());
    if bt.cols() != q {
        return Err(Error::dims(format!(
            "rows of length {q} against columns of length {}",
            bt.cols()
        )));
    }
    let zero = identical_pairs(a, bt);
    if q == 0 {
        return Ok(ApproxDistanceMatrix {
            rows: p,
            cols: r,
            delta: params.delta,
            values: vec![T::zero(); p * r],
            saturated: vec![false; p * r],
        });
    }

    let n = (p * q + q * r) as u64;
    let family = SketchFamily::build(q, params, n)?;
    let sa = family.project_rows(a)?;
    let sb = family.project_rows(bt)?;
    let thresholds = family.thresholds();
    let qt = T::from_usize(q).unwrap();

    let entries: Vec<(T, bool)> = (0..p)
        .into_par_iter()
        .flat_map_iter(|i| {
            let (family, sa, sb, zero, thresholds) = (&family, &sa, &sb, &zero, &thresholds);
            (0..r).map(move |j| {
                if zero[i * r + j] {
                    return (T::zero(), false);
                }
                match family.locate(sa, i, sb, j) {
                    Some(l) => (thresholds[l], false),
                    None => (qt, true),
                }
            })
        })
        .collect();
    let (values, saturated) = entries.into_iter().unzip();
    Ok(ApproxDistanceMatrix {
        rows: p,
        cols: r,
        delta: params.delta,
        values,
        saturated,
    })
}

/// Approximate Hamming distance between every row of `a` (p x q) and every
/// column of `b` (q x r).
pub fn apphap<T: Real>(
    a: &BitMatrix,
    b: &BitMatrix,
    params: &SketchParams<T>,
) -> Result<ApproxDistanceMatrix<T>> {
    if a.cols() != b.rows() {
        return Err(Error::dims(format!(
            "distances between {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    approx_rows(a, &b.transpose(), params)
}

fn tree_over<T: Real>(
    w: &ApproxDistanceMatrix<T>,
    exact: impl Fn(usize, usize) -> u32,
) -> SpanningTree<T> {
    let n = w.rows();
    let edges = prim(n, |i, j| w.symmetric(i, j))
        .into_iter()
        .map(|(u, v, est)| TreeEdge {
            u,
            v,
            weight: exact(u, v),
            estimate: Some(est),
        })
        .collect();
    SpanningTree { nodes: n, edges }
}

/// Spanning tree of the rows of `p` built from sketched distances; its
/// exact cost is within `(1+delta)^2` of the minimum w.h.p. Edges carry
/// both the sketched and the exact weight.
pub fn approx_mst<T: Real>(p: &BitMatrix, params: &SketchParams<T>) -> Result<SpanningTree<T>> {
    let w = approx_rows(p, p, params)?;
    Ok(tree_over(&w, |u, v| hamming_words(p.row_words(u), p.row_words(v))))
}

/// Spanning tree of symbol rows: the rows are embedded in binary and
/// sketched with `delta = 1`. Exact edge weights are symbol distances; the
/// cost is within `4 ceil(log2 sigma)` of the minimum w.h.p.
pub fn approx_mst_sigma<T: Real>(
    p: &SymbolMatrix,
    options: &SketchOptions<T>,
) -> Result<SpanningTree<T>> {
    let params = SketchParams::coarse(options.clone())?;
    let embedded = binary_embed(p);
    let w = approx_rows(&embedded, &embedded, &params)?;
    Ok(tree_over(&w, |u, v| unchecked_sigma_distance(p.row(u), p.row(v))))
}

/// For every row, the index of another row at minimal symmetrized sketched
/// distance (ties to the smaller index). W.h.p. the returned neighbour is
/// within `(1+delta)^2` of the true nearest distance.
pub fn approx_nearest_neighbors<T: Real>(
    p: &BitMatrix,
    params: &SketchParams<T>,
) -> Result<Vec<usize>> {
    let n = p.rows();
    if n < 2 {
        return Err(Error::param(format!("nearest neighbours need at least 2 points, got {n}")));
    }
    let w = approx_rows(p, p, params)?;
    Ok((0..n)
        .map(|i| {
            let mut best = if i == 0 { 1 } else { 0 };
            for j in 0..n {
                if j != i && w.symmetric(i, j) < w.symmetric(i, best) {
                    best = j;
                }
            }
            best
        })
        .collect())
}
