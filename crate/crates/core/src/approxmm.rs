//! Approximate arithmetic product of 0-1 matrices.
//!
//! Sketched distances `W ~ ham(A_i*, B_*j)` and `W' ~ ham(A_i*, complement(B)_*j)`
//! = `q - ham` give two estimators of `C_ij`:
//!
//! ```text
//! D_ij  = (|A_i*| + |B_*j| - W_ij) / 2
//! D'_ij = (|A_i*| + |B_*j| - (q - W'_ij)) / 2
//! ```
//!
//! The one whose sketched distance is smaller is kept. With `delta = eps/3`
//! the error of each entry is at most `eps * min(ham, q - ham)` w.h.p.
//! Estimates are not rounded.

use crate::appapham::approx_rows;
use crate::bits::BitMatrix;
use crate::error::{Error, Result};
use crate::sketch::{SketchOptions, SketchParams};
use crate::Real;

/// Which estimator produced an entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Direct,
    Complement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxProductMatrix<T = f64> {
    rows: usize,
    cols: usize,
    epsilon: T,
    values: Vec<T>,
    branches: Vec<Branch>,
}

impl<T: Real> ApproxProductMatrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.cols + j]
    }

    pub fn branch(&self, i: usize, j: usize) -> Branch {
        self.branches[i * self.cols + j]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// Ratio between the product accuracy `eps` and the sketch accuracy.
pub const DELTA_PER_EPSILON: f64 = 1.0 / 3.0;

/// Approximates `A B` for 0-1 matrices `a` (p x q) and `b` (q x r);
/// `epsilon` must lie in `(0, 3/2)`.
///
/// The two sketch families use streams `options.stream + 1` and
/// `options.stream + 2`.
pub fn approx_product<T: Real>(
    a: &BitMatrix,
    b: &BitMatrix,
    epsilon: T,
    options: &SketchOptions<T>,
) -> Result<ApproxProductMatrix<T>> {
    if a.cols() != b.rows() {
        return Err(Error::dims(format!(
            "product of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if !(epsilon > T::zero() && epsilon < T::lit(1.5)) {
        return Err(Error::param(format!("epsilon {epsilon} outside (0, 3/2)")));
    }
    let delta = epsilon * T::lit(DELTA_PER_EPSILON);
    let direct = SketchParams::with_options(
        delta,
        options.clone().with_stream(options.stream.wrapping_add(1)),
    )?;
    let flipped = SketchParams::with_options(
        delta,
        options.clone().with_stream(options.stream.wrapping_add(2)),
    )?;

    let bt = b.transpose();
    let (w, w_bar) = rayon::join(
        || approx_rows(a, &bt, &direct),
        || approx_rows(a, &bt.complement(), &flipped),
    );
    let (w, w_bar) = (w?, w_bar?);

    let row_ones = a.row_counts();
    let col_ones = bt.row_counts();
    let q = T::from_usize(a.cols()).unwrap();
    let two = T::lit(2.0);
    let (p, r) = (a.rows(), b.cols());
    let mut values = Vec::with_capacity(p * r);
    let mut branches = Vec::with_capacity(p * r);
    for (i, &a1) in row_ones.iter().enumerate() {
        for (j, &b1) in col_ones.iter().enumerate() {
            let ones = T::from_u32(a1 + b1).unwrap();
            let (wd, wc) = (w.get(i, j), w_bar.get(i, j));
            if wd <= wc {
                values.push((ones - wd) / two);
                branches.push(Branch::Direct);
            } else {
                values.push((ones - (q - wc)) / two);
                branches.push(Branch::Complement);
            }
        }
    }
    Ok(ApproxProductMatrix {
        rows: p,
        cols: r,
        epsilon,
        values,
        branches,
    })
}

/// Per-branch slack around `C_ij` that holds w.h.p.:
///
/// ```text
/// C - direct_below     <= D  <= C + direct_above
/// C - complement_below <= D' <= C + complement_above
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorSlack<T = f64> {
    pub direct_below: T,
    pub direct_above: T,
    pub complement_below: T,
    pub complement_above: T,
}

pub fn entry_error_bounds<T: Real>(ham: u32, q: u32, delta: T) -> Result<ErrorSlack<T>> {
    if ham > q {
        return Err(Error::param(format!("distance {ham} exceeds dimension {q}")));
    }
    let h = T::from_u32(ham).unwrap();
    let rest = T::from_u32(q - ham).unwrap();
    let two = T::lit(2.0);
    let inflated = two + two * delta;
    Ok(ErrorSlack {
        direct_below: delta * h / two,
        direct_above: delta * h / inflated,
        complement_below: delta * rest / inflated,
        complement_above: delta * rest / two,
    })
}
