//! Packed 0-1 matrices, small-alphabet symbol matrices and the exact
//! Hamming kernels on top of them.
//!
//! Column `j` of a packed row lives in bit `j % 64` of word `j / 64`
//! (least significant bit first). Bits past the last column are always
//! zero, so popcounts and word-wise comparisons never see padding.

use crate::error::{Error, Result};

pub const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// XOR-popcount over equally long word slices.
#[inline]
pub(crate) fn hamming_words(x: &[u64], y: &[u64]) -> u32 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| (a ^ b).count_ones()).sum()
}

#[inline]
pub(crate) fn and_popcount(x: &[u64], y: &[u64]) -> u32 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| (a & b).count_ones()).sum()
}

/// A borrowed packed bit row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BitRow<'a> {
    words: &'a [u64],
    len: usize,
}

impl<'a> BitRow<'a> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &'a [u64] {
        self.words
    }

    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.len, "bit {j} out of range for length {}", self.len);
        (self.words[j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|j| self.get(j)).collect()
    }
}

/// An owned packed bit vector (sketches, projections).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (j, &b) in bits.iter().enumerate() {
            v.set(j, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, j: usize, value: bool) {
        assert!(j < self.len, "bit {j} out of range for length {}", self.len);
        let mask = 1u64 << (j % WORD_BITS);
        if value {
            self.words[j / WORD_BITS] |= mask;
        } else {
            self.words[j / WORD_BITS] &= !mask;
        }
    }

    pub fn get(&self, j: usize) -> bool {
        self.as_row().get(j)
    }

    pub fn count_ones(&self) -> u32 {
        self.as_row().count_ones()
    }

    pub fn as_row(&self) -> BitRow<'_> {
        BitRow {
            words: &self.words,
            len: self.len,
        }
    }

    /// Bitwise XOR of two vectors of equal length.
    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        if self.len != other.len {
            return Err(Error::dims(format!(
                "xor of vectors of length {} and {}",
                self.len, other.len
            )));
        }
        Ok(BitVector {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
            len: self.len,
        })
    }
}

/// Exact Hamming distance between two packed rows.
pub fn hamming_distance(x: BitRow<'_>, y: BitRow<'_>) -> Result<u32> {
    if x.len != y.len {
        return Err(Error::dims(format!(
            "hamming distance between rows of length {} and {}",
            x.len, y.len
        )));
    }
    Ok(hamming_words(x.words, y.words))
}

/// A dense 0-1 matrix with rows packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from rows of booleans; all rows must share a length.
    pub fn from_rows<R: AsRef<[bool]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.as_ref().len() != cols) {
            return Err(Error::dims(format!(
                "row {i} has {} columns, expected {cols}",
                r.as_ref().len()
            )));
        }
        Ok(BitMatrix::from_fn(rows.len(), cols, |i, j| rows[i].as_ref()[j]))
    }

    /// Builds a matrix from strings over `{0,1}`, e.g. `["0101", "1100"]`.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let bools: Vec<Vec<bool>> = rows
            .iter()
            .map(|s| {
                s.chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(Error::param(format!("'{other}' is not a bit"))),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        BitMatrix::from_rows(&bools)
    }

    pub(crate) fn from_words(rows: usize, cols: usize, words: Vec<u64>) -> Self {
        let stride = words_for(cols);
        assert_eq!(words.len(), rows * stride);
        let mut m = BitMatrix {
            rows,
            cols,
            stride,
            words,
        };
        m.clear_padding();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Words per packed row.
    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "({i}, {j}) out of range");
        (self.words[i * self.stride + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols, "({i}, {j}) out of range");
        let w = &mut self.words[i * self.stride + j / WORD_BITS];
        let mask = 1u64 << (j % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, i: usize) -> BitRow<'_> {
        BitRow {
            words: self.row_words(i),
            len: self.cols,
        }
    }

    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row_ones(&self, i: usize) -> u32 {
        self.row_words(i).iter().map(|w| w.count_ones()).sum()
    }

    /// Number of ones in every row.
    pub fn row_counts(&self) -> Vec<u32> {
        (0..self.rows).map(|i| self.row_ones(i)).collect()
    }

    /// Number of ones in every column.
    pub fn col_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.cols];
        for i in 0..self.rows {
            for (j, c) in counts.iter_mut().enumerate() {
                *c += self.get(i, j) as u32;
            }
        }
        counts
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            let row = self.row_words(i);
            for (w, &word) in row.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let j = w * WORD_BITS + bits.trailing_zeros() as usize;
                    t.words[j * t.stride + i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
                    bits &= bits - 1;
                }
            }
        }
        t
    }

    pub fn complement(&self) -> BitMatrix {
        BitMatrix::from_words(self.rows, self.cols, self.words.iter().map(|w| !w).collect())
    }

    /// Rows `indices` in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> BitMatrix {
        let mut words = Vec::with_capacity(indices.len() * self.stride);
        for &i in indices {
            words.extend_from_slice(self.row_words(i));
        }
        BitMatrix::from_words(indices.len(), self.cols, words)
    }

    fn clear_padding(&mut self) {
        if self.stride == 0 {
            return;
        }
        let mask = tail_mask(self.cols);
        for i in 0..self.rows {
            self.words[i * self.stride + self.stride - 1] &= mask;
        }
    }
}

/// Entrywise complement with padding re-zeroed.
pub fn complement(m: &BitMatrix) -> BitMatrix {
    m.complement()
}

pub const MAX_SIGMA: u32 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Cells {
    Narrow(Vec<u8>),
    Wide(Vec<u16>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RowCells<'a> {
    Narrow(&'a [u8]),
    Wide(&'a [u16]),
}

/// A borrowed row of a [`SymbolMatrix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolRow<'a> {
    cells: RowCells<'a>,
    sigma: u32,
}

impl<'a> SymbolRow<'a> {
    pub fn len(&self) -> usize {
        match self.cells {
            RowCells::Narrow(c) => c.len(),
            RowCells::Wide(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn get(&self, j: usize) -> u16 {
        match self.cells {
            RowCells::Narrow(c) => c[j] as u16,
            RowCells::Wide(c) => c[j],
        }
    }
}

/// Number of coordinates in which two symbol rows differ.
pub fn sigma_hamming_distance(x: SymbolRow<'_>, y: SymbolRow<'_>) -> Result<u32> {
    if x.sigma != y.sigma {
        return Err(Error::Alphabet {
            left: x.sigma,
            right: y.sigma,
        });
    }
    if x.len() != y.len() {
        return Err(Error::dims(format!(
            "symbol rows of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(unchecked_sigma_distance(x, y))
}

#[inline]
pub(crate) fn unchecked_sigma_distance(x: SymbolRow<'_>, y: SymbolRow<'_>) -> u32 {
    match (x.cells, y.cells) {
        (RowCells::Narrow(a), RowCells::Narrow(b)) => {
            a.iter().zip(b).filter(|(u, v)| u != v).count() as u32
        }
        (RowCells::Wide(a), RowCells::Wide(b)) => {
            a.iter().zip(b).filter(|(u, v)| u != v).count() as u32
        }
        _ => (0..x.len()).filter(|&j| x.get(j) != y.get(j)).count() as u32,
    }
}

/// A dense matrix over the alphabet `{0, .., sigma-1}`.
///
/// Symbols are stored in `u8` cells when `sigma <= 256` and in `u16` cells
/// otherwise; `sigma` is capped at 2^16.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolMatrix {
    rows: usize,
    cols: usize,
    sigma: u32,
    cells: Cells,
}

impl SymbolMatrix {
    pub fn zeros(rows: usize, cols: usize, sigma: u32) -> Result<Self> {
        if !(2..=MAX_SIGMA).contains(&sigma) {
            return Err(Error::param(format!(
                "alphabet size {sigma} outside 2..={MAX_SIGMA}"
            )));
        }
        let cells = if sigma <= 256 {
            Cells::Narrow(vec![0; rows * cols])
        } else {
            Cells::Wide(vec![0; rows * cols])
        };
        Ok(SymbolMatrix {
            rows,
            cols,
            sigma,
            cells,
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        sigma: u32,
        mut f: impl FnMut(usize, usize) -> u32,
    ) -> Result<Self> {
        let mut m = SymbolMatrix::zeros(rows, cols, sigma)?;
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j))?;
            }
        }
        Ok(m)
    }

    pub fn from_rows<R: AsRef<[u32]>>(rows: &[R], sigma: u32) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.as_ref().len() != cols) {
            return Err(Error::dims(format!(
                "row {i} has {} columns, expected {cols}",
                r.as_ref().len()
            )));
        }
        SymbolMatrix::from_fn(rows.len(), cols, sigma, |i, j| rows[i].as_ref()[j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn get(&self, i: usize, j: usize) -> u16 {
        assert!(i < self.rows && j < self.cols, "({i}, {j}) out of range");
        let at = i * self.cols + j;
        match &self.cells {
            Cells::Narrow(c) => c[at] as u16,
            Cells::Wide(c) => c[at],
        }
    }

    pub fn set(&mut self, i: usize, j: usize, symbol: u32) -> Result<()> {
        if symbol >= self.sigma {
            return Err(Error::Symbol {
                symbol,
                sigma: self.sigma,
            });
        }
        assert!(i < self.rows && j < self.cols, "({i}, {j}) out of range");
        let at = i * self.cols + j;
        match &mut self.cells {
            Cells::Narrow(c) => c[at] = symbol as u8,
            Cells::Wide(c) => c[at] = symbol as u16,
        }
        Ok(())
    }

    pub fn row(&self, i: usize) -> SymbolRow<'_> {
        let range = i * self.cols..(i + 1) * self.cols;
        let cells = match &self.cells {
            Cells::Narrow(c) => RowCells::Narrow(&c[range]),
            Cells::Wide(c) => RowCells::Wide(&c[range]),
        };
        SymbolRow {
            cells,
            sigma: self.sigma,
        }
    }

    pub fn transpose(&self) -> SymbolMatrix {
        let mut t = SymbolMatrix::zeros(self.cols, self.rows, self.sigma)
            .expect("alphabet already validated");
        for i in 0..self.rows {
            for j in 0..self.cols {
                let s = self.get(i, j) as u32;
                t.set(j, i, s).expect("symbol already validated");
            }
        }
        t
    }

    /// 0-1 matrix marking the cells equal to `symbol`.
    pub fn indicator(&self, symbol: u16) -> BitMatrix {
        BitMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) == symbol)
    }

    /// The same matrix as packed bits; only defined for `sigma == 2`.
    pub fn to_bits(&self) -> Result<BitMatrix> {
        if self.sigma != 2 {
            return Err(Error::Alphabet {
                left: self.sigma,
                right: 2,
            });
        }
        Ok(self.indicator(1))
    }

    pub fn select_rows(&self, indices: &[usize]) -> SymbolMatrix {
        SymbolMatrix::from_fn(indices.len(), self.cols, self.sigma, |i, j| {
            self.get(indices[i], j) as u32
        })
        .expect("symbols already validated")
    }
}

impl From<&BitMatrix> for SymbolMatrix {
    fn from(m: &BitMatrix) -> Self {
        SymbolMatrix::from_fn(m.rows(), m.cols(), 2, |i, j| m.get(i, j) as u32)
            .expect("binary alphabet")
    }
}

/// Bits per symbol in [`binary_embed`]: `ceil(log2 sigma)`.
pub fn embed_width(sigma: u32) -> usize {
    assert!(sigma >= 2);
    (u32::BITS - (sigma - 1).leading_zeros()) as usize
}

/// Replaces every symbol by its `ceil(log2 sigma)`-bit big-endian code.
///
/// Symbol distances are preserved up to the code width:
/// `ham(a, b) <= ham(g(a), g(b)) <= width * ham(a, b)`.
pub fn binary_embed(m: &SymbolMatrix) -> BitMatrix {
    let width = embed_width(m.sigma());
    let mut out = BitMatrix::zeros(m.rows(), m.cols() * width);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let s = m.get(i, j);
            for b in 0..width {
                if (s >> (width - 1 - b)) & 1 == 1 {
                    out.set(i, j * width + b, true);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitVector {
        BitVector::from_bools(&s.chars().map(|c| c == '1').collect::<Vec<_>>())
    }

    fn naive(x: &[bool], y: &[bool]) -> u32 {
        x.iter().zip(y).filter(|(a, b)| a != b).count() as u32
    }

    #[test]
    fn distance_examples() {
        let d = |a: &str, b: &str| hamming_distance(bits(a).as_row(), bits(b).as_row()).unwrap();
        assert_eq!(d("0000", "0000"), 0);
        assert_eq!(d("1010", "0101"), 4);
        let (x, y) = ("110100", "100110");
        let oracle = naive(
            &x.chars().map(|c| c == '1').collect::<Vec<_>>(),
            &y.chars().map(|c| c == '1').collect::<Vec<_>>(),
        );
        assert_eq!(oracle, 2);
        assert_eq!(d(x, y), oracle);
    }

    #[test]
    fn distance_length_mismatch() {
        let err = hamming_distance(bits("0101").as_row(), bits("01010").as_row());
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn packed_matches_naive_exhaustively() {
        for q in 1..=12usize {
            let all: Vec<Vec<bool>> = (0..1u32 << q)
                .map(|v| (0..q).map(|j| (v >> j) & 1 == 1).collect())
                .collect();
            let m = BitMatrix::from_rows(&all).unwrap();
            // every vector against a handful of fixed partners keeps this exhaustive in x
            for partner in [0usize, all.len() - 1, all.len() / 3, 5 % all.len()] {
                for i in 0..all.len() {
                    let got = hamming_distance(m.row(i), m.row(partner)).unwrap();
                    assert_eq!(got, naive(&all[i], &all[partner]));
                }
            }
        }
    }

    #[test]
    fn complement_examples() {
        let z = BitMatrix::zeros(3, 70);
        let c = z.complement();
        assert!((0..3).all(|i| c.row_ones(i) == 70));
        assert_eq!(c.complement(), z);
        let m = BitMatrix::from_strs(&["1100101", "0000001"]).unwrap();
        let mc = complement(&m);
        for i in 0..2 {
            assert_eq!(mc.row_ones(i), 7 - m.row_ones(i));
        }
        // padding stays clear
        assert_eq!(mc.row_words(0)[0] >> 7, 0);
    }

    #[test]
    fn transpose_roundtrip() {
        let m = BitMatrix::from_fn(70, 130, |i, j| (i * 7 + j * 3) % 5 == 0);
        let t = m.transpose();
        assert_eq!((t.rows(), t.cols()), (130, 70));
        for i in 0..70 {
            for j in 0..130 {
                assert_eq!(m.get(i, j), t.get(j, i));
            }
        }
        assert_eq!(t.transpose(), m);
        assert_eq!(m.col_counts(), t.row_counts());
    }

    #[test]
    fn sigma_distance_examples() {
        let m = SymbolMatrix::from_rows(&[vec![0, 1, 2], vec![0, 1, 2], vec![2, 1, 0]], 3).unwrap();
        assert_eq!(sigma_hamming_distance(m.row(0), m.row(1)).unwrap(), 0);
        assert_eq!(sigma_hamming_distance(m.row(0), m.row(2)).unwrap(), 2);
        let single = SymbolMatrix::from_rows(&[vec![4], vec![1]], 5).unwrap();
        assert_eq!(sigma_hamming_distance(single.row(0), single.row(1)).unwrap(), 1);
    }

    #[test]
    fn sigma_distance_errors() {
        let a = SymbolMatrix::from_rows(&[vec![0, 1, 2]], 3).unwrap();
        let b = SymbolMatrix::from_rows(&[vec![0, 1, 2]], 4).unwrap();
        let c = SymbolMatrix::from_rows(&[vec![0, 1]], 3).unwrap();
        assert!(matches!(
            sigma_hamming_distance(a.row(0), b.row(0)),
            Err(Error::Alphabet { .. })
        ));
        assert!(matches!(
            sigma_hamming_distance(a.row(0), c.row(0)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn symbols_are_range_checked() {
        assert!(matches!(
            SymbolMatrix::from_rows(&[vec![3]], 3),
            Err(Error::Symbol { symbol: 3, sigma: 3 })
        ));
        assert!(SymbolMatrix::zeros(1, 1, 1).is_err());
        assert!(SymbolMatrix::zeros(1, 1, MAX_SIGMA + 1).is_err());
        let wide = SymbolMatrix::from_rows(&[vec![65535, 300]], MAX_SIGMA).unwrap();
        assert_eq!(wide.get(0, 0), 65535);
        assert_eq!(wide.get(0, 1), 300);
    }

    #[test]
    fn embed_examples() {
        let binary = SymbolMatrix::from_rows(&[vec![0, 1, 1], vec![1, 0, 1]], 2).unwrap();
        let e = binary_embed(&binary);
        assert_eq!(e, binary.to_bits().unwrap());

        let four = SymbolMatrix::from_rows(&[vec![0, 3]], 4).unwrap();
        assert_eq!(binary_embed(&four), BitMatrix::from_strs(&["0011"]).unwrap());

        assert_eq!(embed_width(2), 1);
        assert_eq!(embed_width(4), 2);
        assert_eq!(embed_width(5), 3);
        assert_eq!(embed_width(MAX_SIGMA), 16);
    }

    #[test]
    fn embed_sandwich_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let (sigma, q) = (5u32, 20usize);
        let width = embed_width(sigma) as u32;
        let m = SymbolMatrix::from_fn(200, q, sigma, |_, _| rng.gen_range(0..sigma)).unwrap();
        let e = binary_embed(&m);
        for pair in 0..100 {
            let (a, b) = (2 * pair, 2 * pair + 1);
            let s = sigma_hamming_distance(m.row(a), m.row(b)).unwrap();
            let h = hamming_distance(e.row(a), e.row(b)).unwrap();
            assert!(s <= h && h <= width * s, "pair {pair}: sigma {s}, binary {h}");
        }
    }
}
