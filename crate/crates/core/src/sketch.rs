//! Random GF(2) projections of packed vectors at geometrically spaced
//! distance scales.
//!
//! At scale `t` a projector is a `k x q` 0-1 matrix whose entries are
//! independently 1 with probability `1/(4t)`; a vector `x` is mapped to
//! `F x mod 2`. For two vectors at distance `D` each sketch coordinate
//! differs with probability `(1 - (1 - 1/(2t))^D) / 2`, which increases
//! with `D`. The decision "distance at most `t`" accepts when the sketch
//! distance is at most `(c1 + eps/30) k` with
//!
//! ```text
//! c1 = (1 - (1 - 1/(2t))^t) / 2
//! c2 = (1 - (1 - 1/(2t))^((1+eps) t)) / 2      (c2 - c1 >= eps/10)
//! ```
//!
//! Projector bits come from a stateless counter-based generator keyed by
//! `(seed, stream, level, entry)`, so a family is reproducible bit for bit
//! and independent of generation order.

use rayon::prelude::*;

use crate::bits::{and_popcount, hamming_words, BitMatrix, BitRow, BitVector};
use crate::error::{Error, Result};
use crate::Real;

/// How the smallest accepting scale is located.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ThresholdSearch {
    /// Binary search over scale indices: returns an accepting scale whose
    /// probed predecessor rejected.
    #[default]
    Binary,
    /// Scan scales upward and return the first accepting one.
    Linear,
}

/// Everything about a sketch except its accuracy parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct SketchOptions<T = f64> {
    /// Multiplier in `k = ceil(k_mult * ln(N + 2) / delta^2)`.
    pub k_mult: T,
    pub seed: u64,
    /// Label separating independent families drawn from one seed.
    pub stream: u64,
    /// Fixed sketch dimension, overriding the formula above.
    pub sketch_dim: Option<usize>,
    pub search: ThresholdSearch,
}

pub const DEFAULT_K_MULT: f64 = 9.0;
pub const DEFAULT_SEED: u64 = 42;

impl<T: Real> Default for SketchOptions<T> {
    fn default() -> Self {
        SketchOptions {
            k_mult: T::lit(DEFAULT_K_MULT),
            seed: DEFAULT_SEED,
            stream: 0,
            sketch_dim: None,
            search: ThresholdSearch::Binary,
        }
    }
}

impl<T: Real> SketchOptions<T> {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_k_mult(mut self, k_mult: T) -> Self {
        self.k_mult = k_mult;
        self
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn with_sketch_dim(mut self, k: usize) -> Self {
        self.sketch_dim = Some(k);
        self
    }

    pub fn with_search(mut self, search: ThresholdSearch) -> Self {
        self.search = search;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.k_mult.is_finite() && self.k_mult > T::zero()) {
            return Err(Error::param(format!("k_mult {} must be positive", self.k_mult)));
        }
        if self.sketch_dim == Some(0) {
            return Err(Error::param("sketch dimension must be at least 1"));
        }
        Ok(())
    }
}

/// Accuracy parameter plus [`SketchOptions`].
#[derive(Clone, Debug, PartialEq)]
pub struct SketchParams<T = f64> {
    pub delta: T,
    pub options: SketchOptions<T>,
}

impl<T: Real> SketchParams<T> {
    /// `delta` must lie in `(0, 1/2)`.
    pub fn new(delta: T) -> Result<Self> {
        SketchParams::with_options(delta, SketchOptions::default())
    }

    pub fn with_options(delta: T, options: SketchOptions<T>) -> Result<Self> {
        let p = SketchParams { delta, options };
        p.validate()?;
        Ok(p)
    }

    /// The `delta = 1` sketch used for coarse spanning trees over
    /// embedded alphabets. The scale gap `c2 - c1 >= delta/10` still holds
    /// at `delta = 1`.
    pub fn coarse(options: SketchOptions<T>) -> Result<Self> {
        SketchParams::with_options(T::one(), options)
    }

    pub fn validate(&self) -> Result<()> {
        let half = T::lit(0.5);
        let fine = self.delta > T::zero() && self.delta < half;
        if !(fine || self.delta == T::one()) {
            return Err(Error::param(format!(
                "delta {} outside (0, 1/2)",
                self.delta
            )));
        }
        self.options.validate()
    }

    /// Sketch dimension for an input of size `n`.
    pub fn sketch_dim(&self, n: u64) -> usize {
        if let Some(k) = self.options.sketch_dim {
            return k;
        }
        let k_mult = self.options.k_mult.to_f64().unwrap();
        let delta = self.delta.to_f64().unwrap();
        let k = (k_mult * ((n as f64) + 2.0).ln() / (delta * delta)).ceil();
        (k as usize).max(1)
    }
}

/// Index of the last scale: the least `L` with `(1+delta)^L >= q`.
pub fn last_level<T: Real>(q: usize, delta: T) -> usize {
    let q = q.max(1);
    let base = T::one() + delta;
    let qf = T::from_usize(q).unwrap();
    let mut level = (qf.ln() / base.ln()).ceil().to_usize().unwrap_or(0);
    // the float estimate can land one off either way
    while level > 0 && base.powi(level as i32 - 1) >= qf {
        level -= 1;
    }
    while base.powi(level as i32) < qf {
        level += 1;
    }
    level
}

/// Number of scales `1, (1+delta), .., (1+delta)^L` for `q` columns.
pub fn threshold_count<T: Real>(q: usize, delta: T) -> usize {
    last_level(q, delta) + 1
}

/// Decision constants at one scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdConstants<T = f64> {
    pub threshold: T,
    pub c1: T,
    pub c2: T,
    pub margin: T,
}

impl<T: Real> ThresholdConstants<T> {
    /// Evaluated in double precision from the closed forms.
    pub fn new(threshold: T, eps: T) -> Self {
        let t = threshold.to_f64().unwrap();
        let e = eps.to_f64().unwrap();
        let base = 1.0 - 1.0 / (2.0 * t);
        let c1 = 0.5 * (1.0 - base.powf(t));
        let c2 = 0.5 * (1.0 - base.powf((1.0 + e) * t));
        ThresholdConstants {
            threshold,
            c1: T::lit(c1),
            c2: T::lit(c2),
            margin: T::lit(e / 30.0),
        }
    }

    /// Largest accepted sketch distance for dimension `k`.
    pub fn cutoff(&self, k: usize) -> u32 {
        let bound = (self.c1 + self.margin) * T::from_usize(k).unwrap();
        bound.floor().to_u32().unwrap_or(0)
    }
}

/// Per-coordinate probability that sketches of two vectors at distance `d`
/// differ at scale `t`.
pub fn flip_probability(t: f64, d: u32) -> f64 {
    0.5 * (1.0 - (1.0 - 1.0 / (2.0 * t)).powi(d as i32))
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn level_key(seed: u64, stream: u64, level: usize) -> u64 {
    let k = finalize(seed.wrapping_add(GOLDEN));
    let k = finalize(k ^ stream.wrapping_add(GOLDEN).wrapping_mul(GOLDEN));
    finalize(k ^ (level as u64).wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Uniform value in `[0, 1)` for one projector entry.
#[inline]
fn entry_uniform(key: u64, entry: u64) -> f64 {
    let h = finalize(key.wrapping_add(entry.wrapping_add(1).wrapping_mul(GOLDEN)));
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One scale of a [`SketchFamily`].
#[derive(Clone, Debug, PartialEq)]
pub struct Projector<T = f64> {
    level: usize,
    consts: ThresholdConstants<T>,
    cutoff: u32,
    rows: BitMatrix,
}

impl<T: Real> Projector<T> {
    /// Draws the `k x q` projector for scale index `level` at scale
    /// `threshold`, with `eps` the accuracy of the decision test.
    pub fn generate(
        threshold: T,
        eps: T,
        level: usize,
        q: usize,
        k: usize,
        seed: u64,
        stream: u64,
    ) -> Self {
        let key = level_key(seed, stream, level);
        let prob = 1.0 / (4.0 * threshold.to_f64().unwrap());
        let stride = q.div_ceil(64);
        let words: Vec<u64> = (0..k)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut row = vec![0u64; stride];
                for j in 0..q {
                    if entry_uniform(key, (i * q + j) as u64) < prob {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                row
            })
            .collect();
        let consts = ThresholdConstants::new(threshold, eps);
        Projector {
            level,
            cutoff: consts.cutoff(k),
            consts,
            rows: BitMatrix::from_words(k, q, words),
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn threshold(&self) -> T {
        self.consts.threshold
    }

    pub fn constants(&self) -> &ThresholdConstants<T> {
        &self.consts
    }

    /// Largest sketch distance accepted at this scale.
    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.rows
    }

    pub fn sketch_dim(&self) -> usize {
        self.rows.rows()
    }

    fn project_words(&self, x: &[u64], out: &mut [u64]) {
        out.iter_mut().for_each(|w| *w = 0);
        for i in 0..self.rows.rows() {
            if and_popcount(self.rows.row_words(i), x) & 1 == 1 {
                out[i / 64] |= 1 << (i % 64);
            }
        }
    }
}

/// `F x mod 2`.
pub fn project<T: Real>(projector: &Projector<T>, x: BitRow<'_>) -> Result<BitVector> {
    if x.len() != projector.rows.cols() {
        return Err(Error::dims(format!(
            "projecting a vector of length {} with a {}-column projector",
            x.len(),
            projector.rows.cols()
        )));
    }
    let mut out = BitVector::zeros(projector.sketch_dim());
    for i in 0..projector.sketch_dim() {
        if and_popcount(projector.rows.row_words(i), x.words()) & 1 == 1 {
            out.set(i, true);
        }
    }
    Ok(out)
}

/// True iff `ham(sx, sy) <= (c1 + margin) k`.
pub fn passes_at<T: Real>(
    sx: BitRow<'_>,
    sy: BitRow<'_>,
    consts: &ThresholdConstants<T>,
    k: usize,
) -> bool {
    hamming_words(sx.words(), sy.words()) <= consts.cutoff(k)
}

/// Sketches of a set of vectors at every scale of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct Sketches {
    levels: Vec<BitMatrix>,
}

impl Sketches {
    pub fn level(&self, level: usize) -> &BitMatrix {
        &self.levels[level]
    }

    pub fn len(&self) -> usize {
        self.levels.first().map_or(0, |m| m.rows())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Projectors for the scales `(1+delta)^l`, `l = 0..=L`, with
/// `(1+delta)^L >= q`.
#[derive(Clone, Debug, PartialEq)]
pub struct SketchFamily<T = f64> {
    params: SketchParams<T>,
    source_cols: usize,
    projectors: Vec<Projector<T>>,
}

impl<T: Real> SketchFamily<T> {
    /// Draws a family for `q`-column vectors with `k` sized for an input of
    /// size `n`.
    pub fn build(q: usize, params: &SketchParams<T>, n: u64) -> Result<Self> {
        params.validate()?;
        if q == 0 {
            return Err(Error::param("sketching requires at least one column"));
        }
        let k = params.sketch_dim(n);
        let base = T::one() + params.delta;
        let projectors = (0..=last_level(q, params.delta))
            .map(|level| {
                Projector::generate(
                    base.powi(level as i32),
                    params.delta,
                    level,
                    q,
                    k,
                    params.options.seed,
                    params.options.stream,
                )
            })
            .collect();
        Ok(SketchFamily {
            params: params.clone(),
            source_cols: q,
            projectors,
        })
    }

    pub fn params(&self) -> &SketchParams<T> {
        &self.params
    }

    pub fn source_cols(&self) -> usize {
        self.source_cols
    }

    pub fn sketch_dim(&self) -> usize {
        self.projectors[0].sketch_dim()
    }

    pub fn levels(&self) -> usize {
        self.projectors.len()
    }

    pub fn thresholds(&self) -> Vec<T> {
        self.projectors.iter().map(|p| p.threshold()).collect()
    }

    pub fn projector(&self, level: usize) -> &Projector<T> {
        &self.projectors[level]
    }

    /// Sketches every row of `m` at every scale.
    pub fn project_rows(&self, m: &BitMatrix) -> Result<Sketches> {
        if m.cols() != self.source_cols {
            return Err(Error::dims(format!(
                "projecting {}-column rows with a family for {} columns",
                m.cols(),
                self.source_cols
            )));
        }
        let k = self.sketch_dim();
        let stride = k.div_ceil(64);
        let levels = self
            .projectors
            .iter()
            .map(|proj| {
                let words: Vec<u64> = (0..m.rows())
                    .into_par_iter()
                    .flat_map_iter(|i| {
                        let mut out = vec![0u64; stride];
                        proj.project_words(m.row_words(i), &mut out);
                        out
                    })
                    .collect();
                BitMatrix::from_words(m.rows(), k, words)
            })
            .collect();
        Ok(Sketches { levels })
    }

    /// Whether the pair (row `i` of `a`, row `j` of `b`) is accepted at
    /// scale index `level`.
    #[inline]
    pub fn passes(&self, level: usize, a: &Sketches, i: usize, b: &Sketches, j: usize) -> bool {
        let d = hamming_words(a.levels[level].row_words(i), b.levels[level].row_words(j));
        d <= self.projectors[level].cutoff
    }

    /// Index of the smallest accepting scale (per the configured search),
    /// or `None` when no scale accepts.
    pub fn locate(&self, a: &Sketches, i: usize, b: &Sketches, j: usize) -> Option<usize> {
        let levels = self.levels();
        match self.params.options.search {
            ThresholdSearch::Linear => (0..levels).find(|&l| self.passes(l, a, i, b, j)),
            ThresholdSearch::Binary => {
                let (mut lo, mut hi) = (0, levels);
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    if self.passes(mid, a, i, b, j) {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                (lo < levels).then_some(lo)
            }
        }
    }
}

/// [`SketchFamily::build`] as a free function.
pub fn build_family<T: Real>(q: usize, params: &SketchParams<T>, n: u64) -> Result<SketchFamily<T>> {
    SketchFamily::build(q, params, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn params(delta: f64) -> SketchParams<f64> {
        SketchParams::new(delta).unwrap()
    }

    #[test]
    fn delta_range() {
        assert!(SketchParams::new(0.0).is_err());
        assert!(SketchParams::new(0.5).is_err());
        assert!(SketchParams::new(-0.1).is_err());
        assert!(SketchParams::new(0.49).is_ok());
        assert!(SketchParams::<f64>::coarse(SketchOptions::default()).is_ok());
        let bad = SketchOptions::default().with_k_mult(0.0);
        assert!(SketchParams::with_options(0.25, bad).is_err());
        let bad = SketchOptions::<f64>::default().with_sketch_dim(0);
        assert!(SketchParams::with_options(0.25, bad).is_err());
    }

    #[test]
    fn threshold_count_example() {
        // ceil(ln 16 / ln 1.25) + 1
        let expected = ((16f64).ln() / (1.25f64).ln()).ceil() as usize + 1;
        assert_eq!(expected, 14);
        assert_eq!(threshold_count(16, 0.25f64), 14);
        assert_eq!(threshold_count(1, 0.25f64), 1);
        assert_eq!(threshold_count(2, 1.0f64), 2);
        assert_eq!(threshold_count(64, 1.0f64), 7);
        for q in 1..300 {
            for &d in &[0.05f64, 0.1, 0.25, 0.3, 0.49, 1.0] {
                let l = last_level(q, d);
                assert!((1.0 + d).powi(l as i32) >= q as f64);
                assert!(l == 0 || (1.0 + d).powi(l as i32 - 1) < q as f64);
            }
        }
    }

    #[test]
    fn sketch_dim_formula() {
        let p = params(0.3);
        let n = 2 * 64 * 256;
        let expected = (9.0 * ((n + 2) as f64).ln() / 0.09).ceil() as usize;
        assert_eq!(p.sketch_dim(n), expected);
        let fixed = SketchParams::with_options(0.3, SketchOptions::default().with_sketch_dim(17)).unwrap();
        assert_eq!(fixed.sketch_dim(n), 17);
    }

    #[test]
    fn family_is_deterministic() {
        let p = SketchParams::with_options(0.25, SketchOptions::default().with_seed(9)).unwrap();
        let a = SketchFamily::build(100, &p, 1000).unwrap();
        let b = SketchFamily::build(100, &p, 1000).unwrap();
        assert_eq!(a, b);
        let other = SketchParams::with_options(0.25, SketchOptions::default().with_seed(10)).unwrap();
        assert_ne!(a, SketchFamily::build(100, &other, 1000).unwrap());
        let stream = SketchParams::with_options(0.25, SketchOptions::default().with_seed(9).with_stream(1)).unwrap();
        assert_ne!(a, SketchFamily::build(100, &stream, 1000).unwrap());
    }

    #[test]
    fn thresholds_increase_to_q() {
        let f = SketchFamily::build(37, &params(0.2), 100).unwrap();
        let ts = f.thresholds();
        assert_eq!(ts[0], 1.0);
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
        assert!(*ts.last().unwrap() >= 37.0);
    }

    #[test]
    fn entry_density_matches_probability() {
        let k = 1000;
        for (level, t) in [(0usize, 1.0f64), (3, 4.0), (5, 16.0)] {
            let proj = Projector::generate(t, 0.25, level, 200, k, 5, 0);
            let ones: u64 = proj.matrix().row_counts().iter().map(|&c| c as u64).sum();
            let n = (k * 200) as f64;
            let p = 1.0 / (4.0 * t);
            let se = (p * (1.0 - p) / n).sqrt();
            let rate = ones as f64 / n;
            assert!((rate - p).abs() <= 3.0 * se, "t={t}: rate {rate} vs {p}");
        }
    }

    #[test]
    fn projection_basics() {
        let f = SketchFamily::build(70, &params(0.25), 50).unwrap();
        let proj = f.projector(2);
        let zero = BitVector::zeros(70);
        assert_eq!(project(proj, zero.as_row()).unwrap().count_ones(), 0);
        assert!(project(proj, BitVector::zeros(71).as_row()).is_err());

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = BitVector::from_bools(&(0..70).map(|_| rng.gen()).collect::<Vec<_>>());
            let y = BitVector::from_bools(&(0..70).map(|_| rng.gen()).collect::<Vec<_>>());
            let lhs = project(proj, x.xor(&y).unwrap().as_row()).unwrap();
            let rhs = project(proj, x.as_row())
                .unwrap()
                .xor(&project(proj, y.as_row()).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn projection_selects_coordinates() {
        // hand-built projector: row i picks coordinate 2i
        let mut proj = Projector::<f64>::generate(1.0, 0.25, 0, 8, 4, 0, 0);
        proj.rows = BitMatrix::from_fn(4, 8, |i, j| j == 2 * i);
        let x = BitVector::from_bools(&[true, false, false, true, true, true, false, false]);
        let s = project(&proj, x.as_row()).unwrap();
        assert_eq!(
            (0..4).map(|i| s.get(i)).collect::<Vec<_>>(),
            vec![true, false, true, false]
        );
    }

    #[test]
    fn pass_decision() {
        let k = 500;
        let consts = ThresholdConstants::new(8.0f64, 0.25);
        let s = BitVector::from_bools(&vec![true; k]);
        assert!(passes_at(s.as_row(), s.as_row(), &consts, k));
        let zero = BitVector::zeros(k);
        assert!(consts.c1 < 0.5);
        assert!(!passes_at(s.as_row(), zero.as_row(), &consts, k));
    }

    #[test]
    fn constants_gap() {
        for e in [0.01f64, 0.1, 0.25, 0.49, 1.0] {
            let mut t = 1.0;
            while t <= 1e6 {
                let c = ThresholdConstants::new(t, e);
                assert!(c.c2 - c.c1 >= e / 10.0, "t={t} e={e}");
                assert!(c.c2 - c.margin > c.c1 + c.margin);
                t *= 1.7;
            }
        }
    }
}
