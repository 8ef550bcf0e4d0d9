//! Farthest-first clustering over sketched distances.
//!
//! Starting from point 0, each round adds the point whose smallest sketched
//! distance `W` to the current centers is largest. Sketched distances are
//! only evaluated between a center and the other points, so one run costs
//! `O(n * ell)` threshold searches. With `delta = eps/5` the exact radius is
//! within `2 + eps` of the optimum w.h.p., and the partition by nearest
//! center (in `W`) has diameter within `2 + eps` of the best `ell`-partition.
//!
//! There is no duplicate detection here: two identical points get `W >= 1`.

use rayon::prelude::*;

use crate::bits::{hamming_words, BitMatrix};
use crate::error::{Error, Result};
use crate::sketch::{SketchFamily, SketchOptions, SketchParams, Sketches};
use crate::Real;

/// Ratio between the clustering accuracy `eps` and the sketch accuracy.
pub const DELTA_PER_EPSILON: f64 = 0.2;

#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringResult<T = f64> {
    pub ell: usize,
    /// `None` for the exact baseline.
    pub epsilon: Option<T>,
    /// Point indices in the order they were chosen; `centers[0] == 0`.
    pub centers: Vec<usize>,
    /// For every point, the point index of its center.
    pub assignment: Vec<usize>,
    /// Largest distance from a point to its nearest center, on the sketch
    /// scale (exact for the baseline).
    pub radius_w: T,
    pub radius_exact: u32,
    /// Largest exact distance inside one cluster; set by the partition
    /// variant.
    pub diameter_exact: Option<u32>,
    /// The maximized min-distance value at each pick after the first.
    pub picks: Vec<T>,
}

impl<T: Real> ClusteringResult<T> {
    /// Members of each cluster, in center order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut slot = vec![usize::MAX; self.assignment.len()];
        for (s, &c) in self.centers.iter().enumerate() {
            slot[c] = s;
        }
        let mut out = vec![Vec::new(); self.centers.len()];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[slot[c]].push(i);
        }
        out
    }
}

/// Sketches of every point, queried on demand.
pub struct CenterSketch<'a, T = f64> {
    points: &'a BitMatrix,
    family: SketchFamily<T>,
    sketches: Sketches,
    thresholds: Vec<T>,
}

impl<'a, T: Real> CenterSketch<'a, T> {
    /// Draws a family with `k` sized by the number of points.
    pub fn new(points: &'a BitMatrix, delta: T, options: &SketchOptions<T>) -> Result<Self> {
        let params = SketchParams::with_options(delta, options.clone())?;
        let family = SketchFamily::build(points.cols(), &params, points.rows() as u64)?;
        let sketches = family.project_rows(points)?;
        let thresholds = family.thresholds();
        Ok(CenterSketch {
            points,
            family,
            sketches,
            thresholds,
        })
    }

    pub fn delta(&self) -> T {
        self.family.params().delta
    }

    /// Smallest accepting scale for the pair, or `q` if none accepts.
    /// Never 0, even for identical points.
    pub fn approx_distance(&self, i: usize, j: usize) -> T {
        match self.family.locate(&self.sketches, i, &self.sketches, j) {
            Some(l) => self.thresholds[l],
            None => T::from_usize(self.points.cols()).unwrap(),
        }
    }

    /// Farthest-first traversal picking `ell` centers, `2 <= ell < n`.
    pub fn run(&self, ell: usize) -> Result<ClusteringResult<T>> {
        let n = self.points.rows();
        if ell < 2 || ell >= n {
            return Err(Error::param(format!("ell {ell} outside [2, {n})")));
        }
        let mut is_center = vec![false; n];
        // (min W to a center, slot of that center)
        let mut best: Vec<(T, usize)> = vec![(T::infinity(), 0); n];
        let mut centers = Vec::with_capacity(ell);
        let mut picks = Vec::with_capacity(ell - 1);

        let mut next = 0;
        loop {
            let slot = centers.len();
            centers.push(next);
            is_center[next] = true;
            best[next] = (T::zero(), slot);
            let flags = &is_center;
            best.par_iter_mut().enumerate().for_each(|(m, b)| {
                if !flags[m] {
                    let w = self.approx_distance(next, m);
                    if w < b.0 {
                        *b = (w, slot);
                    }
                }
            });
            if centers.len() == ell {
                break;
            }
            next = (0..n)
                .filter(|&m| !is_center[m])
                .fold(None, |acc: Option<usize>, m| match acc {
                    Some(f) if best[f].0 >= best[m].0 => Some(f),
                    _ => Some(m),
                })
                .expect("ell < n leaves a non-center");
            picks.push(best[next].0);
        }

        let assignment: Vec<usize> = best.iter().map(|&(_, s)| centers[s]).collect();
        let radius_w = best
            .iter()
            .map(|b| b.0)
            .fold(T::zero(), |acc, w| if w > acc { w } else { acc });
        Ok(ClusteringResult {
            ell,
            epsilon: None,
            radius_exact: exact_radius(self.points, &centers),
            centers,
            assignment,
            radius_w,
            diameter_exact: None,
            picks,
        })
    }
}

fn check_epsilon<T: Real>(epsilon: T) -> Result<()> {
    if epsilon > T::zero() && epsilon < T::lit(0.5) {
        Ok(())
    } else {
        Err(Error::param(format!("epsilon {epsilon} outside (0, 1/2)")))
    }
}

fn exact_radius(p: &BitMatrix, centers: &[usize]) -> u32 {
    (0..p.rows())
        .into_par_iter()
        .map(|i| {
            centers
                .iter()
                .map(|&c| hamming_words(p.row_words(i), p.row_words(c)))
                .min()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

fn exact_diameter(p: &BitMatrix, assignment: &[usize]) -> u32 {
    let n = p.rows();
    (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .filter(|&j| assignment[j] == assignment[i])
                .map(|j| hamming_words(p.row_words(i), p.row_words(j)))
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// `ell`-center clustering of the rows of `p` within `2 + epsilon` of
/// optimal w.h.p.; `2 <= ell < n`, `epsilon` in `(0, 1/2)`.
pub fn center_clustering<T: Real>(
    p: &BitMatrix,
    ell: usize,
    epsilon: T,
    options: &SketchOptions<T>,
) -> Result<ClusteringResult<T>> {
    check_epsilon(epsilon)?;
    let n = p.rows();
    if ell < 2 || ell >= n {
        return Err(Error::param(format!("ell {ell} outside [2, {n})")));
    }
    let sketch = CenterSketch::new(p, epsilon * T::lit(DELTA_PER_EPSILON), options)?;
    let mut result = sketch.run(ell)?;
    result.epsilon = Some(epsilon);
    Ok(result)
}

/// Partition of the rows of `p` into `ell` clusters whose largest diameter
/// is within `2 + epsilon` of optimal w.h.p.
pub fn diameter_clustering<T: Real>(
    p: &BitMatrix,
    ell: usize,
    epsilon: T,
    options: &SketchOptions<T>,
) -> Result<ClusteringResult<T>> {
    let mut result = center_clustering(p, ell, epsilon, options)?;
    result.diameter_exact = Some(exact_diameter(p, &result.assignment));
    Ok(result)
}

/// Farthest-first traversal on exact distances; a 2-approximation of the
/// `ell`-center radius. Requires `1 <= ell <= n`.
pub fn gonzalez_exact<T: Real>(p: &BitMatrix, ell: usize) -> Result<ClusteringResult<T>> {
    let n = p.rows();
    if ell < 1 || ell > n {
        return Err(Error::param(format!("ell {ell} outside [1, {n}]")));
    }
    let dist = |i: usize, j: usize| hamming_words(p.row_words(i), p.row_words(j));
    let mut best: Vec<(u32, usize)> = (0..n).map(|m| (dist(0, m), 0)).collect();
    let mut centers = vec![0];
    let mut picks = Vec::new();
    while centers.len() < ell {
        let mut far = usize::MAX;
        for m in 0..n {
            if !centers.contains(&m) && (far == usize::MAX || best[m].0 > best[far].0) {
                far = m;
            }
        }
        picks.push(T::from_u32(best[far].0).unwrap());
        let slot = centers.len();
        centers.push(far);
        for (m, b) in best.iter_mut().enumerate() {
            let d = dist(far, m);
            if d < b.0 || m == far {
                *b = (d, slot);
            }
        }
    }
    let radius = best.iter().map(|b| b.0).max().unwrap_or(0);
    Ok(ClusteringResult {
        ell,
        epsilon: None,
        assignment: best.iter().map(|&(_, s)| centers[s]).collect(),
        centers,
        radius_w: T::from_u32(radius).unwrap(),
        radius_exact: radius,
        diameter_exact: None,
        picks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four() -> BitMatrix {
        BitMatrix::from_strs(&["0000", "0001", "1110", "1111"]).unwrap()
    }

    #[test]
    fn contract_errors() {
        let p = four();
        let o = SketchOptions::default();
        assert!(center_clustering(&p, 1, 0.4, &o).is_err());
        assert!(center_clustering(&p, 4, 0.4, &o).is_err());
        assert!(center_clustering(&p, 2, 0.5, &o).is_err());
        assert!(center_clustering(&p, 2, 0.0, &o).is_err());
        assert!(diameter_clustering(&p, 1, 0.4, &o).is_err());
        assert!(gonzalez_exact::<f64>(&p, 0).is_err());
        assert!(gonzalez_exact::<f64>(&p, 5).is_err());
    }

    #[test]
    fn four_points() {
        let p = four();
        let r = diameter_clustering(&p, 2, 0.4f64, &SketchOptions::default()).unwrap();
        assert_eq!(r.centers[0], 0);
        assert!(r.radius_exact as f64 <= 2.4);
        assert_eq!(r.clusters(), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(r.diameter_exact, Some(1));
    }

    #[test]
    fn gonzalez_single_center() {
        let p = four();
        let g = gonzalez_exact::<f64>(&p, 1).unwrap();
        assert_eq!(g.centers, vec![0]);
        assert_eq!(g.radius_exact, 4);
        let g = gonzalez_exact::<f64>(&p, 2).unwrap();
        assert_eq!(g.centers, vec![0, 3]);
        assert!(g.radius_exact <= 2);
    }

    #[test]
    fn all_but_one_are_centers() {
        let p = BitMatrix::from_fn(7, 12, |i, j| (i * 5 + j * 3) % 7 < 3);
        let r = center_clustering(&p, 6, 0.4f64, &SketchOptions::default()).unwrap();
        let mut sorted = r.centers.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 6);
        let left = (0..7).find(|i| !r.centers.contains(i)).unwrap();
        let nearest = r
            .centers
            .iter()
            .map(|&c| hamming_words(p.row_words(left), p.row_words(c)))
            .min()
            .unwrap();
        assert_eq!(r.radius_exact, nearest);
    }

    #[test]
    fn duplicates_never_get_zero() {
        let p = BitMatrix::from_strs(&["1010", "1010", "0101"]).unwrap();
        let s = CenterSketch::new(&p, 0.08f64, &SketchOptions::default()).unwrap();
        assert!(s.approx_distance(0, 1) >= 1.0);
    }
}
