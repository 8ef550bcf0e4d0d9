//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use hamspace::{BitMatrix, CountMatrix, SymbolMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rows(rng: &mut ChaCha8Rng, n: usize, d: usize, sigma: u32) -> Vec<Vec<u32>> {
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(0..sigma)).collect()).collect()
}

pub fn symbols(rows: &[Vec<u32>], cols: usize, sigma: u32) -> SymbolMatrix {
    SymbolMatrix::from_fn(rows.len(), cols, sigma, |i, j| rows[i][j]).unwrap()
}

pub fn bits(rows: &[Vec<u32>], cols: usize) -> BitMatrix {
    BitMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j] == 1)
}

pub fn transpose(rows: &[Vec<u32>], cols: usize) -> Vec<Vec<u32>> {
    (0..cols).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

pub fn ham(x: &[u32], y: &[u32]) -> u32 {
    x.iter().zip(y).filter(|(a, b)| a != b).count() as u32
}

/// `D[i][j]` = distance between row `i` of `a` and column `j` of `b`.
pub fn distances(a: &[Vec<u32>], b: &[Vec<u32>], r: usize) -> Vec<Vec<u32>> {
    let bt = transpose(b, r);
    a.iter().map(|x| bt.iter().map(|y| ham(x, y)).collect()).collect()
}

pub fn product(a: &[Vec<u32>], b: &[Vec<u32>], r: usize) -> Vec<Vec<u32>> {
    a.iter()
        .map(|x| (0..r).map(|j| x.iter().zip(b).map(|(&u, row)| u * row[j]).sum()).collect())
        .collect()
}

pub fn to_vecs(m: &CountMatrix) -> Vec<Vec<u32>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// Kruskal with union-find over all pairs.
pub fn mst_cost(points: &[Vec<u32>]) -> u64 {
    let n = points.len();
    let mut edges: Vec<(u32, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((ham(&points[i], &points[j]), i, j));
        }
    }
    edges.sort_unstable();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut cost = 0u64;
    for (w, i, j) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            cost += w as u64;
        }
    }
    cost
}

/// Whether `edges` form a spanning tree on `n` nodes.
pub fn is_spanning_tree(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return edges.is_empty();
    }
    if edges.len() != n - 1 {
        return false;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(u, v) in edges {
            let y = if u == x { v } else if v == x { u } else { continue };
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn bit_rows(p: &BitMatrix) -> Vec<u32> {
    (0..p.rows())
        .map(|i| (0..p.cols()).fold(0u32, |acc, j| acc | ((p.get(i, j) as u32) << j)))
        .collect()
}

/// Optimal `ell`-center radius with centers anywhere in `{0,1}^d`, `d <= 8`.
pub fn opt_center_radius(p: &BitMatrix, ell: usize) -> u32 {
    let d = p.cols();
    assert!(d <= 8 && (1..=3).contains(&ell));
    let pts = bit_rows(p);
    let cand: Vec<Vec<u32>> = (0u32..1 << d)
        .map(|c| pts.iter().map(|&x| (x ^ c).count_ones()).collect())
        .collect();
    let m = cand.len();
    let mut best = u32::MAX;
    let radius = |sets: &[&Vec<u32>]| -> u32 {
        (0..pts.len()).map(|i| sets.iter().map(|s| s[i]).min().unwrap()).max().unwrap()
    };
    for a in 0..m {
        if ell == 1 {
            best = best.min(radius(&[&cand[a]]));
            continue;
        }
        for b in a + 1..m {
            if ell == 2 {
                best = best.min(radius(&[&cand[a], &cand[b]]));
                continue;
            }
            for c in b + 1..m {
                best = best.min(radius(&[&cand[a], &cand[b], &cand[c]]));
            }
        }
    }
    best
}

/// Smallest possible larger-cluster diameter over all bipartitions, `n <= 16`.
pub fn opt_bipartition_diameter(p: &BitMatrix) -> u32 {
    let n = p.rows();
    assert!((2..=16).contains(&n));
    let pts = bit_rows_wide(p);
    let mut best = u32::MAX;
    // point 0 always on side 0; both sides non-empty
    for mask in 0u32..(1 << (n - 1)) {
        let side = |i: usize| i > 0 && (mask >> (i - 1)) & 1 == 1;
        if (1..n).all(|i| !side(i)) {
            continue;
        }
        let mut diam = 0;
        for i in 0..n {
            for j in i + 1..n {
                if side(i) == side(j) {
                    diam = diam.max(ham(&pts[i], &pts[j]));
                }
            }
        }
        best = best.min(diam);
    }
    best
}

fn bit_rows_wide(p: &BitMatrix) -> Vec<Vec<u32>> {
    (0..p.rows()).map(|i| (0..p.cols()).map(|j| p.get(i, j) as u32).collect()).collect()
}

/// Points around `centers` random centers with each bit flipped with
/// probability `flip`.
pub fn clustered_bits(rng: &mut ChaCha8Rng, n: usize, d: usize, centers: usize, flip: f64) -> BitMatrix {
    let c: Vec<Vec<bool>> = (0..centers).map(|_| (0..d).map(|_| rng.gen()).collect()).collect();
    let rows: Vec<Vec<bool>> = (0..n)
        .map(|_| {
            let home = &c[rng.gen_range(0..centers)];
            home.iter().map(|&b| b ^ rng.gen_bool(flip)).collect()
        })
        .collect();
    BitMatrix::from_rows(&rows).unwrap()
}
