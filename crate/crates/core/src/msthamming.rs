//! Exact Hamming distance products in time that follows the spanning-tree
//! cost of the rows.
//!
//! A cheap spanning tree of the rows of `A` is walked row to row; for each
//! column `b` of `B` the distance of the first row is computed directly and
//! every later row inherits its predecessor's distance, corrected only at
//! the coordinates where the two rows differ:
//!
//! ```text
//! D_i = D_k - #{l in diff(k,i) : A_il = b_l} + #{l in diff(k,i) : A_kl = b_l}
//! ```
//!
//! Per column this costs `O(q + p + tree cost)`. The orientation (`A`
//! against `B`, or `B^T` against `A^T`) is picked from the tree costs
//! before any column is processed.

use rayon::prelude::*;

use crate::appapham::approx_mst_sigma;
use crate::bits::{unchecked_sigma_distance, SymbolMatrix};
use crate::error::{Error, Result};
use crate::reduction::{exact_mst, CountMatrix, DistanceMatrix};
use crate::sketch::SketchOptions;
use crate::tree::{SpanningTree, TreeEdge};
use crate::Real;

/// A walk over a spanning tree of matrix rows, with the coordinate sets on
/// which consecutive rows differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Traversal {
    order: Vec<usize>,
    steps: Vec<usize>,
    edge_diffs: Vec<Vec<usize>>,
}

impl Traversal {
    /// Row indices in visiting order; rows may repeat.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn start(&self) -> usize {
        self.order[0]
    }

    /// Number of consecutive pairs.
    pub fn steps(&self) -> usize {
        self.steps.len()
    }

    /// Coordinates where `order[step]` and `order[step + 1]` differ, sorted.
    pub fn diff(&self, step: usize) -> &[usize] {
        &self.edge_diffs[self.steps[step]]
    }

    /// Sum of `|diff|` over all consecutive pairs.
    pub fn total_diff(&self) -> u64 {
        self.steps.iter().map(|&e| self.edge_diffs[e].len() as u64).sum()
    }

    /// Cuts the walk right after the last row seen for the first time.
    pub fn truncated(&self) -> Traversal {
        let mut seen = vec![false; self.order.iter().max().map_or(0, |m| m + 1)];
        let mut last_new = 0;
        for (pos, &v) in self.order.iter().enumerate() {
            if !seen[v] {
                seen[v] = true;
                last_new = pos;
            }
        }
        Traversal {
            order: self.order[..=last_new].to_vec(),
            steps: self.steps[..last_new].to_vec(),
            edge_diffs: self.edge_diffs.clone(),
        }
    }
}

/// Depth-first Euler tour of `tree` over the rows of `a`, children in
/// increasing index order. Every tree edge is crossed twice; each edge's
/// diff set is computed once.
pub fn build_traversal<T: Real>(
    tree: &SpanningTree<T>,
    a: &SymbolMatrix,
    start: usize,
) -> Result<Traversal> {
    let n = a.rows();
    if tree.nodes != n {
        return Err(Error::Disconnected(format!(
            "tree over {} nodes for {n} rows",
            tree.nodes
        )));
    }
    if n == 0 {
        return Err(Error::param("traversal of an empty tree"));
    }
    if start >= n {
        return Err(Error::param(format!("start row {start} out of range")));
    }
    if tree.edges.len() != n - 1 || tree.edges.iter().any(|e| e.u >= n || e.v >= n) {
        return Err(Error::Disconnected(format!(
            "{} edges for {n} nodes",
            tree.edges.len()
        )));
    }

    let edge_diffs: Vec<Vec<usize>> = tree
        .edges
        .iter()
        .map(|e| {
            let (x, y) = (a.row(e.u), a.row(e.v));
            (0..a.cols()).filter(|&l| x.get(l) != y.get(l)).collect()
        })
        .collect();

    let adj = tree.adjacency();
    let mut visited = vec![false; n];
    let mut parent_edge = vec![usize::MAX; n];
    let mut order = vec![start];
    let mut steps = Vec::with_capacity(2 * n);
    let mut stack = vec![(start, 0usize)];
    visited[start] = true;
    while let Some(top) = stack.last_mut() {
        let node = top.0;
        if top.1 < adj[node].len() {
            let (next, edge) = adj[node][top.1];
            top.1 += 1;
            if visited[next] {
                continue;
            }
            visited[next] = true;
            parent_edge[next] = edge;
            order.push(next);
            steps.push(edge);
            stack.push((next, 0));
        } else {
            stack.pop();
            if let Some(&(parent, _)) = stack.last() {
                order.push(parent);
                steps.push(parent_edge[node]);
            }
        }
    }
    if let Some(missing) = visited.iter().position(|v| !v) {
        return Err(Error::Disconnected(format!("row {missing} unreachable from {start}")));
    }
    Ok(Traversal {
        order,
        steps,
        edge_diffs,
    })
}

/// Which product the incremental walk ran on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// Walk the rows of `A`, one pass per column of `B`.
    Rows,
    /// Walk the rows of `B^T`, one pass per row of `A`.
    Transposed,
}

/// Exact costs of the spanning trees built for the rows of `A` and of `B^T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct MstCostEstimate {
    pub cost_rows_a: u64,
    pub cost_rows_bt: u64,
}

/// Operation counters of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmstStats {
    pub orientation: Orientation,
    pub estimate: MstCostEstimate,
    /// Cost of the tree that was walked.
    pub walked_tree_cost: u64,
    /// Passes over the traversal (columns of the walked product).
    pub passes: u64,
    pub traversal_steps: u64,
    /// `sum |diff|` over one traversal.
    pub diff_total: u64,
    /// Coordinate comparisons made while walking, all passes.
    pub coordinate_updates: u64,
    /// Coordinate comparisons spent on the directly computed start rows.
    pub start_row_comparisons: u64,
    /// `p * q * r`, the comparison count of the naive method.
    pub naive_comparisons: u64,
}

impl MmstStats {
    pub fn key_values(&self) -> Vec<(&'static str, String)> {
        vec![
            (
                "orientation",
                match self.orientation {
                    Orientation::Rows => "rows".to_string(),
                    Orientation::Transposed => "transposed".to_string(),
                },
            ),
            ("tree_cost_rows_a", self.estimate.cost_rows_a.to_string()),
            ("tree_cost_rows_bt", self.estimate.cost_rows_bt.to_string()),
            ("walked_tree_cost", self.walked_tree_cost.to_string()),
            ("passes", self.passes.to_string()),
            ("traversal_steps", self.traversal_steps.to_string()),
            ("diff_total", self.diff_total.to_string()),
            ("coordinate_updates", self.coordinate_updates.to_string()),
            ("start_row_comparisons", self.start_row_comparisons.to_string()),
            ("naive_comparisons", self.naive_comparisons.to_string()),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MmstOptions<T = f64> {
    /// Sketch settings for the approximate row trees.
    pub sketch: SketchOptions<T>,
    /// Row counts up to this use an exact spanning tree instead of a
    /// sketched one.
    pub exact_tree_cutoff: usize,
    /// Check every incremental update against a direct distance (slow).
    pub verify_updates: bool,
}

impl<T: Real> Default for MmstOptions<T> {
    fn default() -> Self {
        MmstOptions {
            sketch: SketchOptions::default(),
            exact_tree_cutoff: 64,
            verify_updates: false,
        }
    }
}

fn row_tree<T: Real>(m: &SymbolMatrix, opts: &MmstOptions<T>) -> Result<SpanningTree<T>> {
    if m.rows() <= opts.exact_tree_cutoff {
        let t = exact_mst(m)?;
        Ok(SpanningTree {
            nodes: t.nodes,
            edges: t
                .edges
                .into_iter()
                .map(|e| TreeEdge {
                    u: e.u,
                    v: e.v,
                    weight: e.weight,
                    estimate: None,
                })
                .collect(),
        })
    } else {
        approx_mst_sigma(m, &opts.sketch)
    }
}

struct Walk {
    columns: Vec<Vec<u32>>,
    updates: u64,
    start_row: u64,
}

/// Distances from every row of `rows` to every row of `others`, walking a
/// traversal of the rows of `rows`. Output is indexed `[other][row]`.
fn walk(rows: &SymbolMatrix, others: &SymbolMatrix, tr: &Traversal, verify: bool) -> Walk {
    let p = rows.rows();
    let q = rows.cols();
    let order = tr.order();
    let per_column: Vec<(Vec<u32>, u64)> = (0..others.rows())
        .into_par_iter()
        .map(|j| {
            let b = others.row(j);
            let mut d = vec![0i64; p];
            let s = tr.start();
            d[s] = unchecked_sigma_distance(rows.row(s), b) as i64;
            let mut updates = 0u64;
            for step in 0..tr.steps() {
                let (k, i) = (order[step], order[step + 1]);
                let (row_k, row_i) = (rows.row(k), rows.row(i));
                let mut v = d[k];
                for &l in tr.diff(step) {
                    let bl = b.get(l);
                    if row_i.get(l) == bl {
                        v -= 1;
                    }
                    if row_k.get(l) == bl {
                        v += 1;
                    }
                }
                updates += tr.diff(step).len() as u64;
                d[i] = v;
                if verify {
                    let direct = unchecked_sigma_distance(row_i, b) as i64;
                    assert_eq!(v, direct, "incremental distance of row {i} to column {j}");
                }
            }
            (d.into_iter().map(|x| x as u32).collect(), updates)
        })
        .collect();
    let updates = per_column.iter().map(|c| c.1).sum();
    Walk {
        columns: per_column.into_iter().map(|c| c.0).collect(),
        updates,
        start_row: (others.rows() * q) as u64,
    }
}

/// Exact distance product of `a` (p x q) and `b` (q x r), with counters.
pub fn mmst_distances_with<T: Real>(
    a: &SymbolMatrix,
    b: &SymbolMatrix,
    opts: &MmstOptions<T>,
) -> Result<(DistanceMatrix, MmstStats)> {
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
    let (p, q, r) = (a.rows(), a.cols(), b.cols());
    let bt = b.transpose();
    let mut stats = MmstStats {
        orientation: Orientation::Rows,
        estimate: MstCostEstimate::default(),
        walked_tree_cost: 0,
        passes: 0,
        traversal_steps: 0,
        diff_total: 0,
        coordinate_updates: 0,
        start_row_comparisons: 0,
        naive_comparisons: (p * q * r) as u64,
    };
    if p == 0 || r == 0 {
        return Ok((CountMatrix::zeros(p, r), stats));
    }

    let tree_a = row_tree(a, opts)?;
    let tree_bt = if *a == bt { tree_a.clone() } else { row_tree(&bt, opts)? };
    stats.estimate = MstCostEstimate {
        cost_rows_a: tree_a.cost(),
        cost_rows_bt: tree_bt.cost(),
    };
    let rows_first = (r as u128) * (tree_a.cost() as u128) <= (p as u128) * (tree_bt.cost() as u128);

    let (rows, others, tree) = if rows_first {
        (a, &bt, &tree_a)
    } else {
        stats.orientation = Orientation::Transposed;
        (&bt, a, &tree_bt)
    };
    let tr = build_traversal(tree, rows, 0)?.truncated();
    let w = walk(rows, others, &tr, opts.verify_updates);
    stats.walked_tree_cost = tree.cost();
    stats.passes = others.rows() as u64;
    stats.traversal_steps = tr.steps() as u64;
    stats.diff_total = tr.total_diff();
    stats.coordinate_updates = w.updates;
    stats.start_row_comparisons = w.start_row;

    let d = if rows_first {
        CountMatrix::from_fn(p, r, |i, j| w.columns[j][i])
    } else {
        CountMatrix::from_fn(p, r, |i, j| w.columns[i][j])
    };
    Ok((d, stats))
}

/// Exact Hamming distance between every row of `a` and every column of `b`.
pub fn mmst_distances(a: &SymbolMatrix, b: &SymbolMatrix) -> Result<DistanceMatrix> {
    mmst_distances_with::<f64>(a, b, &MmstOptions::default()).map(|(d, _)| d)
}

/// Exact minimum spanning tree of the rows of `p` from the incremental
/// distance product, with counters.
pub fn output_sensitive_mst_with<T: Real>(
    p: &SymbolMatrix,
    opts: &MmstOptions<T>,
) -> Result<(SpanningTree, MmstStats)> {
    let (d, stats) = mmst_distances_with(p, &p.transpose(), opts)?;
    Ok((crate::reduction::tree_from_distances(&d), stats))
}

pub fn output_sensitive_mst(p: &SymbolMatrix) -> Result<SpanningTree> {
    output_sensitive_mst_with::<f64>(p, &MmstOptions::default()).map(|(t, _)| t)
}
