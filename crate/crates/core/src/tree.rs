//! Spanning trees over point indices and the dense Prim routine used by
//! every tree-building operation.

use crate::Real;

/// One tree edge. `weight` is the exact (Hamming) length of the edge;
/// `estimate` carries the sketched weight the tree was built from, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeEdge<T = f64> {
    pub u: usize,
    pub v: usize,
    pub weight: u32,
    pub estimate: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpanningTree<T = f64> {
    pub nodes: usize,
    pub edges: Vec<TreeEdge<T>>,
}

impl<T: Real> SpanningTree<T> {
    /// Total exact weight.
    pub fn cost(&self) -> u64 {
        self.edges.iter().map(|e| e.weight as u64).sum()
    }

    /// Total estimated weight, when every edge carries one.
    pub fn estimated_cost(&self) -> Option<T> {
        self.edges
            .iter()
            .try_fold(T::zero(), |acc, e| e.estimate.map(|w| acc + w))
    }

    /// Neighbour lists, each sorted by node index.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for (idx, e) in self.edges.iter().enumerate() {
            adj[e.u].push((e.v, idx));
            adj[e.v].push((e.u, idx));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }
}

/// Prim's algorithm with a linear scan over the complete graph on `n`
/// nodes, O(n^2) weight evaluations.
///
/// Among candidate edges of equal weight the one with the smallest
/// `(min endpoint, max endpoint)` pair wins. Returned edges are normalized
/// to `u < v`, in insertion order.
pub fn prim<W, F>(n: usize, mut weight: F) -> Vec<(usize, usize, W)>
where
    W: PartialOrd + Copy,
    F: FnMut(usize, usize) -> W,
{
    if n <= 1 {
        return Vec::new();
    }
    let key = |w: W, a: usize, b: usize| (w, a.min(b), a.max(b));
    let better = |x: &(W, usize, usize), y: &(W, usize, usize)| {
        x.0 < y.0 || (x.0 == y.0 && (x.1, x.2) < (y.1, y.2))
    };

    let mut in_tree = vec![false; n];
    in_tree[0] = true;
    let mut best: Vec<Option<(W, usize, usize)>> = (0..n)
        .map(|v| (v != 0).then(|| key(weight(0, v), 0, v)))
        .collect();
    let mut edges = Vec::with_capacity(n - 1);

    for _ in 1..n {
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let cand = best[v].as_ref().expect("non-tree node has a candidate");
            match pick {
                Some(p) if !better(cand, best[p].as_ref().unwrap()) => {}
                _ => pick = Some(v),
            }
        }
        let v = pick.expect("some node remains");
        let (w, a, b) = best[v].take().unwrap();
        in_tree[v] = true;
        edges.push((a, b, w));
        for u in 0..n {
            if in_tree[u] {
                continue;
            }
            let cand = key(weight(v, u), v, u);
            if better(&cand, best[u].as_ref().unwrap()) {
                best[u] = Some(cand);
            }
        }
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_sizes() {
        assert!(prim(0, |_, _| 1u32).is_empty());
        assert!(prim(1, |_, _| 1u32).is_empty());
        assert_eq!(prim(2, |_, _| 7u32), vec![(0, 1, 7)]);
    }

    #[test]
    fn line_metric() {
        let pos = [0i64, 10, 3, 7, 1];
        let edges = prim(5, |a, b| (pos[a] - pos[b]).unsigned_abs());
        let total: u64 = edges.iter().map(|e| e.2).sum();
        assert_eq!(total, 10);
        assert_eq!(edges.len(), 4);
    }

    #[test]
    fn ties_prefer_smaller_endpoints() {
        // all weights equal: the star around node 0 is lexicographically smallest
        let edges = prim(4, |_, _| 1u32);
        assert_eq!(edges, vec![(0, 1, 1), (0, 2, 1), (0, 3, 1)]);
    }

    #[test]
    fn estimated_cost_requires_all_estimates() {
        let mut t: SpanningTree<f64> = SpanningTree {
            nodes: 3,
            edges: vec![
                TreeEdge { u: 0, v: 1, weight: 2, estimate: Some(2.5) },
                TreeEdge { u: 1, v: 2, weight: 3, estimate: Some(1.0) },
            ],
        };
        assert_eq!(t.cost(), 5);
        assert_eq!(t.estimated_cost(), Some(3.5));
        t.edges[1].estimate = None;
        assert_eq!(t.estimated_cost(), None);
    }
}
