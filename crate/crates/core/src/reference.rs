//! Plain sequential algorithms over a whole graph, independent of the
//! engine. Used by `validate` and the test suites as oracles.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::graph::Csr;
use crate::primitives::{UNREACHED, UNVISITED};
use crate::{idx, vid, VertexId};

/// Hop distances from `source`.
pub fn bfs_levels(g: &Csr, source: VertexId) -> Vec<u32> {
    let mut label = vec![UNVISITED; g.num_vertices()];
    let mut queue = VecDeque::from([source]);
    label[idx(source)] = 0;
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if label[idx(v)] == UNVISITED {
                label[idx(v)] = label[idx(u)] + 1;
                queue.push_back(v);
            }
        }
    }
    label
}

/// Weighted shortest distances from `source` (unit weights when unweighted).
pub fn dijkstra(g: &Csr, source: VertexId) -> Vec<u64> {
    let mut dist = vec![UNREACHED; g.num_vertices()];
    let mut heap = BinaryHeap::from([Reverse((0u64, source))]);
    dist[idx(source)] = 0;
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[idx(u)] {
            continue;
        }
        for e in g.edge_range(u) {
            let v = g.col_indices()[e];
            let nd = d + g.weight(e) as u64;
            if nd < dist[idx(v)] {
                dist[idx(v)] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Smallest vertex ID of each vertex's component, by union-find.
pub fn components(g: &Csr) -> Vec<VertexId> {
    let n = g.num_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (u, v, _) in g.arcs() {
        let (a, b) = (root(&mut parent, idx(u)), root(&mut parent, idx(v)));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    (0..n).map(|x| vid(root(&mut parent, x))).collect()
}

/// Single-source dependencies by Brandes' algorithm on an unweighted graph;
/// zero at the source.
pub fn brandes(g: &Csr, source: VertexId) -> Vec<f64> {
    let n = g.num_vertices();
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![UNVISITED; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([source]);
    sigma[idx(source)] = 1.0;
    dist[idx(source)] = 0;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in g.neighbors(u) {
            if dist[idx(v)] == UNVISITED {
                dist[idx(v)] = dist[idx(u)] + 1;
                queue.push_back(v);
            }
            if dist[idx(v)] == dist[idx(u)] + 1 {
                sigma[idx(v)] += sigma[idx(u)];
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    for &w in order.iter().rev() {
        for &v in g.neighbors(w) {
            if dist[idx(v)] != UNVISITED && dist[idx(v)] + 1 == dist[idx(w)] {
                delta[idx(v)] += sigma[idx(v)] / sigma[idx(w)] * (1.0 + delta[idx(w)]);
            }
        }
    }
    delta[idx(source)] = 0.0;
    delta
}

/// Power iteration with uniform teleport and dangling redistribution. Stops
/// after `max_iter` updates or once every relative change is below
/// `epsilon`. Returns the ranks and the number of updates.
pub fn pagerank(g: &Csr, damping: f64, epsilon: f64, max_iter: usize) -> (Vec<f64>, usize) {
    let n = g.num_vertices();
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut iters = 0;
    while iters < max_iter {
        let mut acc = vec![0.0f64; n];
        let mut dangling = 0.0;
        for (u, &r) in rank.iter().enumerate() {
            let deg = g.degree(vid(u));
            if deg == 0 {
                dangling += r;
                continue;
            }
            let share = r / deg as f64;
            for &v in g.neighbors(vid(u)) {
                acc[idx(v)] += share;
            }
        }
        let mut max_delta = 0.0f64;
        for v in 0..n {
            let new = (1.0 - damping) / nf + damping * (acc[v] + dangling / nf);
            max_delta = max_delta.max((new - rank[v]).abs() / rank[v]);
            rank[v] = new;
        }
        iters += 1;
        if max_delta < epsilon {
            break;
        }
    }
    (rank, iters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;

    #[test]
    fn p4_oracles() {
        let g = fixtures::path(4);
        assert_eq!(bfs_levels(&g, 0), vec![0, 1, 2, 3]);
        assert_eq!(brandes(&g, 0), vec![0.0, 2.0, 1.0, 0.0]);
        assert_eq!(components(&g), vec![0, 0, 0, 0]);
    }

    #[test]
    fn star_leaf_dependency() {
        let bc = brandes(&fixtures::star(5), 1);
        assert_eq!(bc[0], 3.0);
    }

    #[test]
    fn weighted_path() {
        let g = Csr::build(4, &[(0, 1), (1, 0), (1, 2), (2, 1), (2, 3), (3, 2)], Some(&[2, 2, 3, 3, 1, 1])).unwrap();
        assert_eq!(dijkstra(&g, 0), vec![0, 2, 5, 6]);
    }

    #[test]
    fn triangle_plus_isolated() {
        let g = fixtures::triangle_plus_isolated();
        assert_eq!(components(&g), vec![0, 0, 0, 3]);
        let (r, _) = pagerank(&g, 0.85, 1e-12, 1000);
        assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((r[0] - r[1]).abs() < 1e-15 && (r[1] - r[2]).abs() < 1e-15);
    }
}
