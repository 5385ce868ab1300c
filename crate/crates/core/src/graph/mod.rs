//! Compressed sparse-row graphs and the preprocessing applied before
//! partitioning: symmetrization, deduplication, synthetic generation and
//! random edge weights.

mod io;
mod rmat;
mod stats;

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::{idx, vid, VertexId, Weight};

pub use io::{load_graph, parse_edge_list, write_edge_list, EdgeList};
pub use rmat::{rmat_generate, DEFAULT_RMAT_PROBS};
pub use stats::{approx_diameter, eccentricity, sample_sources, GraphStats, DEFAULT_DIAMETER_SOURCES};

/// Default weight range used when a weighted primitive runs on an unweighted graph.
pub const DEFAULT_WEIGHT_RANGE: (Weight, Weight) = (0, 64);

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge {index} endpoint {vertex} out of range for {num_vertices} vertices")]
    EndpointOutOfRange {
        index: usize,
        vertex: u64,
        num_vertices: usize,
    },
    #[error("{weights} weights supplied for {edges} edges")]
    WeightCountMismatch { edges: usize, weights: usize },
    #[error("R-MAT probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),
    #[error("invalid R-MAT parameters: {0}")]
    InvalidRmat(String),
    #[error("invalid weight range [{lo}, {hi}]")]
    InvalidWeightRange { lo: Weight, hi: Weight },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("num_sources must be at least 1")]
    NoSources,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph has {0} vertices, more than the vertex ID type can address")]
    TooManyVertices(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Immutable compressed sparse-row graph with optional nonnegative integer
/// edge weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Csr {
    num_vertices: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<VertexId>,
    edge_values: Option<Vec<Weight>>,
}

impl Csr {
    /// Builds a CSR from an arc list. Rows are sorted by neighbor ID (then by
    /// weight); duplicate arcs are kept.
    pub fn build(
        num_vertices: usize,
        edges: &[(VertexId, VertexId)],
        weights: Option<&[Weight]>,
    ) -> Result<Self, GraphError> {
        if num_vertices > idx(crate::INVALID_VERTEX) {
            return Err(GraphError::TooManyVertices(num_vertices));
        }
        if let Some(w) = weights {
            if w.len() != edges.len() {
                return Err(GraphError::WeightCountMismatch {
                    edges: edges.len(),
                    weights: w.len(),
                });
            }
        }
        for (index, &(u, v)) in edges.iter().enumerate() {
            for x in [u, v] {
                if idx(x) >= num_vertices {
                    return Err(GraphError::EndpointOutOfRange {
                        index,
                        vertex: x as u64,
                        num_vertices,
                    });
                }
            }
        }

        let mut row_offsets = vec![0usize; num_vertices + 1];
        for &(u, _) in edges {
            row_offsets[idx(u) + 1] += 1;
        }
        for i in 0..num_vertices {
            row_offsets[i + 1] += row_offsets[i];
        }
        let mut cursor = row_offsets.clone();
        let mut col_indices = vec![0 as VertexId; edges.len()];
        let mut values = weights.map(|_| vec![0 as Weight; edges.len()]);
        for (e, &(u, v)) in edges.iter().enumerate() {
            let slot = cursor[idx(u)];
            cursor[idx(u)] += 1;
            col_indices[slot] = v;
            if let (Some(out), Some(w)) = (values.as_mut(), weights) {
                out[slot] = w[e];
            }
        }

        let mut g = Csr {
            num_vertices,
            row_offsets,
            col_indices,
            edge_values: values,
        };
        g.sort_rows();
        Ok(g)
    }

    /// Assembles a CSR from raw arrays, validating the structural invariants.
    pub fn from_parts(
        num_vertices: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<VertexId>,
        edge_values: Option<Vec<Weight>>,
    ) -> Result<Self, GraphError> {
        let bad = |message: &str| GraphError::Parse {
            line: 0,
            message: message.to_string(),
        };
        if row_offsets.len() != num_vertices + 1 || row_offsets[0] != 0 {
            return Err(bad("malformed row offsets"));
        }
        if row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(bad("row offsets decrease"));
        }
        if row_offsets[num_vertices] != col_indices.len() {
            return Err(bad("row offsets do not cover the column array"));
        }
        if let Some(w) = &edge_values {
            if w.len() != col_indices.len() {
                return Err(GraphError::WeightCountMismatch {
                    edges: col_indices.len(),
                    weights: w.len(),
                });
            }
        }
        if let Some((index, &v)) = col_indices
            .iter()
            .enumerate()
            .find(|(_, &v)| idx(v) >= num_vertices)
        {
            return Err(GraphError::EndpointOutOfRange {
                index,
                vertex: v as u64,
                num_vertices,
            });
        }
        Ok(Csr {
            num_vertices,
            row_offsets,
            col_indices,
            edge_values,
        })
    }

    fn sort_rows(&mut self) {
        for v in 0..self.num_vertices {
            let range = self.row_offsets[v]..self.row_offsets[v + 1];
            match self.edge_values.as_mut() {
                None => self.col_indices[range].sort_unstable(),
                Some(values) => {
                    let mut row: Vec<(VertexId, Weight)> = range
                        .clone()
                        .map(|e| (self.col_indices[e], values[e]))
                        .collect();
                    row.sort_unstable();
                    for (e, (c, w)) in range.zip(row) {
                        self.col_indices[e] = c;
                        values[e] = w;
                    }
                }
            }
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.col_indices.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[VertexId] {
        &self.col_indices
    }

    pub fn edge_values(&self) -> Option<&[Weight]> {
        self.edge_values.as_deref()
    }

    pub fn is_weighted(&self) -> bool {
        self.edge_values.is_some()
    }

    #[inline]
    pub fn edge_range(&self, v: VertexId) -> Range<usize> {
        self.row_offsets[idx(v)]..self.row_offsets[idx(v) + 1]
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.col_indices[self.edge_range(v)]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.row_offsets[idx(v) + 1] - self.row_offsets[idx(v)]
    }

    /// Weight of edge slot `e`, or 1 for unweighted graphs.
    #[inline]
    pub fn weight(&self, e: usize) -> Weight {
        self.edge_values.as_ref().map_or(1, |w| w[e])
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_vertices)
            .map(|v| self.degree(vid(v)))
            .max()
            .unwrap_or(0)
    }

    /// All arcs in CSR order as `(src, dst, weight)`.
    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId, Option<Weight>)> + '_ {
        (0..self.num_vertices).flat_map(move |u| {
            self.edge_range(vid(u)).map(move |e| {
                (
                    vid(u),
                    self.col_indices[e],
                    self.edge_values.as_ref().map(|w| w[e]),
                )
            })
        })
    }

    /// Splits the arcs back into the `(edges, weights)` form accepted by [`Csr::build`].
    pub fn to_edge_list(&self) -> (Vec<(VertexId, VertexId)>, Option<Vec<Weight>>) {
        let edges = self.arcs().map(|(u, v, _)| (u, v)).collect();
        (edges, self.edge_values.clone())
    }

    /// Position of arc `(u, v)` in the column array, if present.
    pub fn find_arc(&self, u: VertexId, v: VertexId) -> Option<usize> {
        let range = self.edge_range(u);
        let start = range.start;
        self.col_indices[range]
            .binary_search(&v)
            .ok()
            .map(|i| {
                // first of a run of duplicates
                let mut e = start + i;
                while e > start && self.col_indices[e - 1] == v {
                    e -= 1;
                }
                e
            })
    }

    /// True when every arc has a reverse arc with equal weight.
    pub fn is_symmetric(&self) -> bool {
        self.arcs().all(|(u, v, w)| {
            self.find_arc(v, u)
                .is_some_and(|e| w.is_none() || self.edge_values.as_ref().map(|x| x[e]) == w)
        })
    }

    /// Converts to an undirected simple graph: self-loops dropped, both arc
    /// directions present, duplicate arcs merged keeping the minimum weight.
    pub fn symmetrize_dedup(&self) -> Csr {
        let mut arcs: Vec<(VertexId, VertexId, Weight)> = Vec::with_capacity(2 * self.num_edges());
        for (u, v, w) in self.arcs() {
            if u == v {
                continue;
            }
            let w = w.unwrap_or(0);
            arcs.push((u, v, w));
            arcs.push((v, u, w));
        }
        arcs.sort_unstable();
        arcs.dedup_by(|later, first| later.0 == first.0 && later.1 == first.1);

        let edges: Vec<(VertexId, VertexId)> = arcs.iter().map(|&(u, v, _)| (u, v)).collect();
        let weights: Option<Vec<Weight>> = self
            .edge_values
            .as_ref()
            .map(|_| arcs.iter().map(|a| a.2).collect());
        Csr::build(self.num_vertices, &edges, weights.as_deref())
            .expect("arcs come from a valid graph")
    }

    /// Gives every undirected edge one uniform weight in `[lo, hi]`, mirrored
    /// onto both of its arcs. Arcs without a reverse get their own draw.
    pub fn with_random_weights(&self, lo: Weight, hi: Weight, seed: u64) -> Result<Csr, GraphError> {
        if lo > hi {
            return Err(GraphError::InvalidWeightRange { lo, hi });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = vec![0 as Weight; self.num_edges()];
        for u in 0..self.num_vertices {
            let u = vid(u);
            for e in self.edge_range(u) {
                let v = self.col_indices[e];
                let mirrored = if v < u { self.find_arc(v, u) } else { None };
                weights[e] = match mirrored {
                    Some(r) => weights[r],
                    None => rng.gen_range(lo..=hi),
                };
            }
        }
        Ok(Csr {
            num_vertices: self.num_vertices,
            row_offsets: self.row_offsets.clone(),
            col_indices: self.col_indices.clone(),
            edge_values: Some(weights),
        })
    }

    /// Drops edge weights.
    pub fn without_weights(&self) -> Csr {
        Csr {
            edge_values: None,
            ..self.clone()
        }
    }

    /// Number of bytes the CSR arrays occupy.
    pub fn bytes(&self) -> usize {
        self.row_offsets.len() * std::mem::size_of::<usize>()
            + self.col_indices.len() * std::mem::size_of::<VertexId>()
            + self
                .edge_values
                .as_ref()
                .map_or(0, |w| w.len() * std::mem::size_of::<Weight>())
    }
}

/// Frees a caller from building tiny fixtures by hand.
pub mod fixtures {
    use super::Csr;
    use crate::{vid, VertexId};

    fn undirected(n: usize, edges: &[(usize, usize)]) -> Csr {
        let e: Vec<(VertexId, VertexId)> = edges.iter().map(|&(u, v)| (vid(u), vid(v))).collect();
        Csr::build(n, &e, None).unwrap().symmetrize_dedup()
    }

    /// Undirected path on `n` vertices.
    pub fn path(n: usize) -> Csr {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        undirected(n, &edges)
    }

    /// Star with center 0 and `n - 1` leaves.
    pub fn star(n: usize) -> Csr {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        undirected(n, &edges)
    }

    pub fn complete(n: usize) -> Csr {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        undirected(n, &edges)
    }

    /// Triangle on {0, 1, 2} plus isolated vertex 3.
    pub fn triangle_plus_isolated() -> Csr {
        undirected(4, &[(0, 1), (1, 2), (0, 2)])
    }

    /// `rows x cols` 4-neighbor grid.
    pub fn grid(rows: usize, cols: usize) -> Csr {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        undirected(rows * cols, &edges)
    }

    /// Undirected R-MAT graph with default probabilities.
    pub fn rmat(scale: u32, edge_factor: usize, seed: u64) -> Csr {
        let edges = super::rmat_generate(scale, edge_factor, super::DEFAULT_RMAT_PROBS, seed)
            .expect("default parameters are valid");
        Csr::build(1 << scale, &edges, None)
            .unwrap()
            .symmetrize_dedup()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn directed_p4() -> Csr {
        Csr::build(4, &[(0, 1), (1, 2), (2, 3)], None).unwrap()
    }

    #[test]
    fn build_directed_path() {
        assert_eq!(directed_p4().row_offsets(), &[0, 1, 2, 3, 3]);
    }

    #[test]
    fn build_empty() {
        let g = Csr::build(3, &[], None).unwrap();
        assert_eq!(g.row_offsets(), &[0, 0, 0, 0]);
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn build_sorts_rows() {
        let g = Csr::build(3, &[(0, 2), (0, 1)], None).unwrap();
        assert_eq!(g.neighbors(0), &[1, 2]);
    }

    #[test]
    fn build_keeps_duplicates() {
        let g = Csr::build(2, &[(0, 1), (0, 1)], None).unwrap();
        assert_eq!(g.neighbors(0), &[1, 1]);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(matches!(
            Csr::build(2, &[(0, 2)], None),
            Err(GraphError::EndpointOutOfRange { vertex: 2, .. })
        ));
        assert!(matches!(
            Csr::build(2, &[(0, 1)], Some(&[1, 2])),
            Err(GraphError::WeightCountMismatch { .. })
        ));
    }

    #[test]
    fn symmetrize_path() {
        let g = directed_p4().symmetrize_dedup();
        assert_eq!(g.num_edges(), 6);
        assert_eq!(g.row_offsets(), &[0, 1, 3, 5, 6]);
        assert!(g.is_symmetric());
    }

    #[test]
    fn symmetrize_drops_loops_and_duplicates() {
        let g = Csr::build(2, &[(0, 0), (0, 1), (0, 1)], None)
            .unwrap()
            .symmetrize_dedup();
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0]);
    }

    #[test]
    fn symmetrize_keeps_min_weight() {
        let g = Csr::build(2, &[(0, 1), (1, 0)], Some(&[5, 2]))
            .unwrap()
            .symmetrize_dedup();
        assert_eq!(g.edge_values(), Some(&[2, 2][..]));
    }

    #[test]
    fn random_weights() {
        let p4 = directed_p4().symmetrize_dedup();
        let ones = p4.with_random_weights(1, 1, 3).unwrap();
        assert!(ones.edge_values().unwrap().iter().all(|&w| w == 1));

        let a = p4.with_random_weights(0, 64, 11).unwrap();
        let b = p4.with_random_weights(0, 64, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.is_symmetric());
        assert!(a.edge_values().unwrap().iter().all(|&w| w <= 64));

        assert!(matches!(
            p4.with_random_weights(5, 4, 0),
            Err(GraphError::InvalidWeightRange { .. })
        ));
    }

    #[test]
    fn fixtures_shapes() {
        assert_eq!(fixtures::star(5).num_edges(), 8);
        assert_eq!(fixtures::complete(4).num_edges(), 12);
        assert_eq!(fixtures::grid(3, 3).num_edges(), 24);
        assert_eq!(fixtures::triangle_plus_isolated().degree(3), 0);
    }
}
