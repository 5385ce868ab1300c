use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Csr, GraphError};
use crate::{idx, vid, VertexId};

/// Sample count used by [`approx_diameter`] when none is given.
pub const DEFAULT_DIAMETER_SOURCES: usize = 16;

/// Static statistics consumed by the cost model and the traversal heuristics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub num_vertices: usize,
    pub num_edges: usize,
    pub max_degree: usize,
    pub avg_degree: f64,
    pub approx_diameter: usize,
}

impl GraphStats {
    pub fn compute(g: &Csr, num_sources: usize, seed: u64) -> Result<Self, GraphError> {
        Ok(GraphStats {
            num_vertices: g.num_vertices(),
            num_edges: g.num_edges(),
            max_degree: g.max_degree(),
            avg_degree: if g.num_vertices() == 0 {
                0.0
            } else {
                g.num_edges() as f64 / g.num_vertices() as f64
            },
            approx_diameter: approx_diameter(g, num_sources, seed)?,
        })
    }
}

/// Source vertices used by [`approx_diameter`]: every vertex when
/// `num_sources >= num_vertices`, otherwise a seeded sample without
/// replacement, sorted.
pub fn sample_sources(num_vertices: usize, num_sources: usize, seed: u64) -> Vec<VertexId> {
    let mut picked: Vec<VertexId> = if num_sources >= num_vertices {
        (0..num_vertices).map(vid).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::index::sample(&mut rng, num_vertices, num_sources)
            .into_iter()
            .map(vid)
            .collect()
    };
    picked.sort_unstable();
    picked
}

/// BFS eccentricity of `source` within its reachable set.
pub fn eccentricity(g: &Csr, source: VertexId) -> usize {
    let mut dist = vec![usize::MAX; g.num_vertices()];
    let mut queue = VecDeque::from([source]);
    dist[idx(source)] = 0;
    let mut far = 0;
    while let Some(u) = queue.pop_front() {
        let du = dist[idx(u)];
        far = far.max(du);
        for &v in g.neighbors(u) {
            if dist[idx(v)] == usize::MAX {
                dist[idx(v)] = du + 1;
                queue.push_back(v);
            }
        }
    }
    far
}

/// Lower bound on the diameter: the largest BFS eccentricity over sampled sources.
pub fn approx_diameter(g: &Csr, num_sources: usize, seed: u64) -> Result<usize, GraphError> {
    if g.num_vertices() == 0 {
        return Err(GraphError::EmptyGraph);
    }
    if num_sources == 0 {
        return Err(GraphError::NoSources);
    }
    Ok(sample_sources(g.num_vertices(), num_sources, seed)
        .into_iter()
        .map(|s| eccentricity(g, s))
        .max()
        .unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;

    #[test]
    fn path_and_clique() {
        assert_eq!(approx_diameter(&fixtures::path(4), 16, 0).unwrap(), 3);
        assert_eq!(approx_diameter(&fixtures::complete(4), 16, 0).unwrap(), 1);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            approx_diameter(&fixtures::path(4), 0, 0),
            Err(GraphError::NoSources)
        ));
        let empty = Csr::build(0, &[], None).unwrap();
        assert!(matches!(approx_diameter(&empty, 4, 0), Err(GraphError::EmptyGraph)));
    }

    #[test]
    fn sampled_sources_are_distinct() {
        let s = sample_sources(100, 10, 9);
        assert_eq!(s.len(), 10);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(s, sample_sources(100, 10, 9));
        assert_eq!(sample_sources(3, 10, 0), vec![0, 1, 2]);
    }

    #[test]
    fn stats_fields() {
        let st = GraphStats::compute(&fixtures::star(5), 16, 0).unwrap();
        assert_eq!(st.num_edges, 8);
        assert_eq!(st.max_degree, 4);
        assert_eq!(st.approx_diameter, 2);
        assert!((st.avg_degree - 1.6).abs() < 1e-12);
    }
}
