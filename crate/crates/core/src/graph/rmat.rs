use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GraphError;
use crate::VertexId;

/// Quadrant probabilities `(A, B, C, D)` used for the synthetic benchmark graphs.
pub const DEFAULT_RMAT_PROBS: [f64; 4] = [0.57, 0.19, 0.19, 0.05];

/// Generates `2^scale * edge_factor` directed R-MAT edge insertions over
/// `2^scale` vertices. Each edge descends `scale` levels of the adjacency
/// matrix, picking quadrant A (top-left), B (top-right), C (bottom-left) or
/// D (bottom-right) with the given probabilities. Self-loops and duplicates
/// are left in; see [`super::Csr::symmetrize_dedup`].
pub fn rmat_generate(
    scale: u32,
    edge_factor: usize,
    probs: [f64; 4],
    seed: u64,
) -> Result<Vec<(VertexId, VertexId)>, GraphError> {
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(GraphError::ProbabilitySum(sum));
    }
    if probs.iter().any(|&p| p < 0.0) {
        return Err(GraphError::InvalidRmat("negative probability".into()));
    }
    if scale == 0 {
        return Err(GraphError::InvalidRmat("scale must be at least 1".into()));
    }
    if scale as usize >= std::mem::size_of::<VertexId>() * 8 {
        return Err(GraphError::InvalidRmat(format!(
            "scale {scale} exceeds the vertex ID width"
        )));
    }

    let [a, b, c, _] = probs;
    let ab = a + b;
    let abc = ab + c;
    let count = (1usize << scale) * edge_factor;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(count);
    for _ in 0..count {
        let (mut u, mut v): (VertexId, VertexId) = (0, 0);
        for level in (0..scale).rev() {
            let r: f64 = rng.gen();
            let bit: VertexId = 1 << level;
            if r < a {
            } else if r < ab {
                v |= bit;
            } else if r < abc {
                u |= bit;
            } else {
                u |= bit;
                v |= bit;
            }
        }
        edges.push((u, v));
    }
    Ok(edges)
}
