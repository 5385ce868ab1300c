//! Bulk-synchronous graph analytics over edge-cut partitioned graphs.
//!
//! A graph is split into `n` partitions, each processed by one worker. Every
//! superstep a worker runs a primitive's iteration body on its partition, the
//! engine splits the output frontier into local and remote parts, packages the
//! remote parts with their per-vertex associated values, exchanges them at a
//! barrier, and merges received values through the primitive's combiner.
//!
//! Module map:
//!
//! - [`graph`]: CSR storage, loaders, R-MAT generation and static statistics.
//! - [`partition`]: vertex assignments, per-partition subgraphs with proxy
//!   vertices, and border metrics.
//! - [`frontier`]: capacity-tracked frontier buffers and allocation policies.
//! - [`engine`]: traversal operators, frontier splitting and packaging, the
//!   superstep loop and the [`engine::Primitive`] authoring contract.
//! - [`primitives`]: BFS, direction-optimizing BFS, SSSP, CC, BC and PageRank.
//! - [`reference`]: plain sequential algorithms used as independent oracles.
//! - [`cost`]: BSP cost predictions, overhead fitting and bound checking.

pub mod cost;
pub mod engine;
pub mod frontier;
pub mod graph;
mod par;
pub mod partition;
pub mod primitives;
pub mod reference;

/// Vertex identifier. 32-bit unless the `ids64` feature is enabled.
#[cfg(not(feature = "ids64"))]
pub type VertexId = u32;
/// Vertex identifier. 32-bit unless the `ids64` feature is enabled.
#[cfg(feature = "ids64")]
pub type VertexId = u64;

/// Sentinel for "no vertex" in conversion tables and predecessor arrays.
pub const INVALID_VERTEX: VertexId = VertexId::MAX;

/// Edge weight type. Weights are nonnegative integers.
pub type Weight = u32;

#[inline]
pub(crate) fn vid(i: usize) -> VertexId {
    i as VertexId
}

#[inline]
pub(crate) fn idx(v: VertexId) -> usize {
    v as usize
}

pub use engine::{run_primitive, EngineConfig, EngineError, Execution, RunStats};
pub use frontier::{AllocationPolicy, BufferRole, Frontier};
pub use graph::{Csr, GraphError, GraphStats};
pub use partition::{Assignment, Duplication, PartitionError, PartitionPlan};
