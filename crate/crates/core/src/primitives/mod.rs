//! The shipped primitives.

mod bc;
mod bfs;
mod cc;
mod dispatch;
mod dobfs;
mod pr;
mod sssp;

pub use bc::{bc, Bc, BcOutput, BcPhase, BcReport, BcState};
pub use bfs::{bfs, Bfs, BfsOutput, BfsState};
pub use cc::{cc, Cc, CcOutput, CcState};
pub use dispatch::{kind_supports, run_kind, PrimitiveOutput, PrimitiveParams};
pub use dobfs::{direction_decide, dobfs, Direction, DirectionState, Dobfs, DobfsOutput, DobfsState, DEFAULT_DO_A, DEFAULT_DO_B};
pub use pr::{pagerank, PageRank, PrOutput, PrReport, PrState, DEFAULT_DAMPING, DEFAULT_EPSILON, DEFAULT_MAX_ITER};
pub use sssp::{sssp, Sssp, SsspOutput, SsspState};

use crate::engine::EngineError;
use crate::partition::PartitionPlan;
use crate::{idx, VertexId};

/// Hop label of a vertex not yet reached.
pub const UNVISITED: u32 = u32::MAX;

/// Distance of a vertex not yet reached.
pub const UNREACHED: u64 = u64::MAX;

pub(crate) fn check_source(plan: &PartitionPlan, source: VertexId) -> Result<(), EngineError> {
    if idx(source) >= plan.num_vertices() {
        return Err(EngineError::SourceOutOfRange {
            vertex: source as u64,
            num_vertices: plan.num_vertices(),
        });
    }
    Ok(())
}
