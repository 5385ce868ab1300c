//! Connected components by hooking and pointer jumping.
//!
//! Each superstep a worker hooks the roots of every hosted edge's endpoints
//! (the larger root points at the smaller), compresses every pointer to its
//! root, and broadcasts the vertices whose component differs from what it
//! last sent. Receivers hook the received vertex's root with the received
//! component's root.

use crate::engine::{
    gather_hosted, run_primitive, Communication, EngineConfig, EngineError, IterationCtx, PartitionView, Primitive,
    RunStats,
};
use crate::frontier::Frontier;
use crate::partition::{Duplication, PartitionPlan};
use crate::{idx, vid, VertexId};

#[derive(Clone, Debug, Default)]
pub struct Cc;

#[derive(Debug)]
pub struct CcState {
    /// Component pointer per vertex; always `comp[v] <= v`.
    pub comp: Vec<VertexId>,
    last_sent: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcOutput {
    /// Smallest vertex ID of each vertex's component.
    pub labels: Vec<VertexId>,
}

impl CcOutput {
    pub fn num_components(&self) -> usize {
        self.labels.iter().enumerate().filter(|&(v, &c)| idx(c) == v).count()
    }
}

fn find(comp: &[VertexId], mut v: VertexId) -> VertexId {
    while comp[idx(v)] != v {
        v = comp[idx(v)];
    }
    v
}

/// Root lookup with path halving; keeps `comp[v] <= v`.
fn find_halving(comp: &mut [VertexId], mut v: VertexId) -> VertexId {
    while comp[idx(v)] != v {
        let parent = comp[idx(v)];
        comp[idx(v)] = comp[idx(parent)];
        v = parent;
    }
    v
}

/// Hooks the trees of `a` and `b`; true if they were separate.
fn hook(comp: &mut [VertexId], a: VertexId, b: VertexId) -> bool {
    let ra = find_halving(comp, a);
    let rb = find_halving(comp, b);
    if ra == rb {
        return false;
    }
    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
    comp[idx(hi)] = lo;
    true
}

impl Primitive for Cc {
    type State = CcState;
    type Value = VertexId;
    type Report = ();
    type Output = CcOutput;

    fn name(&self) -> &'static str {
        "cc"
    }

    fn num_value_associates(&self) -> usize {
        1
    }

    fn supports(&self, dup: Duplication) -> bool {
        dup == Duplication::DuplicateAll
    }

    fn communication(&self, _state: &CcState) -> Communication {
        Communication::Broadcast
    }

    fn init(&self, part: &PartitionView<'_>) -> Result<CcState, EngineError> {
        let comp: Vec<VertexId> = (0..part.num_local_vertices()).map(vid).collect();
        Ok(CcState {
            last_sent: comp.clone(),
            comp,
        })
    }

    fn initial_frontier(&self, _part: &PartitionView<'_>, _state: &mut CcState) -> Vec<VertexId> {
        Vec::new()
    }

    fn iterate(
        &self,
        ctx: &mut IterationCtx<'_, ()>,
        state: &mut CcState,
        _input: &Frontier,
        output: &mut Frontier,
    ) -> Result<(), EngineError> {
        let g = ctx.graph();
        let comp = &mut state.comp;
        let mut edges = 0u64;
        for &u in ctx.part.hosted() {
            for &v in g.neighbors(u) {
                edges += 1;
                hook(comp, u, v);
            }
        }
        ctx.add_edges_examined(edges);
        // comp[x] <= x, so an ascending pass sees every target already compressed.
        for x in 0..comp.len() {
            let c = comp[x];
            comp[x] = comp[idx(c)];
        }
        let changed = comp.iter().zip(&state.last_sent).filter(|(c, s)| c != s).count();
        ctx.ensure(output, changed)?;
        for (x, (&c, s)) in comp.iter().zip(state.last_sent.iter_mut()).enumerate() {
            if c != *s {
                *s = c;
                output.push(vid(x));
            }
        }
        Ok(())
    }

    fn gather(&self, state: &CcState, v: VertexId, _vertex_out: &mut [VertexId], value_out: &mut [VertexId]) {
        value_out[0] = state.comp[idx(v)];
    }

    fn combine(&self, state: &mut CcState, v: VertexId, _vertex_in: &[VertexId], value_in: &[VertexId]) -> bool {
        hook(&mut state.comp, v, value_in[0])
    }

    fn finish(&self, plan: &PartitionPlan, states: Vec<CcState>) -> CcOutput {
        CcOutput {
            labels: gather_hosted(plan, &states, |s, l| find(&s.comp, l)),
        }
    }
}

pub fn cc(plan: &PartitionPlan, config: &EngineConfig) -> Result<(CcOutput, RunStats), EngineError> {
    run_primitive(&Cc, plan, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hook_keeps_smaller_root() {
        let mut comp: Vec<VertexId> = (0..5).collect();
        assert!(hook(&mut comp, 4, 2));
        assert_eq!(comp[4], 2);
        assert!(hook(&mut comp, 4, 1));
        assert_eq!(find(&comp, 4), 1);
        assert!(!hook(&mut comp, 2, 1));
    }
}
