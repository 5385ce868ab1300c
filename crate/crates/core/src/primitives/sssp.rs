//! Frontier Bellman-Ford: relax out-edges of vertices whose distance
//! improved, re-inserting every vertex that improves again.

use super::{check_source, UNREACHED};
use crate::engine::{
    gather_hosted, run_primitive, Communication, EngineConfig, EngineError, IterationCtx, PartitionView, Primitive,
    RunStats, StampSet,
};
use crate::frontier::Frontier;
use crate::partition::{Duplication, PartitionPlan};
use crate::{idx, VertexId, INVALID_VERTEX};

#[derive(Clone, Debug)]
pub struct Sssp {
    pub source: VertexId,
    pub mark_preds: bool,
}

#[derive(Debug)]
pub struct SsspState {
    pub dist: Vec<u64>,
    pub preds: Option<Vec<VertexId>>,
    /// Best distance already sent for each proxy.
    sent: Vec<u64>,
    queued: StampSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SsspOutput {
    pub dist: Vec<u64>,
    pub preds: Option<Vec<VertexId>>,
}

impl Primitive for Sssp {
    type State = SsspState;
    type Value = u64;
    type Report = ();
    type Output = SsspOutput;

    fn name(&self) -> &'static str {
        "sssp"
    }

    fn num_vertex_associates(&self) -> usize {
        usize::from(self.mark_preds)
    }

    fn num_value_associates(&self) -> usize {
        1
    }

    fn supports(&self, _dup: Duplication) -> bool {
        true
    }

    fn communication(&self, _state: &SsspState) -> Communication {
        Communication::Selective
    }

    fn init(&self, part: &PartitionView<'_>) -> Result<SsspState, EngineError> {
        check_source(part.plan, self.source)?;
        if !part.graph.is_weighted() {
            return Err(EngineError::MissingWeights);
        }
        let nv = part.num_local_vertices();
        let mut dist = vec![UNREACHED; nv];
        if let Some(s) = part.to_local(self.source).filter(|&s| part.is_hosted(s)) {
            dist[idx(s)] = 0;
        }
        Ok(SsspState {
            dist,
            preds: self.mark_preds.then(|| vec![INVALID_VERTEX; nv]),
            sent: vec![UNREACHED; nv],
            queued: StampSet::new(nv),
        })
    }

    fn initial_frontier(&self, part: &PartitionView<'_>, _state: &mut SsspState) -> Vec<VertexId> {
        match part.to_local(self.source) {
            Some(s) if part.is_hosted(s) => vec![s],
            _ => Vec::new(),
        }
    }

    fn iterate(
        &self,
        ctx: &mut IterationCtx<'_, ()>,
        state: &mut SsspState,
        input: &Frontier,
        output: &mut Frontier,
    ) -> Result<(), EngineError> {
        let g = ctx.graph();
        let part = ctx.part;
        let dist = &mut state.dist;
        let mut preds = state.preds.as_deref_mut();
        let queued = &mut state.queued;
        queued.next_epoch();
        ctx.advance_filter(
            input.as_slice(),
            output,
            true,
            |u, v, e| {
                let nd = dist[idx(u)].saturating_add(g.weight(e) as u64);
                if nd < dist[idx(v)] {
                    dist[idx(v)] = nd;
                    if let Some(p) = preds.as_deref_mut() {
                        p[idx(v)] = part.to_global(u);
                    }
                    true
                } else {
                    false
                }
            },
            |v| queued.insert(v),
        )
    }

    fn presend(&self, state: &mut SsspState, _peer: usize, v: VertexId) -> bool {
        let d = state.dist[idx(v)];
        if d < state.sent[idx(v)] {
            state.sent[idx(v)] = d;
            true
        } else {
            false
        }
    }

    fn gather(&self, state: &SsspState, v: VertexId, vertex_out: &mut [VertexId], value_out: &mut [u64]) {
        value_out[0] = state.dist[idx(v)];
        if let (Some(p), Some(slot)) = (&state.preds, vertex_out.first_mut()) {
            *slot = p[idx(v)];
        }
    }

    fn combine(&self, state: &mut SsspState, v: VertexId, vertex_in: &[VertexId], value_in: &[u64]) -> bool {
        let d = value_in[0];
        if d >= state.dist[idx(v)] {
            return false;
        }
        state.dist[idx(v)] = d;
        if let (Some(p), Some(&pred)) = (state.preds.as_mut(), vertex_in.first()) {
            p[idx(v)] = pred;
        }
        true
    }

    fn finish(&self, plan: &PartitionPlan, states: Vec<SsspState>) -> SsspOutput {
        SsspOutput {
            dist: gather_hosted(plan, &states, |s, l| s.dist[idx(l)]),
            preds: self
                .mark_preds
                .then(|| gather_hosted(plan, &states, |s, l| s.preds.as_ref().expect("preds kept")[idx(l)])),
        }
    }
}

pub fn sssp(plan: &PartitionPlan, source: VertexId, config: &EngineConfig) -> Result<(SsspOutput, RunStats), EngineError> {
    run_primitive(
        &Sssp {
            source,
            mark_preds: false,
        },
        plan,
        config,
    )
}
