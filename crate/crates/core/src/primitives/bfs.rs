//! Level-synchronous BFS: advance from the frontier, keep each unvisited
//! destination once, and min-combine labels that arrive from peers.

use std::cell::Cell;

use super::{check_source, UNVISITED};
use crate::engine::{
    gather_hosted, run_primitive, Communication, EngineConfig, EngineError, IterationCtx, PartitionView, Primitive,
    RunStats,
};
use crate::frontier::Frontier;
use crate::partition::{Duplication, PartitionPlan};
use crate::{idx, VertexId, INVALID_VERTEX};

#[derive(Clone, Debug)]
pub struct Bfs {
    pub source: VertexId,
    pub mark_preds: bool,
    pub communication: Communication,
}

impl Bfs {
    pub fn new(source: VertexId) -> Self {
        Bfs {
            source,
            mark_preds: false,
            communication: Communication::Selective,
        }
    }

    pub fn with_preds(mut self) -> Self {
        self.mark_preds = true;
        self
    }

    pub fn broadcast(mut self) -> Self {
        self.communication = Communication::Broadcast;
        self
    }
}

#[derive(Debug)]
pub struct BfsState {
    /// Hop count per local vertex; [`UNVISITED`] when not reached.
    pub labels: Vec<u32>,
    /// Predecessor global ID per local vertex, when requested.
    pub preds: Option<Vec<VertexId>>,
    sent: Vec<bool>,
    level: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BfsOutput {
    pub labels: Vec<u32>,
    pub preds: Option<Vec<VertexId>>,
}

impl BfsOutput {
    pub fn max_label(&self) -> Option<u32> {
        self.labels.iter().copied().filter(|&l| l != UNVISITED).max()
    }
}

impl Primitive for Bfs {
    type State = BfsState;
    type Value = ();
    type Report = ();
    type Output = BfsOutput;

    fn name(&self) -> &'static str {
        "bfs"
    }

    fn num_vertex_associates(&self) -> usize {
        usize::from(self.mark_preds)
    }

    fn supports(&self, dup: Duplication) -> bool {
        dup == Duplication::DuplicateAll || self.communication == Communication::Selective
    }

    fn communication(&self, _state: &BfsState) -> Communication {
        self.communication
    }

    fn init(&self, part: &PartitionView<'_>) -> Result<BfsState, EngineError> {
        check_source(part.plan, self.source)?;
        let nv = part.num_local_vertices();
        let mut st = BfsState {
            labels: vec![UNVISITED; nv],
            preds: self.mark_preds.then(|| vec![INVALID_VERTEX; nv]),
            sent: vec![false; nv],
            level: 0,
        };
        // Under broadcast every worker learns every label, the source's included.
        let src = part.to_local(self.source);
        if let Some(s) = src {
            if part.is_hosted(s) || self.communication == Communication::Broadcast {
                st.labels[idx(s)] = 0;
            }
        }
        Ok(st)
    }

    fn initial_frontier(&self, part: &PartitionView<'_>, _state: &mut BfsState) -> Vec<VertexId> {
        match part.to_local(self.source) {
            Some(s) if part.is_hosted(s) => vec![s],
            _ => Vec::new(),
        }
    }

    fn iterate(
        &self,
        ctx: &mut IterationCtx<'_, ()>,
        state: &mut BfsState,
        input: &Frontier,
        output: &mut Frontier,
    ) -> Result<(), EngineError> {
        state.level = ctx.superstep as u32;
        let next = state.level + 1;
        let part = ctx.part;
        let labels = Cell::from_mut(state.labels.as_mut_slice()).as_slice_of_cells();
        let preds = state.preds.as_deref_mut();
        let preds = preds.map(|p| Cell::from_mut(p).as_slice_of_cells());
        ctx.advance_filter(
            input.as_slice(),
            output,
            true,
            |u, v, _| {
                if labels[idx(v)].get() != UNVISITED {
                    return false;
                }
                if let Some(p) = preds {
                    if p[idx(v)].get() == INVALID_VERTEX {
                        p[idx(v)].set(part.to_global(u));
                    }
                }
                true
            },
            |v| {
                let l = &labels[idx(v)];
                if l.get() == UNVISITED {
                    l.set(next);
                    true
                } else {
                    false
                }
            },
        )
    }

    fn presend(&self, state: &mut BfsState, _peer: usize, v: VertexId) -> bool {
        if self.communication == Communication::Broadcast {
            return true;
        }
        !std::mem::replace(&mut state.sent[idx(v)], true)
    }

    fn gather(&self, state: &BfsState, v: VertexId, vertex_out: &mut [VertexId], _value_out: &mut [()]) {
        if let (Some(p), Some(slot)) = (&state.preds, vertex_out.first_mut()) {
            *slot = p[idx(v)];
        }
    }

    fn combine(&self, state: &mut BfsState, v: VertexId, vertex_in: &[VertexId], _value_in: &[()]) -> bool {
        let label = state.level + 1;
        if state.labels[idx(v)] <= label {
            return false;
        }
        state.labels[idx(v)] = label;
        if let (Some(p), Some(&pred)) = (state.preds.as_mut(), vertex_in.first()) {
            p[idx(v)] = pred;
        }
        true
    }

    fn finish(&self, plan: &PartitionPlan, states: Vec<BfsState>) -> BfsOutput {
        BfsOutput {
            labels: gather_hosted(plan, &states, |s, l| s.labels[idx(l)]),
            preds: self
                .mark_preds
                .then(|| gather_hosted(plan, &states, |s, l| s.preds.as_ref().expect("preds kept")[idx(l)])),
        }
    }
}

/// Runs BFS from `source` with selective communication.
pub fn bfs(
    plan: &PartitionPlan,
    source: VertexId,
    mark_preds: bool,
    config: &EngineConfig,
) -> Result<(BfsOutput, RunStats), EngineError> {
    let mut p = Bfs::new(source);
    p.mark_preds = mark_preds;
    run_primitive(&p, plan, config)
}
