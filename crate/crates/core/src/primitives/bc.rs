//! Single-source betweenness centrality.
//!
//! Phases, one or more supersteps each:
//! - forward: BFS that also counts shortest paths (`sigma`), selective;
//! - sync: hosts broadcast `(label, sigma)` of every reached vertex so each
//!   worker can evaluate successors it does not host;
//! - backward: one superstep per level from the deepest non-leaf level up to
//!   the source; hosts compute `delta` for their vertices at that level and
//!   broadcast it.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use super::{check_source, UNVISITED};
use crate::engine::{
    gather_hosted, run_primitive, Communication, EngineConfig, EngineError, GlobalView, IterationCtx, PartitionView,
    Primitive, Reduce, RunStats,
};
use crate::frontier::Frontier;
use crate::partition::{Duplication, PartitionPlan};
use crate::{idx, VertexId};

#[derive(Clone, Debug)]
pub struct Bc {
    pub source: VertexId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BcPhase {
    Forward,
    Sync,
    /// Computing dependencies of the given level.
    Backward(u32),
    Done,
}

#[derive(Debug)]
pub struct BcState {
    pub labels: Vec<u32>,
    pub sigma: Vec<f64>,
    pub delta: Vec<f64>,
    pub phase: BcPhase,
    max_label: u32,
    sent: Vec<bool>,
    level: u32,
}

#[derive(Clone, Debug, Default)]
pub struct BcReport {
    pub max_label: u32,
    pub done: bool,
}

impl Reduce for BcReport {
    fn combine(&mut self, other: &Self) {
        self.max_label = self.max_label.max(other.max_label);
        self.done |= other.done;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BcOutput {
    /// Dependency of every vertex on the source; zero at the source.
    pub bc: Vec<f64>,
    pub sigma: Vec<f64>,
    pub labels: Vec<u32>,
}

impl Bc {
    fn hosted_max_label(part: &PartitionView<'_>, st: &BcState) -> u32 {
        part.hosted()
            .iter()
            .map(|&v| st.labels[idx(v)])
            .filter(|&l| l != UNVISITED)
            .max()
            .unwrap_or(0)
    }
}

impl Primitive for Bc {
    type State = BcState;
    type Value = f64;
    type Report = BcReport;
    type Output = BcOutput;

    fn name(&self) -> &'static str {
        "bc"
    }

    fn num_value_associates(&self) -> usize {
        2
    }

    fn supports(&self, dup: Duplication) -> bool {
        dup == Duplication::DuplicateAll
    }

    fn communication(&self, state: &BcState) -> Communication {
        match state.phase {
            BcPhase::Forward => Communication::Selective,
            _ => Communication::Broadcast,
        }
    }

    fn init(&self, part: &PartitionView<'_>) -> Result<BcState, EngineError> {
        check_source(part.plan, self.source)?;
        let nv = part.num_local_vertices();
        let mut st = BcState {
            labels: vec![UNVISITED; nv],
            sigma: vec![0.0; nv],
            delta: vec![0.0; nv],
            phase: BcPhase::Forward,
            max_label: 0,
            sent: vec![false; nv],
            level: 0,
        };
        if part.is_hosted(self.source) {
            st.labels[idx(self.source)] = 0;
            st.sigma[idx(self.source)] = 1.0;
        }
        Ok(st)
    }

    fn initial_frontier(&self, part: &PartitionView<'_>, _state: &mut BcState) -> Vec<VertexId> {
        if part.is_hosted(self.source) {
            vec![self.source]
        } else {
            Vec::new()
        }
    }

    fn iterate(
        &self,
        ctx: &mut IterationCtx<'_, BcReport>,
        state: &mut BcState,
        input: &Frontier,
        output: &mut Frontier,
    ) -> Result<(), EngineError> {
        // Phase changes are decided from the previous barrier, identically on every worker.
        state.phase = match state.phase {
            BcPhase::Forward if ctx.view.all_frontiers_empty() => {
                state.max_label = ctx.view.post.max_label;
                BcPhase::Sync
            }
            BcPhase::Sync if state.max_label == 0 => BcPhase::Done,
            BcPhase::Sync => BcPhase::Backward(state.max_label - 1),
            BcPhase::Backward(0) => BcPhase::Done,
            BcPhase::Backward(l) => BcPhase::Backward(l - 1),
            p => p,
        };
        let g = ctx.graph();
        match state.phase {
            BcPhase::Forward => {
                state.level = ctx.superstep as u32;
                let next = state.level + 1;
                let labels = Cell::from_mut(state.labels.as_mut_slice()).as_slice_of_cells();
                let sigma = Cell::from_mut(state.sigma.as_mut_slice()).as_slice_of_cells();
                ctx.advance_filter(
                    input.as_slice(),
                    output,
                    true,
                    |u, v, _| {
                        let l = labels[idx(v)].get();
                        if l == UNVISITED || l == next {
                            sigma[idx(v)].set(sigma[idx(v)].get() + sigma[idx(u)].get());
                            true
                        } else {
                            false
                        }
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
                )?;
            }
            BcPhase::Sync => {
                let reached: Vec<VertexId> = ctx
                    .part
                    .hosted()
                    .iter()
                    .copied()
                    .filter(|&v| state.labels[idx(v)] != UNVISITED)
                    .collect();
                ctx.ensure(output, reached.len())?;
                output.extend_from_slice(&reached);
            }
            BcPhase::Backward(level) => {
                let mut edges = 0u64;
                let mut computed = Vec::new();
                for &v in ctx.part.hosted() {
                    if state.labels[idx(v)] != level {
                        continue;
                    }
                    let mut d = 0.0;
                    for &w in g.neighbors(v) {
                        edges += 1;
                        if state.labels[idx(w)] == level + 1 {
                            d += state.sigma[idx(v)] / state.sigma[idx(w)] * (1.0 + state.delta[idx(w)]);
                        }
                    }
                    state.delta[idx(v)] = d;
                    computed.push(v);
                }
                ctx.add_edges_examined(edges);
                ctx.ensure(output, computed.len())?;
                output.extend_from_slice(&computed);
            }
            BcPhase::Done => {}
        }
        Ok(())
    }

    fn presend(&self, state: &mut BcState, _peer: usize, v: VertexId) -> bool {
        match state.phase {
            BcPhase::Forward => !std::mem::replace(&mut state.sent[idx(v)], true),
            _ => true,
        }
    }

    fn gather(&self, state: &BcState, v: VertexId, _vertex_out: &mut [VertexId], value_out: &mut [f64]) {
        match state.phase {
            BcPhase::Forward => {
                value_out[0] = state.sigma[idx(v)];
                value_out[1] = 0.0;
            }
            BcPhase::Sync => {
                value_out[0] = state.sigma[idx(v)];
                value_out[1] = state.labels[idx(v)] as f64;
            }
            _ => {
                value_out[0] = state.delta[idx(v)];
                value_out[1] = 0.0;
            }
        }
    }

    fn combine(&self, state: &mut BcState, v: VertexId, _vertex_in: &[VertexId], value_in: &[f64]) -> bool {
        let i = idx(v);
        match state.phase {
            BcPhase::Forward => {
                let label = state.level + 1;
                if state.labels[i] == UNVISITED {
                    state.labels[i] = label;
                    state.sigma[i] = value_in[0];
                    true
                } else if state.labels[i] == label {
                    state.sigma[i] += value_in[0];
                    true
                } else {
                    false
                }
            }
            BcPhase::Sync => {
                state.sigma[i] = value_in[0];
                state.labels[i] = value_in[1] as u32;
                false
            }
            _ => {
                state.delta[i] = value_in[0];
                false
            }
        }
    }

    fn after_merge(&self, part: &PartitionView<'_>, state: &mut BcState, _pre: &BcReport) -> BcReport {
        let done = match state.phase {
            BcPhase::Sync => state.max_label == 0,
            BcPhase::Backward(l) => l == 0,
            BcPhase::Done => true,
            BcPhase::Forward => false,
        };
        BcReport {
            max_label: Self::hosted_max_label(part, state),
            done,
        }
    }

    fn converged(&self, view: &GlobalView<BcReport>) -> bool {
        view.post.done
    }

    fn finish(&self, plan: &PartitionPlan, states: Vec<BcState>) -> BcOutput {
        let source = self.source;
        BcOutput {
            bc: gather_hosted(plan, &states, |s, l| s.delta[idx(l)])
                .into_iter()
                .enumerate()
                .map(|(v, d)| if v == idx(source) { 0.0 } else { d })
                .collect(),
            sigma: gather_hosted(plan, &states, |s, l| s.sigma[idx(l)]),
            labels: gather_hosted(plan, &states, |s, l| s.labels[idx(l)]),
        }
    }
}

pub fn bc(plan: &PartitionPlan, source: VertexId, config: &EngineConfig) -> Result<(BcOutput, RunStats), EngineError> {
    run_primitive(&Bc { source }, plan, config)
}
