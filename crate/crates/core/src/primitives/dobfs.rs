//! Direction-optimizing BFS over duplicate-all partitions with broadcast.
//!
//! Every worker sees every label, so each superstep's frontier is the set of
//! vertices labelled with the current level. Forward steps expand hosted
//! frontier vertices; backward steps scan hosted unvisited vertices and stop
//! at the first neighbor in the frontier.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use super::{check_source, UNVISITED};
use crate::engine::{
    gather_hosted, run_primitive, Communication, EngineConfig, EngineError, IterationCtx, PartitionView, Primitive,
    RunStats,
};
use crate::frontier::Frontier;
use crate::partition::{Duplication, PartitionPlan};
use crate::{idx, VertexId};

pub const DEFAULT_DO_A: f64 = 0.01;
pub const DEFAULT_DO_B: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// Inputs of one direction decision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectionState {
    pub current: Direction,
    pub q_size: usize,
    pub u_size: usize,
    pub p_size: usize,
    /// Forward edge estimate `|Q|·|E_i|/|V_i|`.
    pub fv: f64,
    /// Backward edge estimate `|U|·|V_i|/|P|`.
    pub bv: f64,
    pub do_a: f64,
    pub do_b: f64,
    pub switched_to_backward_once: bool,
}

impl DirectionState {
    /// Fills both estimates for a partition with `|V_i| = num_vertices` and
    /// `|E_i| = num_edges`.
    #[allow(clippy::too_many_arguments)]
    pub fn estimate(
        current: Direction,
        q_size: usize,
        u_size: usize,
        p_size: usize,
        num_vertices: usize,
        num_edges: usize,
        do_a: f64,
        do_b: f64,
        switched_to_backward_once: bool,
    ) -> Self {
        let nv = num_vertices.max(1) as f64;
        let fv = q_size as f64 * num_edges as f64 / nv;
        let bv = if p_size == 0 {
            f64::INFINITY
        } else {
            u_size as f64 * num_vertices as f64 / p_size as f64
        };
        DirectionState {
            current,
            q_size,
            u_size,
            p_size,
            fv,
            bv,
            do_a,
            do_b,
            switched_to_backward_once,
        }
    }
}

/// Forward switches to backward when `FV > BV·do_a` (once per run); backward
/// returns to forward when `FV < BV·do_b`.
pub fn direction_decide(s: &DirectionState) -> Direction {
    match s.current {
        Direction::Forward if !s.switched_to_backward_once && s.fv > s.bv * s.do_a => Direction::Backward,
        Direction::Forward => Direction::Forward,
        Direction::Backward if s.fv < s.bv * s.do_b => Direction::Forward,
        Direction::Backward => Direction::Backward,
    }
}

#[derive(Clone, Debug)]
pub struct Dobfs {
    pub source: VertexId,
    pub do_a: f64,
    pub do_b: f64,
}

impl Dobfs {
    pub fn new(source: VertexId) -> Self {
        Dobfs {
            source,
            do_a: DEFAULT_DO_A,
            do_b: DEFAULT_DO_B,
        }
    }
}

#[derive(Debug)]
pub struct DobfsState {
    pub labels: Vec<u32>,
    pub direction: Direction,
    pub switched_to_backward_once: bool,
    /// Direction used by each superstep.
    pub directions: Vec<Direction>,
    unvisited: Vec<VertexId>,
    visited: usize,
    level: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DobfsOutput {
    pub labels: Vec<u32>,
    pub directions: Vec<Direction>,
}

impl Dobfs {
    /// Global forward estimate: the per-partition `FV` summed over workers.
    /// With one partition this is exactly `|Q|·|E|/|V|`; summing keeps every
    /// worker on the same direction, which forward and backward steps need
    /// (forward from one worker and backward on another would miss vertices).
    fn decide(&self, ctx: &IterationCtx<'_, ()>, state: &DobfsState) -> DirectionState {
        let plan = ctx.part.plan;
        let total = ctx.part.total_vertices();
        let mut fv = 0.0;
        for (j, &q) in ctx.view.frontier_lengths.iter().enumerate() {
            let g = plan.subgraph(j);
            fv += q as f64 * g.num_edges() as f64 / g.num_vertices().max(1) as f64;
        }
        let q_size = ctx.view.frontier_lengths[ctx.part.id];
        let mut ds = DirectionState::estimate(
            state.direction,
            q_size,
            total - state.visited,
            state.visited,
            ctx.part.num_local_vertices(),
            ctx.part.num_local_edges(),
            self.do_a,
            self.do_b,
            state.switched_to_backward_once,
        );
        ds.fv = fv;
        ds
    }
}

impl Primitive for Dobfs {
    type State = DobfsState;
    type Value = ();
    type Report = ();
    type Output = DobfsOutput;

    fn name(&self) -> &'static str {
        "dobfs"
    }

    fn supports(&self, dup: Duplication) -> bool {
        dup == Duplication::DuplicateAll
    }

    fn communication(&self, _state: &DobfsState) -> Communication {
        Communication::Broadcast
    }

    fn init(&self, part: &PartitionView<'_>) -> Result<DobfsState, EngineError> {
        check_source(part.plan, self.source)?;
        if !(self.do_a > 0.0 && self.do_b > 0.0) {
            return Err(EngineError::InvalidParameter("do_a and do_b must be positive".into()));
        }
        let mut labels = vec![UNVISITED; part.num_local_vertices()];
        labels[idx(self.source)] = 0;
        let unvisited = part.hosted().iter().copied().filter(|&v| v != self.source).collect();
        Ok(DobfsState {
            labels,
            direction: Direction::Forward,
            switched_to_backward_once: false,
            directions: Vec::new(),
            unvisited,
            visited: 1,
            level: 0,
        })
    }

    fn initial_frontier(&self, part: &PartitionView<'_>, _state: &mut DobfsState) -> Vec<VertexId> {
        if part.is_hosted(self.source) {
            vec![self.source]
        } else {
            Vec::new()
        }
    }

    fn iterate(
        &self,
        ctx: &mut IterationCtx<'_, ()>,
        state: &mut DobfsState,
        input: &Frontier,
        output: &mut Frontier,
    ) -> Result<(), EngineError> {
        state.level = ctx.superstep as u32;
        if ctx.superstep >= 1 {
            let next = direction_decide(&self.decide(ctx, state));
            if state.direction == Direction::Forward && next == Direction::Backward {
                state.switched_to_backward_once = true;
            }
            state.direction = next;
        }
        state.directions.push(state.direction);
        let level = state.level;
        let next = level + 1;

        match state.direction {
            Direction::Forward => {
                let labels = Cell::from_mut(state.labels.as_mut_slice()).as_slice_of_cells();
                let mut found = 0;
                ctx.advance_filter(
                    input.as_slice(),
                    output,
                    true,
                    |_, v, _| labels[idx(v)].get() == UNVISITED,
                    |v| {
                        let l = &labels[idx(v)];
                        if l.get() == UNVISITED {
                            l.set(next);
                            found += 1;
                            true
                        } else {
                            false
                        }
                    },
                )?;
                state.visited += found;
            }
            Direction::Backward => {
                let g = ctx.graph();
                let labels = &mut state.labels;
                state.unvisited.retain(|&v| labels[idx(v)] == UNVISITED);
                let mut scanned = 0u64;
                let mut discovered = Vec::new();
                for &v in &state.unvisited {
                    for &u in g.neighbors(v) {
                        scanned += 1;
                        if labels[idx(u)] == level {
                            discovered.push(v);
                            break;
                        }
                    }
                }
                ctx.add_edges_examined(scanned);
                ctx.ensure(output, discovered.len())?;
                output.clear();
                for &v in &discovered {
                    labels[idx(v)] = next;
                    output.push(v);
                }
                state.visited += discovered.len();
            }
        }
        Ok(())
    }

    fn combine(&self, state: &mut DobfsState, v: VertexId, _vertex_in: &[VertexId], _value_in: &[()]) -> bool {
        let label = state.level + 1;
        if state.labels[idx(v)] <= label {
            return false;
        }
        state.labels[idx(v)] = label;
        state.visited += 1;
        true
    }

    fn finish(&self, plan: &PartitionPlan, states: Vec<DobfsState>) -> DobfsOutput {
        DobfsOutput {
            labels: gather_hosted(plan, &states, |s, l| s.labels[idx(l)]),
            directions: states.first().map(|s| s.directions.clone()).unwrap_or_default(),
        }
    }
}

pub fn dobfs(
    plan: &PartitionPlan,
    source: VertexId,
    do_a: f64,
    do_b: f64,
    config: &EngineConfig,
) -> Result<(DobfsOutput, RunStats), EngineError> {
    run_primitive(&Dobfs { source, do_a, do_b }, plan, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(current: Direction, fv: f64, bv: f64, flag: bool) -> DirectionState {
        DirectionState {
            current,
            q_size: 0,
            u_size: 0,
            p_size: 1,
            fv,
            bv,
            do_a: DEFAULT_DO_A,
            do_b: DEFAULT_DO_B,
            switched_to_backward_once: flag,
        }
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(direction_decide(&st(Direction::Forward, 1000.0, 5000.0, false)), Direction::Backward);
        assert_eq!(direction_decide(&st(Direction::Backward, 100.0, 5000.0, true)), Direction::Forward);
        assert_eq!(direction_decide(&st(Direction::Forward, 1e9, 1.0, true)), Direction::Forward);
    }

    #[test]
    fn estimates() {
        let s = DirectionState::estimate(Direction::Forward, 10, 60, 40, 100, 1600, 0.01, 0.1, false);
        assert_eq!(s.fv, 160.0);
        assert_eq!(s.bv, 150.0);
    }
}
