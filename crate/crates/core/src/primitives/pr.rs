//! PageRank by push-style power iteration.
//!
//! Every superstep a worker pushes `rank/outdeg` of each hosted vertex along
//! its out-edges, sends the partial sums accumulated on proxies to their
//! hosts (a fixed remote sub-frontier), and after the merge applies the
//! update with the dangling mass spread uniformly.

use crate::engine::{
    gather_hosted, run_primitive, Communication, EngineConfig, EngineError, GlobalView, IterationCtx, PartitionView,
    Primitive, Reduce, RunStats,
};
use crate::frontier::Frontier;
use crate::partition::{Duplication, PartitionPlan};
use crate::{idx, VertexId};

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_MAX_ITER: usize = 1000;

#[derive(Clone, Debug)]
pub struct PageRank {
    pub damping: f64,
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for PageRank {
    fn default() -> Self {
        PageRank {
            damping: DEFAULT_DAMPING,
            epsilon: DEFAULT_EPSILON,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug)]
pub struct PrState {
    pub rank: Vec<f64>,
    acc: Vec<f64>,
    remote: Vec<VertexId>,
    dangling: f64,
    /// Global rank sum after each completed iteration, as seen at the next barrier.
    rank_sums: Vec<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct PrReport {
    pub dangling: f64,
    pub max_delta: f64,
    pub rank_sum: f64,
}

impl Reduce for PrReport {
    fn combine(&mut self, other: &Self) {
        self.dangling += other.dangling;
        self.max_delta = self.max_delta.max(other.max_delta);
        self.rank_sum += other.rank_sum;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrOutput {
    pub ranks: Vec<f64>,
    /// Sum of all ranks after each iteration.
    pub rank_sums: Vec<f64>,
}

impl PageRank {
    fn validate(&self) -> Result<(), EngineError> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(EngineError::InvalidParameter(format!(
                "damping must be in (0, 1), got {}",
                self.damping
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(EngineError::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iter == 0 {
            return Err(EngineError::InvalidParameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

impl Primitive for PageRank {
    type State = PrState;
    type Value = f64;
    type Report = PrReport;
    type Output = PrOutput;

    fn name(&self) -> &'static str {
        "pr"
    }

    fn num_value_associates(&self) -> usize {
        1
    }

    fn supports(&self, _dup: Duplication) -> bool {
        true
    }

    fn communication(&self, _state: &PrState) -> Communication {
        Communication::Selective
    }

    fn init(&self, part: &PartitionView<'_>) -> Result<PrState, EngineError> {
        self.validate()?;
        let nv = part.num_local_vertices();
        let g = part.graph;
        let mut remote: Vec<VertexId> = part
            .hosted()
            .iter()
            .flat_map(|&u| g.neighbors(u).iter().copied())
            .filter(|&v| !part.is_hosted(v))
            .collect();
        remote.sort_unstable();
        remote.dedup();
        let start = 1.0 / part.total_vertices().max(1) as f64;
        let mut rank = vec![0.0; nv];
        for &v in part.hosted() {
            rank[idx(v)] = start;
        }
        Ok(PrState {
            rank,
            acc: vec![0.0; nv],
            remote,
            dangling: 0.0,
            rank_sums: Vec::new(),
        })
    }

    fn initial_frontier(&self, _part: &PartitionView<'_>, _state: &mut PrState) -> Vec<VertexId> {
        Vec::new()
    }

    fn iterate(
        &self,
        ctx: &mut IterationCtx<'_, PrReport>,
        state: &mut PrState,
        _input: &Frontier,
        output: &mut Frontier,
    ) -> Result<(), EngineError> {
        if ctx.superstep > 0 {
            state.rank_sums.push(ctx.view.post.rank_sum);
        }
        let g = ctx.graph();
        state.acc.iter_mut().for_each(|a| *a = 0.0);
        let mut dangling = 0.0;
        let mut edges = 0u64;
        for &u in ctx.part.hosted() {
            let deg = g.degree(u);
            let r = state.rank[idx(u)];
            if deg == 0 {
                dangling += r;
                continue;
            }
            let share = r / deg as f64;
            for &v in g.neighbors(u) {
                state.acc[idx(v)] += share;
            }
            edges += deg as u64;
        }
        ctx.add_edges_examined(edges);
        state.dangling = dangling;
        ctx.ensure(output, state.remote.len())?;
        output.extend_from_slice(&state.remote);
        Ok(())
    }

    fn gather(&self, state: &PrState, v: VertexId, _vertex_out: &mut [VertexId], value_out: &mut [f64]) {
        value_out[0] = state.acc[idx(v)];
    }

    fn combine(&self, state: &mut PrState, v: VertexId, _vertex_in: &[VertexId], value_in: &[f64]) -> bool {
        state.acc[idx(v)] += value_in[0];
        false
    }

    fn pre_report(&self, state: &PrState) -> PrReport {
        PrReport {
            dangling: state.dangling,
            ..Default::default()
        }
    }

    fn after_merge(&self, part: &PartitionView<'_>, state: &mut PrState, pre: &PrReport) -> PrReport {
        let n = part.total_vertices() as f64;
        let d = self.damping;
        let mut report = PrReport::default();
        for &v in part.hosted() {
            let old = state.rank[idx(v)];
            let new = (1.0 - d) / n + d * (state.acc[idx(v)] + pre.dangling / n);
            report.max_delta = report.max_delta.max((new - old).abs() / old);
            report.rank_sum += new;
            state.rank[idx(v)] = new;
        }
        report
    }

    fn converged(&self, view: &GlobalView<PrReport>) -> bool {
        view.superstep >= self.max_iter || view.post.max_delta < self.epsilon
    }

    fn finish(&self, plan: &PartitionPlan, states: Vec<PrState>) -> PrOutput {
        let ranks = gather_hosted(plan, &states, |s, l| s.rank[idx(l)]);
        let mut rank_sums = states.first().map(|s| s.rank_sums.clone()).unwrap_or_default();
        rank_sums.push(ranks.iter().sum());
        PrOutput { ranks, rank_sums }
    }
}

pub fn pagerank(
    plan: &PartitionPlan,
    damping: f64,
    epsilon: f64,
    max_iter: usize,
    config: &EngineConfig,
) -> Result<(PrOutput, RunStats), EngineError> {
    run_primitive(
        &PageRank {
            damping,
            epsilon,
            max_iter,
        },
        plan,
        config,
    )
}
