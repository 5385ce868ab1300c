//! The superstep engine.
//!
//! A primitive supplies its per-partition iteration body, the per-vertex data
//! that travels with remote vertices, how received data is combined with
//! local state, and when to stop ([`Primitive`]). The engine does the rest:
//! every superstep each worker runs the body, the output frontier is split
//! into a local part and one remote sub-frontier per peer, remote parts are
//! packaged with their associated values and converted to the peer's local
//! IDs, packages are exchanged at a barrier, and received vertices are
//! combined into local state and (when accepted) queued for the next
//! superstep.
//!
//! Superstep order is `body -> split -> package -> exchange -> merge ->
//! convergence check`. Merging at the end of superstep `t` is the same
//! computation as merging at the start of `t + 1`; checking convergence after
//! the merge means traffic that every receiver rejects does not cost an
//! extra superstep.

mod comm;
mod operators;
mod run;
mod stats;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontier::{AllocationPolicy, CapacityError, Frontier, InvalidVertex, MemoryPool};
use crate::graph::Csr;
use crate::partition::{Duplication, PartitionPlan};
use crate::{idx, VertexId};

pub use comm::{exchange, merge_received, package_remote, split_frontier, MessagePackage, SplitFrontier};
pub use operators::{advance, advance_filter_fused, filter};
pub use run::run_primitive;
pub use stats::{BufferStats, IterationStats, RunReport, RunStats};

pub use crate::par::parallel_available;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    InvalidVertex(#[from] InvalidVertex),
    #[error("global vertex {global} has no local ID on partition {dest}")]
    ConversionMiss { global: u64, dest: usize },
    #[error("{primitive} does not support {duplication} duplication")]
    UnsupportedDuplication {
        primitive: &'static str,
        duplication: Duplication,
    },
    #[error("{primitive} does not support {communication} communication")]
    UnsupportedCommunication {
        primitive: &'static str,
        communication: Communication,
    },
    #[error("no convergence within {0} supersteps")]
    SuperstepLimit(usize),
    #[error("source {vertex} out of range for {num_vertices} vertices")]
    SourceOutOfRange { vertex: u64, num_vertices: usize },
    #[error("graph has no edge weights")]
    MissingWeights,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Where remote frontier vertices are sent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Communication {
    /// Each vertex goes only to the partition that hosts it.
    Selective,
    /// The whole output frontier goes to every peer.
    Broadcast,
}

impl fmt::Display for Communication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Communication::Selective => "selective",
            Communication::Broadcast => "broadcast",
        })
    }
}

impl FromStr for Communication {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "selective" => Ok(Communication::Selective),
            "broadcast" => Ok(Communication::Broadcast),
            other => Err(format!("unknown communication `{other}` (expected selective or broadcast)")),
        }
    }
}

/// How the workers of one superstep phase are scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    /// One rayon task per worker (sequential when built without `parallel`).
    #[default]
    Parallel,
    /// Workers run one after another on the calling thread.
    Sequential,
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub execution: Execution,
    pub policy: AllocationPolicy,
    /// Per-worker cap on frontier memory, in bytes.
    pub memory_cap: Option<usize>,
    pub max_supersteps: usize,
    /// Every packaged record is sent this many times (communication-volume
    /// inflation experiments). Only meaningful for idempotent combiners.
    pub inflate: usize,
    /// Drop the first nonempty package of the run (fault-injection harness).
    pub drop_first_package: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            execution: Execution::Parallel,
            policy: AllocationPolicy::JustEnough,
            memory_cap: None,
            max_supersteps: 1_000_000,
            inflate: 1,
            drop_first_package: false,
        }
    }
}

impl EngineConfig {
    pub fn with_policy(policy: AllocationPolicy) -> Self {
        EngineConfig {
            policy,
            ..Default::default()
        }
    }

    pub fn sequential() -> Self {
        EngineConfig {
            execution: Execution::Sequential,
            ..Default::default()
        }
    }
}

/// Commutative, associative reduction of per-worker reports.
pub trait Reduce: Clone + Default + Send + Sync + fmt::Debug {
    fn combine(&mut self, other: &Self);
}

impl Reduce for () {
    fn combine(&mut self, _: &Self) {}
}

/// What every worker knows about the whole run at a barrier.
#[derive(Clone, Debug)]
pub struct GlobalView<R> {
    /// Supersteps completed so far.
    pub superstep: usize,
    /// Length of each worker's next input frontier.
    pub frontier_lengths: Vec<usize>,
    /// Records addressed to each worker that are still in transit.
    pub in_flight: Vec<usize>,
    /// Records received by each worker and not yet merged.
    pub pending_inbox: Vec<usize>,
    /// Records each worker sent in the last superstep.
    pub sent: Vec<usize>,
    /// Reduction of reports taken after the iteration bodies.
    pub pre: R,
    /// Reduction of reports taken after merging.
    pub post: R,
}

impl<R: Default> GlobalView<R> {
    pub fn initial(frontier_lengths: Vec<usize>) -> Self {
        let n = frontier_lengths.len();
        GlobalView {
            superstep: 0,
            frontier_lengths,
            in_flight: vec![0; n],
            pending_inbox: vec![0; n],
            sent: vec![0; n],
            pre: R::default(),
            post: R::default(),
        }
    }
}

impl<R> GlobalView<R> {
    pub fn all_frontiers_empty(&self) -> bool {
        self.frontier_lengths.iter().all(|&l| l == 0)
    }
}

/// Default stop condition: no current or future work anywhere. Every local
/// frontier is empty, nothing is in transit and every inbox is drained.
pub fn check_convergence<R>(view: &GlobalView<R>) -> bool {
    view.all_frontiers_empty()
        && view.in_flight.iter().all(|&x| x == 0)
        && view.pending_inbox.iter().all(|&x| x == 0)
}

/// One partition as seen by its worker.
#[derive(Debug)]
pub struct PartitionView<'a> {
    pub id: usize,
    pub plan: &'a PartitionPlan,
    pub graph: &'a Csr,
    hosted_local: Vec<VertexId>,
}

impl<'a> PartitionView<'a> {
    pub fn new(plan: &'a PartitionPlan, id: usize) -> Self {
        let hosted_local = plan
            .hosted(id)
            .iter()
            .map(|&gv| plan.global_to_local(id, gv).expect("hosted vertex has a local ID"))
            .collect();
        PartitionView {
            id,
            plan,
            graph: plan.subgraph(id),
            hosted_local,
        }
    }

    pub fn num_partitions(&self) -> usize {
        self.plan.num_partitions()
    }

    /// `|V_i|`: local vertices including proxies.
    pub fn num_local_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    /// `|E_i|`.
    pub fn num_local_edges(&self) -> usize {
        self.graph.num_edges()
    }

    /// `|V|`.
    pub fn total_vertices(&self) -> usize {
        self.plan.num_vertices()
    }

    /// Local IDs of hosted vertices, ascending by global ID.
    pub fn hosted(&self) -> &[VertexId] {
        &self.hosted_local
    }

    #[inline]
    pub fn owner(&self, local: VertexId) -> usize {
        self.plan.owner_of_local(self.id, local)
    }

    #[inline]
    pub fn is_hosted(&self, local: VertexId) -> bool {
        self.owner(local) == self.id
    }

    #[inline]
    pub fn to_global(&self, local: VertexId) -> VertexId {
        self.plan.local_to_global(self.id, local)
    }

    #[inline]
    pub fn to_local(&self, global: VertexId) -> Option<VertexId> {
        self.plan.global_to_local(self.id, global)
    }
}

/// Per-worker context handed to an iteration body.
pub struct IterationCtx<'a, R> {
    pub part: &'a PartitionView<'a>,
    /// Index of the running superstep, from 0.
    pub superstep: usize,
    /// State of the run at the previous barrier.
    pub view: &'a GlobalView<R>,
    pool: &'a mut MemoryPool,
    advance_out: &'a mut Frontier,
    policy: &'a AllocationPolicy,
    edges_examined: &'a mut u64,
}

impl<'a, R> IterationCtx<'a, R> {
    pub fn graph(&self) -> &'a Csr {
        self.part.graph
    }

    pub fn policy(&self) -> &AllocationPolicy {
        self.policy
    }

    /// Counts edges inspected outside the provided operators.
    pub fn add_edges_examined(&mut self, n: u64) {
        *self.edges_examined += n;
    }

    pub fn ensure(&mut self, f: &mut Frontier, required: usize) -> Result<(), EngineError> {
        f.ensure_capacity(required, self.pool)?;
        Ok(())
    }

    /// Advance over `input`, writing accepted destinations to `output`.
    pub fn advance<V>(&mut self, input: &[VertexId], output: &mut Frontier, visit: V) -> Result<(), EngineError>
    where
        V: FnMut(VertexId, VertexId, usize) -> bool,
    {
        *self.edges_examined += advance(self.part.graph, input, output, self.pool, visit)?;
        Ok(())
    }

    /// Advance followed by filter. Runs fused (no intermediate buffer) under
    /// [`AllocationPolicy::PreallocFused`], as two passes otherwise. `dedup`
    /// promises that `keep` passes each vertex at most once, which caps the
    /// output bound at `|V_i|`.
    pub fn advance_filter<V, K>(
        &mut self,
        input: &[VertexId],
        output: &mut Frontier,
        dedup: bool,
        visit: V,
        keep: K,
    ) -> Result<(), EngineError>
    where
        V: FnMut(VertexId, VertexId, usize) -> bool,
        K: FnMut(VertexId) -> bool,
    {
        let nv = dedup.then(|| self.part.num_local_vertices());
        if self.policy.fused() {
            *self.edges_examined += advance_filter_fused(self.part.graph, input, output, self.pool, nv, visit, keep)?;
        } else {
            *self.edges_examined += advance(self.part.graph, input, self.advance_out, self.pool, visit)?;
            filter(self.advance_out.as_slice(), output, self.pool, nv, keep)?;
        }
        Ok(())
    }
}

/// The authoring contract for a primitive.
///
/// Per-worker state lives in `State`. Vertices in frontiers are local IDs of
/// the worker's partition; vertex associates travel as global IDs; value
/// associates are primitive-defined scalars.
pub trait Primitive: Sync {
    type State: Send;
    type Value: Copy + Default + Send + Sync + fmt::Debug + 'static;
    type Report: Reduce;
    type Output;

    fn name(&self) -> &'static str;

    /// Per-vertex IDs shipped with each remote vertex (e.g. predecessors).
    fn num_vertex_associates(&self) -> usize {
        0
    }

    /// Per-vertex scalars shipped with each remote vertex.
    fn num_value_associates(&self) -> usize {
        0
    }

    fn supports(&self, dup: Duplication) -> bool;

    /// Communication mode of the worker's next split. Must agree across
    /// workers within a superstep.
    fn communication(&self, state: &Self::State) -> Communication;

    fn init(&self, part: &PartitionView<'_>) -> Result<Self::State, EngineError>;

    fn initial_frontier(&self, part: &PartitionView<'_>, state: &mut Self::State) -> Vec<VertexId>;

    /// One superstep of local computation from `input` into `output`.
    fn iterate(
        &self,
        ctx: &mut IterationCtx<'_, Self::Report>,
        state: &mut Self::State,
        input: &Frontier,
        output: &mut Frontier,
    ) -> Result<(), EngineError>;

    /// Called for each remote vertex before packaging; returning false drops it.
    fn presend(&self, _state: &mut Self::State, _peer: usize, _v: VertexId) -> bool {
        true
    }

    /// Fills the associates of local vertex `v` for packaging.
    fn gather(
        &self,
        _state: &Self::State,
        _v: VertexId,
        _vertex_out: &mut [VertexId],
        _value_out: &mut [Self::Value],
    ) {
    }

    /// Combines one received vertex into local state. Returns whether it was
    /// accepted into the next input frontier. Must be commutative and
    /// associative over receipt order.
    fn combine(
        &self,
        state: &mut Self::State,
        v: VertexId,
        vertex_in: &[VertexId],
        value_in: &[Self::Value],
    ) -> bool;

    /// Report reduced across workers after the iteration bodies.
    fn pre_report(&self, _state: &Self::State) -> Self::Report {
        Self::Report::default()
    }

    /// Local work after merging, given the reduced pre-merge report; its
    /// return value is reduced into the post-merge report.
    fn after_merge(&self, _part: &PartitionView<'_>, _state: &mut Self::State, _pre: &Self::Report) -> Self::Report {
        Self::Report::default()
    }

    fn converged(&self, view: &GlobalView<Self::Report>) -> bool {
        check_convergence(view)
    }

    /// Assembles global results from the final worker states (indexed by partition).
    fn finish(&self, plan: &PartitionPlan, states: Vec<Self::State>) -> Self::Output;
}

/// Gathers one value per global vertex from the hosting partitions.
pub fn gather_hosted<S, T: Clone>(plan: &PartitionPlan, states: &[S], value: impl Fn(&S, VertexId) -> T) -> Vec<T> {
    (0..plan.num_vertices())
        .map(|g| {
            let (p, local) = plan.host_of(g as VertexId);
            value(&states[p], local)
        })
        .collect()
}

/// Per-worker deduplication marks, reset in O(1) by bumping the epoch.
#[derive(Clone, Debug)]
pub struct StampSet {
    marks: Vec<u32>,
    epoch: u32,
}

impl StampSet {
    pub fn new(len: usize) -> Self {
        StampSet {
            marks: vec![0; len],
            epoch: 1,
        }
    }

    pub fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.marks.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
    }

    /// Marks `v`; true if it was not yet marked this epoch.
    #[inline]
    pub fn insert(&mut self, v: VertexId) -> bool {
        let m = &mut self.marks[idx(v)];
        if *m == self.epoch {
            false
        } else {
            *m = self.epoch;
            true
        }
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.marks[idx(v)] == self.epoch
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergence_rules() {
        let mut view: GlobalView<()> = GlobalView::initial(vec![0, 0]);
        assert!(check_convergence(&view));
        view.in_flight[1] = 3;
        assert!(!check_convergence(&view));
        view.in_flight[1] = 0;
        view.pending_inbox[0] = 1;
        assert!(!check_convergence(&view));
        view.pending_inbox[0] = 0;
        view.frontier_lengths[0] = 2;
        assert!(!check_convergence(&view));
    }

    #[test]
    fn stamp_set() {
        let mut s = StampSet::new(4);
        assert!(s.insert(2));
        assert!(!s.insert(2));
        s.next_epoch();
        assert!(!s.contains(2));
        assert!(s.insert(2));
    }
}
