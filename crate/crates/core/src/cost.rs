//! BSP cost model: per-primitive predictions of local work `W`,
//! communication computation `C`, communication volume `H` and supersteps
//! `S`; overhead fitting for the per-record transfer time `g` and the
//! per-superstep overhead `l`; and predicted-versus-measured comparison.
//!
//! Predictions take the leading term of each cost with constant 1. They are
//! per partition; `S` is global.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{
    run_primitive, Communication, EngineConfig, EngineError, Execution, IterationCtx, PartitionView, Primitive,
    RunReport, RunStats,
};
use crate::frontier::Frontier;
use crate::graph::{Csr, GraphStats};
use crate::partition::{build_partition_plan, Assignment, Duplication, PartitionPlan};
use crate::primitives::Bfs;
use crate::{vid, VertexId};

#[derive(Debug, Error)]
pub enum CostError {
    #[error("unknown primitive `{0}`")]
    UnknownPrimitive(String),
    #[error("need at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("samples have no spread in x")]
    Degenerate,
    #[error("microbenchmark needs at least 10 supersteps, got {0}")]
    TooFewSupersteps(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimitiveKind {
    Bfs,
    Dobfs,
    Sssp,
    Cc,
    Bc,
    Pr,
}

impl PrimitiveKind {
    pub const ALL: [PrimitiveKind; 6] = [
        PrimitiveKind::Bfs,
        PrimitiveKind::Dobfs,
        PrimitiveKind::Sssp,
        PrimitiveKind::Cc,
        PrimitiveKind::Bc,
        PrimitiveKind::Pr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrimitiveKind::Bfs => "bfs",
            PrimitiveKind::Dobfs => "dobfs",
            PrimitiveKind::Sssp => "sssp",
            PrimitiveKind::Cc => "cc",
            PrimitiveKind::Bc => "bc",
            PrimitiveKind::Pr => "pr",
        }
    }
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrimitiveKind {
    type Err = CostError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PrimitiveKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| CostError::UnknownPrimitive(s.to_string()))
    }
}

/// Sizes of one partition that the predictions depend on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionMetrics {
    /// `|V_i|`, proxies included.
    pub local_vertices: usize,
    /// `|E_i|`.
    pub local_edges: usize,
    /// `|L_i|`.
    pub hosted: usize,
    /// `|B_i|`.
    pub border: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanMetrics {
    pub num_vertices: usize,
    pub num_edges: usize,
    pub partitions: Vec<PartitionMetrics>,
}

impl PlanMetrics {
    pub fn from_plan(plan: &PartitionPlan) -> Self {
        let borders = plan.border_metrics();
        PlanMetrics {
            num_vertices: plan.num_vertices(),
            num_edges: plan.num_edges(),
            partitions: (0..plan.num_partitions())
                .map(|p| PartitionMetrics {
                    local_vertices: plan.subgraph(p).num_vertices(),
                    local_edges: plan.subgraph(p).num_edges(),
                    hosted: plan.hosted(p).len(),
                    border: borders.per_partition[p],
                })
                .collect(),
        }
    }

    pub fn num_partitions(&self) -> usize {
        self.partitions.len()
    }
}

/// Data-dependent factors, 1 unless supplied.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataFactors {
    /// DOBFS work fraction.
    pub a: f64,
    /// SSSP re-relaxation factor.
    pub b: f64,
    /// PR iteration count.
    pub pr_iterations: f64,
}

impl Default for DataFactors {
    fn default() -> Self {
        DataFactors {
            a: 1.0,
            b: 1.0,
            pr_iterations: 1.0,
        }
    }
}

/// Predicted or measured costs; `w`, `c`, `h` are per partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostTerms {
    pub w: Vec<f64>,
    pub c: Vec<f64>,
    pub h: Vec<f64>,
    pub s: f64,
}

impl CostTerms {
    pub fn w_total(&self) -> f64 {
        self.w.iter().sum()
    }

    pub fn c_total(&self) -> f64 {
        self.c.iter().sum()
    }

    pub fn h_total(&self) -> f64 {
        self.h.iter().sum()
    }
}

fn half_diameter(d: usize) -> f64 {
    (d as f64 / 2.0).ceil()
}

/// Leading-term predictions.
pub fn predict(kind: PrimitiveKind, stats: &GraphStats, metrics: &PlanMetrics, factors: DataFactors) -> CostTerms {
    let n = metrics.num_partitions();
    let nv = stats.num_vertices as f64;
    let d = stats.approx_diameter;
    let cc_s = 2.0 + ((d + 1) as f64).log2().ceil();
    let s = match kind {
        PrimitiveKind::Bfs | PrimitiveKind::Dobfs | PrimitiveKind::Bc => half_diameter(d),
        PrimitiveKind::Sssp => (factors.b * d as f64 / 2.0).ceil(),
        PrimitiveKind::Cc => cc_s,
        PrimitiveKind::Pr => factors.pr_iterations,
    };
    let mut out = CostTerms {
        w: Vec::with_capacity(n),
        c: Vec::with_capacity(n),
        h: Vec::with_capacity(n),
        s,
    };
    for p in &metrics.partitions {
        let (e, v, b, l) = (p.local_edges as f64, p.local_vertices as f64, p.border as f64, p.hosted as f64);
        let peers = n.saturating_sub(1) as f64;
        let (w, c, h) = match kind {
            PrimitiveKind::Bfs => (e, v, b),
            PrimitiveKind::Dobfs => (factors.a * e, nv, peers * nv),
            PrimitiveKind::Sssp => (factors.b * e, factors.b * v, 2.0 * factors.b * b),
            PrimitiveKind::Bc => (2.0 * e, 2.0 * v + nv, 5.0 * b + 2.0 * peers * l),
            PrimitiveKind::Cc => ((d as f64 / 2.0).log2().max(1.0) * e, s * v, s * 2.0 * v),
            PrimitiveKind::Pr => (s * e, s * b, s * b),
        };
        out.w.push(w);
        out.c.push(c);
        out.h.push(if n == 1 { 0.0 } else { h });
    }
    out
}

/// Per-partition values, or the total spread evenly when only that is known.
fn per_partition(values: Option<&[u64]>, total: u64, n: usize) -> Vec<f64> {
    match values {
        Some(v) => v.iter().map(|&x| x as f64).collect(),
        None => vec![total as f64 / n.max(1) as f64; n],
    }
}

/// What a run measured, in the same shape as a prediction. Without
/// per-partition `W` and `C` the report totals are spread evenly.
pub fn measured_terms(report: &RunReport, per_partition_w: Option<&[u64]>, per_partition_c: Option<&[u64]>) -> CostTerms {
    let n = report.n;
    CostTerms {
        w: per_partition(per_partition_w, report.w, n),
        c: per_partition(per_partition_c, report.c, n),
        h: (0..n).map(|i| report.h_from(i) as f64).collect(),
        s: report.s as f64,
    }
}

/// `y = slope·x + intercept` by least squares.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(samples: &[(f64, f64)]) -> Result<LinearFit, CostError> {
    if samples.len() < 3 {
        return Err(CostError::TooFewSamples(samples.len()));
    }
    let k = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / k;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / k;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    let syy: f64 = samples.iter().map(|s| (s.1 - my).powi(2)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) {
        return Err(CostError::Degenerate);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(LinearFit { slope, intercept, r2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overheads {
    /// Seconds per transmitted record.
    pub g: f64,
    /// Seconds per superstep.
    pub l: f64,
    pub g_fit: LinearFit,
    pub l_fit: LinearFit,
}

/// `l` from (supersteps, seconds) samples; `g` from (records, seconds).
pub fn fit_overheads(microbench: &[(f64, f64)], exchange: &[(f64, f64)]) -> Result<Overheads, CostError> {
    let l_fit = linear_fit(microbench)?;
    let g_fit = linear_fit(exchange)?;
    Ok(Overheads {
        g: g_fit.slope,
        l: l_fit.slope,
        g_fit,
        l_fit,
    })
}

/// Each worker visits one vertex and one edge per superstep.
struct Microbench {
    supersteps: usize,
}

impl Primitive for Microbench {
    type State = VertexId;
    type Value = ();
    type Report = ();
    type Output = ();

    fn name(&self) -> &'static str {
        "microbench"
    }

    fn supports(&self, _dup: Duplication) -> bool {
        true
    }

    fn communication(&self, _state: &VertexId) -> Communication {
        Communication::Selective
    }

    fn init(&self, part: &PartitionView<'_>) -> Result<VertexId, EngineError> {
        Ok(part.hosted()[0])
    }

    fn initial_frontier(&self, _part: &PartitionView<'_>, _state: &mut VertexId) -> Vec<VertexId> {
        Vec::new()
    }

    fn iterate(
        &self,
        ctx: &mut IterationCtx<'_, ()>,
        state: &mut VertexId,
        _input: &Frontier,
        output: &mut Frontier,
    ) -> Result<(), EngineError> {
        let v = *state;
        ctx.advance(&[v], output, |_, _, _| false)
    }

    fn combine(&self, _state: &mut VertexId, _v: VertexId, _vi: &[VertexId], _val: &[()]) -> bool {
        false
    }

    fn converged(&self, view: &crate::engine::GlobalView<()>) -> bool {
        view.superstep >= self.supersteps
    }

    fn finish(&self, _plan: &PartitionPlan, _states: Vec<VertexId>) {}
}

/// One vertex pair `2p <-> 2p+1` per worker, owned by that worker.
pub fn microbench_plan(n_workers: usize) -> PartitionPlan {
    let n = n_workers.max(1);
    let mut edges = Vec::with_capacity(2 * n);
    for p in 0..n {
        edges.push((vid(2 * p), vid(2 * p + 1)));
        edges.push((vid(2 * p + 1), vid(2 * p)));
    }
    let g = Csr::build(2 * n, &edges, None).expect("valid pairs");
    let owners = (0..2 * n).map(|v| (v / 2) as u32).collect();
    let a = Assignment::new(owners, n).expect("valid owners");
    build_partition_plan(&g, &a, Duplication::DuplicateAll).expect("matching sizes")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MicrobenchSample {
    pub n_workers: usize,
    pub supersteps: usize,
    pub total_s: f64,
    pub per_iteration_s: f64,
}

/// Times `supersteps` minimal supersteps on `n_workers` workers.
pub fn microbench_overhead(
    n_workers: usize,
    supersteps: usize,
    execution: Execution,
) -> Result<MicrobenchSample, CostError> {
    if supersteps < 10 {
        return Err(CostError::TooFewSupersteps(supersteps));
    }
    microbench_run(n_workers, supersteps, execution)
}

fn microbench_run(n_workers: usize, supersteps: usize, execution: Execution) -> Result<MicrobenchSample, CostError> {
    let plan = microbench_plan(n_workers);
    let config = EngineConfig {
        execution,
        max_supersteps: supersteps + 1,
        ..Default::default()
    };
    let start = Instant::now();
    let ((), stats) = run_primitive(&Microbench { supersteps }, &plan, &config)?;
    let total_s = start.elapsed().as_secs_f64();
    debug_assert_eq!(stats.supersteps, supersteps);
    Ok(MicrobenchSample {
        n_workers: plan.num_partitions(),
        supersteps,
        total_s,
        per_iteration_s: total_s / supersteps as f64,
    })
}

/// Microbenchmark without the lower superstep limit, for short smoke runs.
pub fn microbench_unchecked(
    n_workers: usize,
    supersteps: usize,
    execution: Execution,
) -> Result<MicrobenchSample, CostError> {
    microbench_run(n_workers, supersteps.max(1), execution)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InflationSample {
    pub k: usize,
    pub records: u64,
    pub exchange_s: f64,
}

/// BFS with every record sent `k` times, for each `k`. Exchange time is the
/// fastest of `repeats` runs.
pub fn inflation_experiment(
    plan: &PartitionPlan,
    source: VertexId,
    ks: &[usize],
    repeats: usize,
    execution: Execution,
) -> Result<Vec<InflationSample>, CostError> {
    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        let config = EngineConfig {
            execution,
            inflate: k,
            ..Default::default()
        };
        let mut best = f64::INFINITY;
        let mut records = 0;
        for _ in 0..repeats.max(1) {
            let (_, stats) = run_primitive(&Bfs::new(source), plan, &config)?;
            best = best.min(stats.exchange_ms / 1e3);
            records = stats.h_total();
        }
        out.push(InflationSample {
            k,
            records,
            exchange_s: best,
        });
    }
    Ok(out)
}

/// Seconds per examined edge from a single-partition BFS.
pub fn fit_w_unit(g: &Csr, source: VertexId, execution: Execution) -> Result<f64, CostError> {
    let plan = build_partition_plan(g, &Assignment::single(g.num_vertices()), Duplication::DuplicateAll)
        .expect("single partition");
    let config = EngineConfig {
        execution,
        ..Default::default()
    };
    let (_, stats) = run_primitive(&Bfs::new(source), &plan, &config)?;
    Ok(stats.wall_ms / 1e3 / stats.edges_examined.max(1) as f64)
}

/// Predicted and measured costs of one run with the fitted constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModelRecord {
    pub primitive: PrimitiveKind,
    pub n: usize,
    pub communication: Communication,
    pub metrics: PlanMetrics,
    pub predicted: CostTerms,
    pub measured: CostTerms,
    pub g: f64,
    pub l: f64,
    pub w_unit: f64,
}

impl CostModelRecord {
    /// `W·w_unit + H·g + S·l` with the busiest partition's `W` and `H`.
    pub fn modeled_time_s(&self, terms: &CostTerms) -> f64 {
        let w = terms.w.iter().copied().fold(0.0, f64::max);
        let h = terms.h.iter().copied().fold(0.0, f64::max);
        w * self.w_unit + h * self.g + terms.s * self.l
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    #[serde(rename = "W")]
    pub w: Option<f64>,
    #[serde(rename = "H")]
    pub h: Option<f64>,
    #[serde(rename = "S")]
    pub s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub schema: u32,
    pub primitive: PrimitiveKind,
    pub n: usize,
    pub predicted: CostTerms,
    pub measured: CostTerms,
    pub g: f64,
    pub l: f64,
    pub w_unit: f64,
    pub modeled_time_ms: f64,
    pub ratios: Ratios,
    pub violations: Vec<String>,
}

fn ratio(measured: f64, predicted: f64) -> Option<f64> {
    (predicted > 0.0).then(|| measured / predicted)
}

/// Upper bounds on per-partition communication volume that hold exactly.
/// `None` where the volume is data-dependent.
pub fn h_bounds(kind: PrimitiveKind, comm: Communication, metrics: &PlanMetrics, supersteps: usize) -> Option<Vec<u64>> {
    let n = metrics.num_partitions() as u64;
    let nv = metrics.num_vertices as u64;
    let peers = n.saturating_sub(1);
    let bounds = metrics.partitions.iter().map(|p| {
        let b = p.border as u64;
        match (kind, comm) {
            (PrimitiveKind::Bfs, Communication::Selective) => Some(b),
            (PrimitiveKind::Bfs, Communication::Broadcast) | (PrimitiveKind::Dobfs, _) => Some(peers * nv),
            (PrimitiveKind::Pr, _) => Some(supersteps as u64 * b),
            (PrimitiveKind::Bc, _) => Some(5 * b + 2 * peers * p.hosted as u64),
            _ => None,
        }
    });
    bounds.collect()
}

/// Ratios of measured to predicted costs, plus every violated invariant:
/// per-partition volume above its exact bound, and for PR any volume other
/// than `S·|B_i|`.
pub fn compare(record: &CostModelRecord) -> ModelReport {
    let mut violations = Vec::new();
    let s = record.measured.s as usize;
    if let Some(bounds) = h_bounds(record.primitive, record.communication, &record.metrics, s) {
        for (i, (&bound, &got)) in bounds.iter().zip(&record.measured.h).enumerate() {
            let got = got as u64;
            let exact = record.primitive == PrimitiveKind::Pr;
            if got > bound || (exact && got != bound) {
                violations.push(format!(
                    "partition {i}: H = {got}, {} {bound}",
                    if exact { "expected exactly" } else { "bound" }
                ));
            }
        }
    }
    ModelReport {
        schema: RunReport::SCHEMA,
        primitive: record.primitive,
        n: record.n,
        predicted: record.predicted.clone(),
        measured: record.measured.clone(),
        g: record.g,
        l: record.l,
        w_unit: record.w_unit,
        modeled_time_ms: record.modeled_time_s(&record.measured) * 1e3,
        ratios: Ratios {
            w: ratio(record.measured.w_total(), record.predicted.w_total()),
            h: ratio(record.measured.h_total(), record.predicted.h_total()),
            s: ratio(record.measured.s, record.predicted.s),
        },
        violations,
    }
}

/// Builds the record for a finished run.
pub fn record_for_run(
    kind: PrimitiveKind,
    stats: &RunStats,
    graph_stats: &GraphStats,
    metrics: &PlanMetrics,
    overheads: (f64, f64),
    w_unit: f64,
) -> CostModelRecord {
    let report = RunReport::new(stats, "", stats.wall_ms, 1);
    let factors = DataFactors {
        pr_iterations: stats.supersteps as f64,
        ..Default::default()
    };
    let w = stats.edges_per_worker();
    let c = stats.combines_per_worker();
    CostModelRecord {
        primitive: kind,
        n: stats.num_partitions,
        communication: stats.communication,
        metrics: metrics.clone(),
        predicted: predict(kind, graph_stats, metrics, factors),
        measured: measured_terms(&report, Some(&w), Some(&c)),
        g: overheads.0,
        l: overheads.1,
        w_unit,
    }
}
