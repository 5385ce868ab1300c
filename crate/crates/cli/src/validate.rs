use anyhow::Result;
use bspgraph::cost::PrimitiveKind;
use bspgraph::partition::build_partition_plan;
use bspgraph::primitives::{run_kind, PrimitiveOutput};
use bspgraph::{reference, Assignment, Csr, Duplication, VertexId};
use clap::Args;

use crate::opts::{EngineOpts, GraphOpts, PartOpts, PrimOpts};

#[derive(Args, Debug)]
pub struct ValidateCmd {
    #[command(flatten)]
    pub graph: GraphOpts,
    #[command(flatten)]
    pub part: PartOpts,
    #[command(flatten)]
    pub prim: PrimOpts,
    #[command(flatten)]
    pub engine: EngineOpts,
    /// Relative tolerance for BC and PR.
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// Drop the first nonempty package of the partitioned run.
    #[arg(long)]
    pub inject_fault: bool,
    /// Mismatching vertices to print per comparison.
    #[arg(long, default_value_t = 10)]
    pub show: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Values {
    Exact(Vec<u64>),
    Approx(Vec<f64>),
}

fn values(o: &PrimitiveOutput) -> Values {
    let hops = |l: &[u32]| Values::Exact(l.iter().map(|&x| x as u64).collect());
    match o {
        PrimitiveOutput::Bfs(o) => hops(&o.labels),
        PrimitiveOutput::Dobfs(o) => hops(&o.labels),
        PrimitiveOutput::Sssp(o) => Values::Exact(o.dist.clone()),
        PrimitiveOutput::Cc(o) => Values::Exact(o.labels.iter().map(|&c| c as u64).collect()),
        PrimitiveOutput::Bc(o) => Values::Approx(o.bc.clone()),
        PrimitiveOutput::Pr(o) => Values::Approx(o.ranks.clone()),
    }
}

fn oracle(kind: PrimitiveKind, g: &Csr, prim: &PrimOpts, source: VertexId) -> Values {
    match kind {
        PrimitiveKind::Bfs | PrimitiveKind::Dobfs => {
            Values::Exact(reference::bfs_levels(g, source).into_iter().map(u64::from).collect())
        }
        PrimitiveKind::Sssp => Values::Exact(reference::dijkstra(g, source)),
        PrimitiveKind::Cc => Values::Exact(reference::components(g).into_iter().map(|c| c as u64).collect()),
        PrimitiveKind::Bc => Values::Approx(reference::brandes(g, source)),
        PrimitiveKind::Pr => Values::Approx(reference::pagerank(g, prim.damping, prim.epsilon, prim.max_iter).0),
    }
}

fn show_exact(x: u64) -> String {
    if x == u64::from(u32::MAX) || x == u64::MAX {
        "inf".into()
    } else {
        x.to_string()
    }
}

/// Prints mismatches of `got` against `want`; returns the mismatch count.
fn compare(label: &str, got: &Values, want: &Values, tol: f64, show: usize) -> usize {
    let mut bad: Vec<String> = Vec::new();
    let mut worst = 0.0f64;
    match (got, want) {
        (Values::Exact(a), Values::Exact(b)) => {
            for (v, (x, y)) in a.iter().zip(b).enumerate() {
                if x != y {
                    bad.push(format!("vertex {v}: got {}, expected {}", show_exact(*x), show_exact(*y)));
                }
            }
        }
        (Values::Approx(a), Values::Approx(b)) => {
            for (v, (x, y)) in a.iter().zip(b).enumerate() {
                let d = (x - y).abs();
                let rel = if d <= 1e-12 { 0.0 } else { d / x.abs().max(y.abs()) };
                worst = worst.max(rel);
                if rel > tol {
                    bad.push(format!("vertex {v}: got {x:e}, expected {y:e} (relative {rel:.2e})"));
                }
            }
        }
        _ => unreachable!("outputs of the same primitive"),
    }
    if bad.is_empty() {
        if matches!(want, Values::Approx(_)) {
            println!("{label}: ok (max relative difference {worst:.2e})");
        } else {
            println!("{label}: ok");
        }
    } else {
        println!("{label}: {} mismatching vertices", bad.len());
        for line in bad.iter().take(show) {
            println!("  {line}");
        }
        if bad.len() > show {
            println!("  ... {} more", bad.len() - show);
        }
    }
    bad.len()
}

/// Returns whether all three results agree.
pub fn cmd_validate(cmd: &ValidateCmd) -> Result<bool> {
    let kind = cmd.prim.primitive;
    let g = cmd.graph.load_for(kind)?;
    let plan = cmd.part.plan(&g, cmd.graph.seed)?;
    let single = build_partition_plan(&g, &Assignment::single(g.num_vertices()), Duplication::DuplicateAll)?;
    let base = cmd.engine.config()?;
    let mut faulty = base.clone();
    faulty.drop_first_package = cmd.inject_fault;
    let mut failures = 0;
    for source in cmd.prim.source_list(&g, cmd.graph.seed)? {
        let params = cmd.prim.params(source);
        let (multi, _) = run_kind(kind, &plan, &params, &faulty)?;
        let (one, _) = run_kind(kind, &single, &params, &base)?;
        let want = oracle(kind, &g, &cmd.prim, source);
        let (got, got1) = (values(&multi), values(&one));
        let n = plan.num_partitions();
        let tag = if matches!(kind, PrimitiveKind::Cc | PrimitiveKind::Pr) {
            kind.name().to_string()
        } else {
            format!("{kind} source {source}")
        };
        failures += compare(&format!("{tag}: n={n} vs oracle"), &got, &want, cmd.tolerance, cmd.show);
        failures += compare(&format!("{tag}: n={n} vs n=1"), &got, &got1, cmd.tolerance, cmd.show);
    }
    println!("{}", if failures == 0 { "pass" } else { "fail" });
    Ok(failures == 0)
}
