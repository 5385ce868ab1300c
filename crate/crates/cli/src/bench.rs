use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use bspgraph::cost::PrimitiveKind;
use bspgraph::frontier::SizingFactors;
use bspgraph::partition::build_partition_plan;
use bspgraph::primitives::{kind_supports, run_kind};
use bspgraph::{AllocationPolicy, Duplication};
use clap::Args;
use serde::Serialize;

use crate::opts::{assign, parse_list, CommArg, DupArg, GraphOpts, PartitionerSpec, PrimOpts};

#[derive(Args, Debug)]
pub struct BenchCmd {
    #[command(flatten)]
    pub graph: GraphOpts,
    /// Comma-separated primitives.
    #[arg(long, default_value = "bfs,dobfs,sssp,cc,bc,pr")]
    pub primitives: String,
    /// Comma-separated partition counts.
    #[arg(long = "parts", default_value = "1,2,4")]
    pub parts: String,
    /// Comma-separated partitioners.
    #[arg(long = "partitioner", default_value = "random")]
    pub partitioners: String,
    /// Comma-separated allocation policies: just, fixed, max, fused. The
    /// prealloc policies use factors recorded by a probe run.
    #[arg(long = "alloc", default_value = "just")]
    pub policies: String,
    #[arg(long, value_enum, default_value_t = DupArg::All)]
    pub dup: DupArg,
    #[arg(long)]
    pub source: Option<u64>,
    #[arg(long, default_value_t = 10)]
    pub repeat: usize,
    #[arg(long)]
    pub sequential: bool,
    /// CSV destination; `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct Row {
    primitive: String,
    graph: String,
    n: usize,
    partitioner: String,
    policy: String,
    duplication: Duplication,
    wall_ms: f64,
    #[serde(rename = "W")]
    w: u64,
    #[serde(rename = "H")]
    h: u64,
    #[serde(rename = "S")]
    s: usize,
    #[serde(rename = "C")]
    c: u64,
    peak_bytes: usize,
    reallocs: usize,
    border_total: usize,
    edge_cut: usize,
}

fn probe_factors(
    kind: PrimitiveKind,
    plan: &bspgraph::PartitionPlan,
    prim: &PrimOpts,
    base: &bspgraph::EngineConfig,
    fused: bool,
) -> Result<SizingFactors> {
    let mut cfg = base.clone();
    cfg.policy = if fused {
        AllocationPolicy::PreallocFused(SizingFactors::default())
    } else {
        AllocationPolicy::JustEnough
    };
    let (_, stats) = run_kind(kind, plan, &prim.params(prim.source.unwrap_or(0) as _), &cfg)?;
    Ok(stats.sizing_factors())
}

fn geomean(xs: &[f64]) -> f64 {
    (xs.iter().map(|x| x.ln()).sum::<f64>() / xs.len() as f64).exp()
}

pub fn cmd_bench(cmd: &BenchCmd) -> Result<()> {
    let kinds: Vec<PrimitiveKind> = parse_list(&cmd.primitives)?;
    let counts: Vec<usize> = parse_list(&cmd.parts)?;
    let partitioners: Vec<PartitionerSpec> = parse_list(&cmd.partitioners)?;
    let policies: Vec<String> = parse_list(&cmd.policies)?;
    let dup: Duplication = cmd.dup.into();
    let base = bspgraph::EngineConfig {
        execution: if cmd.sequential {
            bspgraph::Execution::Sequential
        } else {
            bspgraph::Execution::Parallel
        },
        ..Default::default()
    };
    let graph_name = cmd.graph.name();
    let unweighted = cmd.graph.load()?;
    let weighted = cmd.graph.load_for(PrimitiveKind::Sssp)?;

    let mut rows = Vec::new();
    for &kind in &kinds {
        let g = if kind == PrimitiveKind::Sssp { &weighted } else { &unweighted };
        let prim = PrimOpts {
            primitive: kind,
            source: cmd.source,
            sources: None,
            comm: None::<CommArg>,
            mark_preds: false,
            do_a: bspgraph::primitives::DEFAULT_DO_A,
            do_b: bspgraph::primitives::DEFAULT_DO_B,
            damping: bspgraph::primitives::DEFAULT_DAMPING,
            epsilon: bspgraph::primitives::DEFAULT_EPSILON,
            max_iter: bspgraph::primitives::DEFAULT_MAX_ITER,
        };
        if !kind_supports(kind, dup, None) {
            eprintln!("skipping {kind}: {dup} not supported");
            continue;
        }
        let source = prim.source_list(g, cmd.graph.seed)?[0];
        for &n in &counts {
            for part in &partitioners {
                let a = assign(g, n, part, cmd.graph.seed)?;
                let plan = build_partition_plan(g, &a, dup)?;
                let borders = plan.border_metrics();
                for policy_name in &policies {
                    let policy = match policy_name.as_str() {
                        "just" => AllocationPolicy::JustEnough,
                        "max" => AllocationPolicy::Maximum,
                        "fixed" => AllocationPolicy::FixedPrealloc(probe_factors(kind, &plan, &prim, &base, false)?),
                        "fused" => AllocationPolicy::PreallocFused(probe_factors(kind, &plan, &prim, &base, true)?),
                        other => anyhow::bail!("unknown policy `{other}` (just, fixed, max, fused)"),
                    };
                    let cfg = bspgraph::EngineConfig {
                        policy,
                        ..base.clone()
                    };
                    let params = prim.params(source);
                    let mut total = 0.0;
                    let mut last = None;
                    for _ in 0..cmd.repeat.max(1) {
                        let (_, stats) = run_kind(kind, &plan, &params, &cfg)
                            .with_context(|| format!("{kind} n={n} {}", part.label()))?;
                        total += stats.wall_ms;
                        last = Some(stats);
                    }
                    let stats = last.expect("at least one repeat");
                    rows.push(Row {
                        primitive: kind.name().into(),
                        graph: graph_name.clone(),
                        n,
                        partitioner: part.label(),
                        policy: policy_name.clone(),
                        duplication: dup,
                        wall_ms: total / cmd.repeat.max(1) as f64,
                        w: stats.edges_examined,
                        h: stats.h_total(),
                        s: stats.supersteps,
                        c: stats.combine_ops,
                        peak_bytes: stats.peak_bytes,
                        reallocs: stats.reallocs(),
                        border_total: borders.total,
                        edge_cut: borders.edge_cut,
                    });
                }
            }
        }
    }

    let mut wtr = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        wtr.serialize(r)?;
    }
    let text = String::from_utf8(wtr.into_inner()?)?;
    crate::opts::write_out(&cmd.out, &text)?;

    // Speedup of each n over n=1, per (partitioner, policy), geometric mean over primitives.
    let mut base_ms: BTreeMap<(String, String, String), f64> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.n == 1) {
        base_ms.insert((r.primitive.clone(), r.partitioner.clone(), r.policy.clone()), r.wall_ms);
    }
    let mut speedups: BTreeMap<(String, String, usize), Vec<f64>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.n != 1) {
        if let Some(&b) = base_ms.get(&(r.primitive.clone(), r.partitioner.clone(), r.policy.clone())) {
            if r.wall_ms > 0.0 && b > 0.0 {
                speedups
                    .entry((r.partitioner.clone(), r.policy.clone(), r.n))
                    .or_default()
                    .push(b / r.wall_ms);
            }
        }
    }
    for ((part, policy, n), xs) in &speedups {
        eprintln!(
            "speedup n={n} vs n=1 ({part}, {policy}): geometric mean {:.3} over {} primitives",
            geomean(xs),
            xs.len()
        );
    }
    Ok(())
}
