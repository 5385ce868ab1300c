use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{Context, Result};
use bspgraph::cost::{h_bounds, PlanMetrics, PrimitiveKind};
use bspgraph::engine::RunReport;
use bspgraph::primitives::{run_kind, PrimitiveOutput};
use bspgraph::{Csr, EngineConfig, PartitionPlan, RunStats, VertexId};
use clap::Args;

use crate::opts::{write_out, EngineOpts, GraphOpts, PartOpts, PrimOpts};

#[derive(Args, Debug)]
pub struct RunCmd {
    #[command(flatten)]
    pub graph: GraphOpts,
    #[command(flatten)]
    pub part: PartOpts,
    #[command(flatten)]
    pub prim: PrimOpts,
    #[command(flatten)]
    pub engine: EngineOpts,
    /// Runs per source; the reported time is the mean.
    #[arg(long, default_value_t = 10)]
    pub repeat: usize,
    /// Stats JSON destination; `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    /// Per-vertex results, one `vertex value` line each.
    #[arg(long)]
    pub results: Option<PathBuf>,
    /// Write the per-role sizing factors this run observed.
    #[arg(long)]
    pub emit_sizing: Option<PathBuf>,
    /// Send every record this many times.
    #[arg(long, default_value_t = 1)]
    pub inflate: usize,
    /// Drop the first nonempty package (fault injection).
    #[arg(long, hide = true)]
    pub drop_first_package: bool,
}

/// Outcome of one source: the last repeat's output and stats plus the mean time.
pub struct SourceRun {
    pub source: VertexId,
    pub output: PrimitiveOutput,
    pub stats: RunStats,
    pub mean_ms: f64,
}

pub fn run_sources(
    kind: PrimitiveKind,
    plan: &PartitionPlan,
    prim: &PrimOpts,
    sources: &[VertexId],
    config: &EngineConfig,
    repeat: usize,
) -> Result<Vec<SourceRun>> {
    let repeat = repeat.max(1);
    let mut out = Vec::with_capacity(sources.len());
    for &source in sources {
        let params = prim.params(source);
        let mut total = 0.0;
        let mut last = None;
        for _ in 0..repeat {
            let (o, s) = run_kind(kind, plan, &params, config)?;
            total += s.wall_ms;
            last = Some((o, s));
        }
        let (output, stats) = last.expect("at least one repeat");
        out.push(SourceRun {
            source,
            output,
            stats,
            mean_ms: total / repeat as f64,
        });
    }
    Ok(out)
}

/// Table 1 volume bounds that the run broke, one message each.
pub fn volume_violations(kind: PrimitiveKind, plan: &PartitionPlan, stats: &RunStats) -> Vec<String> {
    let metrics = PlanMetrics::from_plan(plan);
    let Some(bounds) = h_bounds(kind, stats.communication, &metrics, stats.supersteps) else {
        return Vec::new();
    };
    let exact = kind == PrimitiveKind::Pr;
    bounds
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| {
            let h = stats.h_from(i);
            let bad = if exact { h != b } else { h > b };
            bad.then(|| format!("partition {i}: H = {h}, bound {b}"))
        })
        .collect()
}

fn sum_bc(runs: &[SourceRun]) -> Option<PrimitiveOutput> {
    let PrimitiveOutput::Bc(first) = &runs.first()?.output else {
        return None;
    };
    let mut total = first.clone();
    for r in &runs[1..] {
        if let PrimitiveOutput::Bc(o) = &r.output {
            total.bc.iter_mut().zip(&o.bc).for_each(|(t, x)| *t += x);
        }
    }
    Some(PrimitiveOutput::Bc(total))
}

pub fn load(cmd_graph: &GraphOpts, cmd_part: &PartOpts, kind: PrimitiveKind) -> Result<(Csr, PartitionPlan)> {
    let g = cmd_graph.load_for(kind)?;
    let plan = cmd_part.plan(&g, cmd_graph.seed)?;
    Ok((g, plan))
}

/// Returns whether every invariant held.
pub fn cmd_run(cmd: &RunCmd) -> Result<bool> {
    let kind = cmd.prim.primitive;
    let (g, plan) = load(&cmd.graph, &cmd.part, kind)?;
    let mut config = cmd.engine.config()?;
    config.inflate = cmd.inflate.max(1);
    config.drop_first_package = cmd.drop_first_package;
    let sources = cmd.prim.source_list(&g, cmd.graph.seed)?;
    let runs = run_sources(kind, &plan, &cmd.prim, &sources, &config, cmd.repeat)?;

    let partitioner = cmd.part.partitioner.label();
    let reports: Vec<RunReport> = runs
        .iter()
        .map(|r| RunReport::new(&r.stats, &partitioner, r.mean_ms, cmd.repeat.max(1)))
        .collect();
    let json = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])?
    } else {
        serde_json::to_string_pretty(&reports)?
    };
    write_out(&cmd.out, &(json + "\n"))?;

    if let Some(path) = &cmd.results {
        let output = if kind == PrimitiveKind::Bc && runs.len() > 1 {
            sum_bc(&runs).expect("bc runs")
        } else {
            runs[0].output.clone()
        };
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        output.write_values(BufWriter::new(file))?;
    }
    if let Some(path) = &cmd.emit_sizing {
        runs[0]
            .stats
            .sizing_factors()
            .save(path)
            .with_context(|| format!("writing {}", path.display()))?;
    }

    let mut ok = true;
    // Inflated volume is outside the bounds by construction.
    if config.inflate == 1 {
        for r in &runs {
            for v in volume_violations(kind, &plan, &r.stats) {
                eprintln!("violation (source {}): {v}", r.source);
                ok = false;
            }
        }
    }
    Ok(ok)
}
