use std::path::PathBuf;

use anyhow::{Context, Result};
use bspgraph::cost::{
    compare, fit_w_unit, inflation_experiment, linear_fit, measured_terms, microbench_overhead, predict,
    record_for_run, CostModelRecord, DataFactors, PlanMetrics,
};
use bspgraph::engine::RunReport;
use bspgraph::graph::{GraphStats, DEFAULT_DIAMETER_SOURCES};
use bspgraph::primitives::run_kind;
use bspgraph::Execution;
use clap::Args;

use crate::opts::{write_out, EngineOpts, GraphOpts, PartOpts, PrimOpts};

#[derive(Args, Debug)]
pub struct ModelCmd {
    #[command(flatten)]
    pub graph: GraphOpts,
    #[command(flatten)]
    pub part: PartOpts,
    #[command(flatten)]
    pub prim: PrimOpts,
    #[command(flatten)]
    pub engine: EngineOpts,
    /// Compare a saved run report instead of running the primitive.
    #[arg(long)]
    pub from_stats: Option<PathBuf>,
    /// Microbenchmark superstep counts.
    #[arg(long, default_value = "100,300,1000,3000")]
    pub microbench: String,
    /// Timing repeats for the overhead fits (fastest is kept).
    #[arg(long, default_value_t = 3)]
    pub repeat: usize,
    /// Report JSON destination; `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

/// Returns whether the comparison found no violation.
pub fn cmd_model(cmd: &ModelCmd) -> Result<bool> {
    let kind = cmd.prim.primitive;
    let g = cmd.graph.load_for(kind)?;
    let plan = cmd.part.plan(&g, cmd.graph.seed)?;
    let config = cmd.engine.config()?;
    let exec = config.execution;
    let n = plan.num_partitions();
    let repeat = cmd.repeat.max(1);

    let gstats = GraphStats::compute(&g, DEFAULT_DIAMETER_SOURCES, cmd.graph.seed)?;
    let metrics = PlanMetrics::from_plan(&plan);
    let source = cmd.prim.source_list(&g, cmd.graph.seed)?[0];

    let steps: Vec<usize> = crate::opts::parse_list(&cmd.microbench)?;
    let mut micro = Vec::with_capacity(steps.len());
    for &s in &steps {
        let best = (0..repeat)
            .map(|_| microbench_overhead(n, s, exec).map(|m| m.total_s))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        micro.push((s as f64, best));
    }
    let l = linear_fit(&micro).context("fitting the superstep overhead")?.slope;
    let g_per_record = if n > 1 {
        let samples = inflation_experiment(&plan, source, &[1, 2, 4, 8], repeat, Execution::Parallel)?;
        let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.records as f64, s.exchange_s)).collect();
        linear_fit(&pts).map(|f| f.slope).unwrap_or(0.0)
    } else {
        0.0
    };
    let w_unit = fit_w_unit(&g, source, exec)?;

    let record = match &cmd.from_stats {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let report: RunReport = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            if report.n != n || report.h.len() != n {
                anyhow::bail!("{} is for {} partitions, the plan has {n}", path.display(), report.n);
            }
            let factors = DataFactors {
                pr_iterations: report.s as f64,
                ..Default::default()
            };
            CostModelRecord {
                primitive: kind,
                n,
                communication: report.communication,
                metrics: metrics.clone(),
                predicted: predict(kind, &gstats, &metrics, factors),
                measured: measured_terms(&report, None, None),
                g: g_per_record,
                l,
                w_unit,
            }
        }
        None => {
            let (_, stats) = run_kind(kind, &plan, &cmd.prim.params(source), &config)?;
            record_for_run(kind, &stats, &gstats, &metrics, (g_per_record, l), w_unit)
        }
    };
    let report = compare(&record);
    write_out(&cmd.out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    Ok(report.violations.is_empty())
}
