mod bench;
mod model;
mod opts;
mod run;
mod validate;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use bspgraph::graph::write_edge_list;
use bspgraph::partition::{build_partition_plan, write_assignment};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use opts::{write_out, GraphOpts, PartOpts};

/// Bulk-synchronous graph analytics over edge-cut partitions.
#[derive(Parser, Debug)]
#[command(name = "bspgraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write an R-MAT graph (or a preprocessed copy of a file) as an edge list.
    Generate(GenerateCmd),
    /// Partition a graph, write the assignment and print border metrics.
    Partition(PartitionCmd),
    /// Run a primitive and emit stats JSON.
    Run(run::RunCmd),
    /// Check a partitioned run against one partition and a sequential oracle.
    Validate(validate::ValidateCmd),
    /// Sweep partitions, partitioners and policies; CSV out.
    Bench(bench::BenchCmd),
    /// Predict costs, fit overheads and compare with a measured run.
    Model(model::ModelCmd),
}

#[derive(Args, Debug)]
struct GenerateCmd {
    #[command(flatten)]
    graph: GraphOpts,
    /// Edge list destination; `-` for stdout.
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PartitionCmd {
    #[command(flatten)]
    graph: GraphOpts,
    #[command(flatten)]
    part: PartOpts,
    /// Assignment file destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_generate(cmd: &GenerateCmd) -> Result<()> {
    let g = cmd.graph.load()?;
    if cmd.out.as_os_str() == "-" {
        write_edge_list(&g, std::io::stdout().lock())?;
    } else {
        let f = File::create(&cmd.out).with_context(|| format!("creating {}", cmd.out.display()))?;
        write_edge_list(&g, BufWriter::new(f))?;
    }
    Ok(())
}

fn cmd_partition(cmd: &PartitionCmd) -> Result<()> {
    let g = cmd.graph.load()?;
    let a = cmd.part.assignment(&g, cmd.graph.seed)?;
    if let Some(path) = &cmd.out {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_assignment(&a, BufWriter::new(f))?;
    }
    let plan = build_partition_plan(&g, &a, cmd.part.dup.into())?;
    let m = plan.border_metrics();
    let report = json!({
        "schema": 1,
        "partitioner": cmd.part.partitioner.label(),
        "n": plan.num_partitions(),
        "sizes": a.sizes(),
        "border": m.per_partition,
        "border_pairs": m.pair,
        "border_total": m.total,
        "edge_cut": m.edge_cut,
    });
    write_out(std::path::Path::new("-"), &(serde_json::to_string_pretty(&report)? + "\n"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Generate(c) => cmd_generate(c).map(|()| true),
        Command::Partition(c) => cmd_partition(c).map(|()| true),
        Command::Run(c) => run::cmd_run(c),
        Command::Validate(c) => validate::cmd_validate(c),
        Command::Bench(c) => bench::cmd_bench(c).map(|()| true),
        Command::Model(c) => model::cmd_model(c),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
