use bspgraph::graph::fixtures;
use bspgraph::partition::{build_partition_plan, partition_random};
use bspgraph::primitives::{bfs, cc, pagerank, sssp};
use bspgraph::{Duplication, EngineConfig, Execution, PartitionPlan};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn plans() -> Vec<(usize, PartitionPlan)> {
    let g = fixtures::rmat(12, 16, 1).with_random_weights(0, 64, 11).unwrap();
    [1, 2, 4]
        .into_iter()
        .map(|n| {
            let a = partition_random(g.num_vertices(), n, 7).unwrap();
            (n, build_partition_plan(&g, &a, Duplication::DuplicateAll).unwrap())
        })
        .collect()
}

fn engine(c: &mut Criterion) {
    let plans = plans();
    for (name, run) in [
        ("bfs", (|p, c| drop(bfs(p, 0, false, c).unwrap())) as fn(&PartitionPlan, &EngineConfig)),
        ("sssp", |p, c| drop(sssp(p, 0, c).unwrap())),
        ("cc", |p, c| drop(cc(p, c).unwrap())),
        ("pr", |p, c| drop(pagerank(p, 0.85, 1e-6, 20, c).unwrap())),
    ] {
        let mut group = c.benchmark_group(name);
        group.sample_size(10);
        for (n, plan) in &plans {
            for exec in [Execution::Parallel, Execution::Sequential] {
                let config = EngineConfig {
                    execution: exec,
                    ..Default::default()
                };
                group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), n), plan, |b, plan| {
                    b.iter(|| run(plan, &config))
                });
            }
        }
        group.finish();
    }
}

criterion_group!(benches, engine);
criterion_main!(benches);
