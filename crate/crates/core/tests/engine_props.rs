mod common;

use bspgraph::cost::{predict, DataFactors, PlanMetrics, PrimitiveKind};
use bspgraph::graph::fixtures;
use bspgraph::partition::build_partition_plan;
use bspgraph::primitives::{bc, bfs, cc, dobfs, pagerank, sssp, DEFAULT_DO_A, DEFAULT_DO_B};
use bspgraph::{reference, AllocationPolicy, Assignment, BufferRole, Csr, Duplication, EngineConfig, GraphStats, VertexId};
use proptest::prelude::*;

use common::{max_rel_diff, single};

const INF: u32 = u32::MAX;

fn case() -> impl Strategy<Value = (Csr, Assignment, Duplication)> {
    (2usize..40, 1usize..5).prop_flat_map(|(n, parts)| {
        (
            proptest::collection::vec((0..n as VertexId, 0..n as VertexId), 0..120),
            proptest::collection::vec(0..parts as u32, n),
            any::<u64>(),
            prop_oneof![Just(Duplication::DuplicateAll), Just(Duplication::DuplicateOneHop)],
        )
            .prop_map(move |(edges, owners, seed, dup)| {
                let g = Csr::build(n, &edges, None)
                    .unwrap()
                    .symmetrize_dedup()
                    .with_random_weights(0, 64, seed)
                    .unwrap();
                (g, Assignment::new(owners, parts).unwrap(), dup)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partitioned_matches_single((g, a, dup) in case()) {
        let plan = build_partition_plan(&g, &a, dup).unwrap();
        let one = single(&g);
        let cfg = EngineConfig::default();

        let (x, _) = bfs(&plan, 0, false, &cfg).unwrap();
        let (y, _) = bfs(&one, 0, false, &cfg).unwrap();
        prop_assert_eq!(&x.labels, &y.labels);
        prop_assert_eq!(&x.labels, &reference::bfs_levels(&g, 0));

        let (x, _) = sssp(&plan, 0, &cfg).unwrap();
        prop_assert_eq!(&x.dist, &reference::dijkstra(&g, 0));

        if dup == Duplication::DuplicateAll {
            let (x, _) = dobfs(&plan, 0, DEFAULT_DO_A, DEFAULT_DO_B, &cfg).unwrap();
            prop_assert_eq!(&x.labels, &y.labels);
            let (x, _) = cc(&plan, &cfg).unwrap();
            prop_assert_eq!(&x.labels, &reference::components(&g));
            let (x, _) = bc(&plan, 0, &cfg).unwrap();
            prop_assert!(max_rel_diff(&x.bc, &reference::brandes(&g, 0)) <= 1e-9);
        }

        let (x, _) = pagerank(&plan, 0.85, 1e-9, 50, &cfg).unwrap();
        let (y, _) = pagerank(&one, 0.85, 1e-9, 50, &cfg).unwrap();
        prop_assert!(max_rel_diff(&x.ranks, &y.ranks) <= 1e-9);
    }

    #[test]
    fn bfs_labels_are_consistent((g, a, dup) in case()) {
        let plan = build_partition_plan(&g, &a, dup).unwrap();
        let (out, _) = bfs(&plan, 0, true, &EngineConfig::default()).unwrap();
        let preds = out.preds.unwrap();
        prop_assert_eq!(out.labels[0], 0);
        for (u, v, _) in g.arcs() {
            let (lu, lv) = (out.labels[u as usize], out.labels[v as usize]);
            if lu != INF {
                prop_assert!(lv != INF && lv <= lu + 1, "arc {}->{}", u, v);
            }
        }
        for (v, &lv) in out.labels.iter().enumerate().skip(1) {
            if lv != INF {
                let p = preds[v] as usize;
                prop_assert_eq!(out.labels[p] + 1, lv);
                prop_assert!(g.neighbors(p as VertexId).contains(&(v as VertexId)));
            }
        }
    }

    #[test]
    fn sssp_is_a_relaxation_fixpoint((g, a, dup) in case()) {
        let plan = build_partition_plan(&g, &a, dup).unwrap();
        let (out, _) = sssp(&plan, 0, &EngineConfig::default()).unwrap();
        for u in 0..g.num_vertices() as VertexId {
            let du = out.dist[u as usize];
            if du == u64::MAX {
                continue;
            }
            for e in g.edge_range(u) {
                let v = g.col_indices()[e] as usize;
                prop_assert!(out.dist[v] <= du + g.weight(e) as u64);
            }
        }
    }

    #[test]
    fn cc_is_idempotent_on_the_quotient((g, a, _dup) in case()) {
        let plan = build_partition_plan(&g, &a, Duplication::DuplicateAll).unwrap();
        let cfg = EngineConfig::default();
        let (out, _) = cc(&plan, &cfg).unwrap();
        let n = g.num_vertices();
        let mut edges = Vec::new();
        for (u, v, _) in g.arcs() {
            let (cu, cv) = (out.labels[u as usize], out.labels[v as usize]);
            prop_assert_eq!(cu, cv);
            edges.push((cu, cv));
        }
        let q = Csr::build(n, &edges, None).unwrap().symmetrize_dedup();
        let qa = Assignment::new(a.owners().to_vec(), a.num_partitions()).unwrap();
        let qplan = build_partition_plan(&q, &qa, Duplication::DuplicateAll).unwrap();
        let (again, _) = cc(&qplan, &cfg).unwrap();
        prop_assert_eq!(again.labels, (0..n as VertexId).collect::<Vec<_>>());
    }

    #[test]
    fn policies_agree((g, a, dup) in case()) {
        let plan = build_partition_plan(&g, &a, dup).unwrap();
        let (base, just) = bfs(&plan, 0, false, &EngineConfig::with_policy(AllocationPolicy::JustEnough)).unwrap();
        let (out, max) = bfs(&plan, 0, false, &EngineConfig::with_policy(AllocationPolicy::Maximum)).unwrap();
        prop_assert_eq!(&out.labels, &base.labels);
        prop_assert_eq!(max.reallocs(), 0);
        prop_assert_eq!(just.supersteps, max.supersteps);
        prop_assert_eq!(&just.transmissions, &max.transmissions);
        for role in BufferRole::ALL {
            prop_assert!(just.role_peak(role) <= max.role_peak(role), "{:?}", role);
        }

        let factors = just.sizing_factors();
        let (out, fixed) = bfs(&plan, 0, false, &EngineConfig::with_policy(AllocationPolicy::FixedPrealloc(factors))).unwrap();
        prop_assert_eq!(&out.labels, &base.labels);
        prop_assert_eq!(fixed.reallocs(), 0);
        let (out, _) = bfs(&plan, 0, false, &EngineConfig::with_policy(AllocationPolicy::PreallocFused(Default::default()))).unwrap();
        prop_assert_eq!(&out.labels, &base.labels);
    }

    #[test]
    fn sequential_matches_parallel((g, a, dup) in case()) {
        let plan = build_partition_plan(&g, &a, dup).unwrap();
        let (x, xs) = sssp(&plan, 0, &EngineConfig::default()).unwrap();
        let (y, ys) = sssp(&plan, 0, &EngineConfig::sequential()).unwrap();
        prop_assert_eq!(x.dist, y.dist);
        prop_assert_eq!(xs.transmissions, ys.transmissions);
        prop_assert_eq!(xs.supersteps, ys.supersteps);
    }
}

#[test]
fn just_enough_starts_from_nothing() {
    let g = fixtures::grid(8, 8);
    let (_, stats) = bfs(&single(&g), 0, false, &EngineConfig::default()).unwrap();
    assert!(stats.role_reallocs(BufferRole::AdvanceOutput) > 0);
    assert_eq!(AllocationPolicy::JustEnough.initial_capacity(BufferRole::FilterOutput, 64, 224), 0);
}

#[test]
fn dobfs_examines_fewer_edges_after_switching() {
    let g = fixtures::rmat(12, 16, 1);
    let cfg = EngineConfig::default();
    for n in [1, 2, 4] {
        let plan = common::plan(&g, n, common::Partitioner::Random, Duplication::DuplicateAll);
        let (d, ds) = dobfs(&plan, 0, DEFAULT_DO_A, DEFAULT_DO_B, &cfg).unwrap();
        let (b, bs) = bfs(&plan, 0, false, &cfg).unwrap();
        assert_eq!(d.labels, b.labels);
        assert!(d.directions.contains(&bspgraph::primitives::Direction::Backward), "n={n}");
        assert!(ds.edges_examined <= bs.edges_examined, "n={n}: {} > {}", ds.edges_examined, bs.edges_examined);
    }
}

#[test]
fn predict_is_pure() {
    let g = fixtures::rmat(10, 8, 3);
    let stats = GraphStats::compute(&g, 8, 3).unwrap();
    let plan = common::plan(&g, 3, common::Partitioner::Random, Duplication::DuplicateAll);
    let m = PlanMetrics::from_plan(&plan);
    for kind in PrimitiveKind::ALL {
        let f = DataFactors::default();
        assert_eq!(predict(kind, &stats, &m, f), predict(kind, &stats, &m, f), "{kind}");
    }
}

#[test]
fn fixture_volumes_are_exact() {
    let g = fixtures::path(4);
    let a = Assignment::new(vec![0, 0, 1, 1], 2).unwrap();
    let plan = build_partition_plan(&g, &a, Duplication::DuplicateAll).unwrap();
    let cfg = EngineConfig::default();

    let (_, s) = bfs(&plan, 0, false, &cfg).unwrap();
    assert_eq!((s.supersteps, s.h_total()), (4, 2));
    assert_eq!(s.transmissions, vec![vec![0, 1], vec![1, 0]]);

    let (_, s) = dobfs(&plan, 0, DEFAULT_DO_A, DEFAULT_DO_B, &cfg).unwrap();
    assert!((0..2).all(|i| s.h_from(i) <= 4));

    let (_, s) = pagerank(&plan, 0.85, 1e-300, 5, &cfg).unwrap();
    assert_eq!(s.supersteps, 5);
    assert_eq!(s.h_total(), 5 * 2);
}
