use bspgraph::graph::fixtures;
use bspgraph::partition::{build_partition_plan, partition_biased_random, partition_random};
use bspgraph::{Assignment, Csr, Duplication, VertexId};
use proptest::prelude::*;

fn graph_and_assignment() -> impl Strategy<Value = (Csr, Assignment)> {
    (1usize..30, 1usize..6).prop_flat_map(|(n, parts)| {
        (
            proptest::collection::vec((0..n as VertexId, 0..n as VertexId), 0..80),
            proptest::collection::vec(0..parts as u32, n),
        )
            .prop_map(move |(edges, owners)| {
                let g = Csr::build(n, &edges, None).unwrap().symmetrize_dedup();
                (g, Assignment::new(owners, parts).unwrap())
            })
    })
}

fn dup() -> impl Strategy<Value = Duplication> {
    prop_oneof![Just(Duplication::DuplicateAll), Just(Duplication::DuplicateOneHop)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn plan_invariants((g, a) in graph_and_assignment(), d in dup()) {
        let plan = build_partition_plan(&g, &a, d).unwrap();
        let n = plan.num_partitions();
        prop_assert_eq!(plan.local_counts().iter().sum::<usize>(), g.num_vertices());
        let mut hosted: Vec<VertexId> = (0..n).flat_map(|p| plan.hosted(p).to_vec()).collect();
        hosted.sort_unstable();
        prop_assert_eq!(hosted, (0..g.num_vertices() as VertexId).collect::<Vec<_>>());
        prop_assert_eq!((0..n).map(|p| plan.subgraph(p).num_edges()).sum::<usize>(), g.num_edges());

        let mut arcs: Vec<(VertexId, VertexId)> = (0..n).flat_map(|p| plan.global_arcs(p)).collect();
        arcs.sort_unstable();
        let mut want: Vec<(VertexId, VertexId)> = g.arcs().map(|(u, v, _)| (u, v)).collect();
        want.sort_unstable();
        prop_assert_eq!(arcs, want);

        for p in 0..n {
            let sub = plan.subgraph(p);
            for l in 0..sub.num_vertices() as VertexId {
                let gl = plan.local_to_global(p, l);
                prop_assert_eq!(plan.global_to_local(p, gl), Some(l));
                if a.owner(gl) != p {
                    prop_assert_eq!(sub.degree(l), 0, "proxy {} on {} has out-edges", gl, p);
                }
            }
            match d {
                Duplication::DuplicateAll => {
                    prop_assert_eq!(sub.num_vertices(), g.num_vertices());
                    for v in 0..g.num_vertices() as VertexId {
                        prop_assert_eq!(plan.local_to_global(p, v), v);
                    }
                }
                Duplication::DuplicateOneHop => {
                    let locals = plan.hosted(p).len();
                    let proxies: usize = (0..n).map(|j| plan.border(p, j).len()).sum();
                    prop_assert_eq!(sub.num_vertices(), locals + proxies);
                    for l in 0..locals as VertexId {
                        prop_assert_eq!(a.owner(plan.local_to_global(p, l)), p);
                    }
                }
            }
        }

        let m = plan.border_metrics();
        for i in 0..n {
            for j in 0..n {
                let cut_ij = plan
                    .global_arcs(i)
                    .iter()
                    .filter(|&&(u, v)| a.owner(u) == i && a.owner(v) == j && i != j)
                    .count();
                prop_assert!(m.pair[i][j] <= cut_ij);
            }
        }
    }

    #[test]
    fn plan_is_deterministic((g, a) in graph_and_assignment(), d in dup()) {
        let x = build_partition_plan(&g, &a, d).unwrap();
        let y = build_partition_plan(&g, &a, d).unwrap();
        prop_assert_eq!(x.border_metrics(), y.border_metrics());
        for p in 0..x.num_partitions() {
            prop_assert_eq!(x.subgraph(p), y.subgraph(p));
            prop_assert_eq!(x.global_arcs(p), y.global_arcs(p));
        }
    }

    #[test]
    fn biased_is_deterministic(seed in any::<u64>(), bias in 0.0f64..=1.0) {
        let g = fixtures::grid(6, 6);
        let a = partition_biased_random(&g, 3, seed, bias).unwrap();
        let b = partition_biased_random(&g, 3, seed, bias).unwrap();
        prop_assert_eq!(a.owners(), b.owners());
    }
}

#[test]
fn random_partitions_are_balanced() {
    let nv = 1 << 12;
    let balanced = (0..10u64)
        .filter(|&seed| {
            let a = partition_random(nv, 4, seed).unwrap();
            let max = *a.sizes().iter().max().unwrap();
            (max as f64) <= 1.15 * nv as f64 / 4.0
        })
        .count();
    assert!(balanced >= 9, "{balanced}/10 seeds balanced");
}

#[test]
fn biased_clique_joins_first_vertex() {
    let g = fixtures::complete(4);
    for seed in 0..20 {
        let a = partition_biased_random(&g, 2, seed, 1.0).unwrap();
        assert!(a.owners().iter().all(|&o| o == a.owners()[0]), "seed {seed}");
    }
}
