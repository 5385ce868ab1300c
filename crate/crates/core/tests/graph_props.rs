use std::collections::VecDeque;

use bspgraph::graph::{approx_diameter, rmat_generate, sample_sources};
use bspgraph::{Csr, VertexId};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn arcs(max_n: usize, max_m: usize) -> impl Strategy<Value = (usize, Vec<(VertexId, VertexId)>, Vec<u32>)> {
    (1..max_n).prop_flat_map(move |n| {
        (0..max_m).prop_flat_map(move |m| {
            (
                Just(n),
                proptest::collection::vec((0..n as VertexId, 0..n as VertexId), m),
                proptest::collection::vec(0u32..10, m),
            )
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn csr_invariants((n, edges, w) in arcs(30, 80)) {
        let g = Csr::build(n, &edges, Some(&w)).unwrap();
        let ro = g.row_offsets();
        prop_assert_eq!(ro[0], 0);
        prop_assert!(ro.windows(2).all(|p| p[0] <= p[1]));
        prop_assert_eq!(ro[n], g.num_edges());
        prop_assert_eq!(g.num_edges(), edges.len());
        prop_assert!(g.col_indices().iter().all(|&v| (v as usize) < n));
    }

    #[test]
    fn build_extract_fixed_point((n, edges, w) in arcs(30, 80)) {
        let g = Csr::build(n, &edges, Some(&w)).unwrap();
        let (e2, w2) = g.to_edge_list();
        let h = Csr::build(n, &e2, w2.as_deref()).unwrap();
        prop_assert_eq!(g, h);
    }

    #[test]
    fn symmetrize_properties((n, edges, w) in arcs(30, 80)) {
        let g = Csr::build(n, &edges, Some(&w)).unwrap().symmetrize_dedup();
        prop_assert_eq!(g.num_edges() % 2, 0);
        prop_assert!(g.is_symmetric());
        for u in 0..n as VertexId {
            let nb = g.neighbors(u);
            prop_assert!(nb.windows(2).all(|p| p[0] < p[1]), "row {} sorted and unique", u);
            prop_assert!(!nb.contains(&u));
            for e in g.edge_range(u) {
                let v = g.col_indices()[e];
                let back = g.find_arc(v, u).expect("reverse arc");
                prop_assert_eq!(g.weight(e), g.weight(back));
            }
        }
        prop_assert_eq!(g.symmetrize_dedup(), g);
    }

    #[test]
    fn rmat_is_deterministic(scale in 1u32..8, ef in 1usize..8, seed in any::<u64>()) {
        let a = rmat_generate(scale, ef, [0.57, 0.19, 0.19, 0.05], seed).unwrap();
        prop_assert_eq!(a.len(), (1usize << scale) * ef);
        prop_assert!(a.iter().all(|&(u, v)| (u as usize) < 1 << scale && (v as usize) < 1 << scale));
        prop_assert_eq!(a, rmat_generate(scale, ef, [0.57, 0.19, 0.19, 0.05], seed).unwrap());
    }
}

#[test]
fn uniform_rmat_passes_chi_square() {
    // scale 10 with 2^10 * 98 ≈ 10^5 insertions; cells are 32x32 blocks of the
    // adjacency matrix, so each holds about 98 edges.
    let edges = rmat_generate(10, 98, [0.25; 4], 2024).unwrap();
    let mut cells = vec![0f64; 1024];
    for &(u, v) in &edges {
        cells[((u as usize >> 5) << 5) | (v as usize >> 5)] += 1.0;
    }
    let expected = edges.len() as f64 / cells.len() as f64;
    let stat: f64 = cells.iter().map(|&c| (c - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new(cells.len() as f64 - 1.0).unwrap().cdf(stat);
    assert!(p > 0.01, "chi-square {stat:.1}, p = {p:.4}");

    let mut src = vec![0f64; 1024];
    for &(u, _) in &edges {
        src[u as usize] += 1.0;
    }
    let stat: f64 = src.iter().map(|&c| (c - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new(1023.0).unwrap().cdf(stat);
    assert!(p > 0.01, "source marginal chi-square {stat:.1}, p = {p:.4}");
}

fn ecc(g: &Csr, s: VertexId) -> usize {
    let mut d = vec![usize::MAX; g.num_vertices()];
    d[s as usize] = 0;
    let mut q = VecDeque::from([s]);
    let mut far = 0;
    while let Some(u) = q.pop_front() {
        far = far.max(d[u as usize]);
        for &v in g.neighbors(u) {
            if d[v as usize] == usize::MAX {
                d[v as usize] = d[u as usize] + 1;
                q.push_back(v);
            }
        }
    }
    far
}

#[test]
fn sampled_diameter_matches_brute_force() {
    let edges = rmat_generate(10, 16, [0.57, 0.19, 0.19, 0.05], 7).unwrap();
    let g = Csr::build(1024, &edges, None).unwrap().symmetrize_dedup();
    let sources = sample_sources(g.num_vertices(), 16, 7);
    let brute = sources.iter().map(|&s| ecc(&g, s)).max().unwrap();
    assert_eq!(approx_diameter(&g, 16, 7).unwrap(), brute);
    let all = (0..g.num_vertices() as VertexId).map(|s| ecc(&g, s)).max().unwrap();
    assert!(brute <= all);
}
