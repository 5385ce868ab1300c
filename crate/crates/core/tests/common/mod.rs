#![allow(dead_code)]

use bspgraph::graph::{fixtures, DEFAULT_WEIGHT_RANGE};
use bspgraph::partition::{build_partition_plan, partition_biased_random, partition_random};
use bspgraph::{Assignment, Csr, Duplication, PartitionPlan};

pub const PART_SEED: u64 = 7;
pub const WEIGHT_SEED: u64 = 11;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Partitioner {
    Random,
    Biased(f64),
}

impl Partitioner {
    pub fn assign(self, g: &Csr, n: usize, seed: u64) -> Assignment {
        match self {
            Partitioner::Random => partition_random(g.num_vertices(), n, seed).unwrap(),
            Partitioner::Biased(b) => partition_biased_random(g, n, seed, b).unwrap(),
        }
    }
}

pub const PARTITIONERS: [Partitioner; 2] = [Partitioner::Random, Partitioner::Biased(1.0)];
pub const DUPLICATIONS: [Duplication; 2] = [Duplication::DuplicateAll, Duplication::DuplicateOneHop];
pub const PART_COUNTS: [usize; 5] = [1, 2, 3, 4, 8];

/// The fixed graph suite, weighted so every primitive can run on it.
pub fn suite() -> Vec<(&'static str, Csr)> {
    let graphs = vec![
        ("p4", fixtures::path(4)),
        ("star5", fixtures::star(5)),
        ("triangle+isolated", fixtures::triangle_plus_isolated()),
        ("rmat12", fixtures::rmat(12, 16, 1)),
        ("grid32", fixtures::grid(32, 32)),
    ];
    graphs
        .into_iter()
        .map(|(name, g)| {
            let (lo, hi) = DEFAULT_WEIGHT_RANGE;
            (name, g.with_random_weights(lo, hi, WEIGHT_SEED).unwrap())
        })
        .collect()
}

/// Just the small fixtures, for quick property runs.
pub fn small_suite() -> Vec<(&'static str, Csr)> {
    suite().into_iter().filter(|(name, _)| !name.starts_with("rmat")).collect()
}

pub fn plan(g: &Csr, n: usize, part: Partitioner, dup: Duplication) -> PartitionPlan {
    build_partition_plan(g, &part.assign(g, n, PART_SEED), dup).unwrap()
}

pub fn single(g: &Csr) -> PartitionPlan {
    build_partition_plan(g, &Assignment::single(g.num_vertices()), Duplication::DuplicateAll).unwrap()
}

/// Largest relative difference, treating values within `1e-12` as equal.
pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = (x - y).abs();
            if d <= 1e-12 {
                0.0
            } else {
                d / x.abs().max(y.abs())
            }
        })
        .fold(0.0, f64::max)
}
