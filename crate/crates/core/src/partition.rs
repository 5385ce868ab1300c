//! Vertex-to-partition assignment and construction of per-partition subgraphs.
//!
//! Partitions are edge cuts: each vertex is hosted by one partition together
//! with all of its outgoing arcs. Remote endpoints of those arcs get a local
//! proxy, either for every remote vertex ([`Duplication::DuplicateAll`], local
//! ID = global ID) or only for immediate remote neighbors
//! ([`Duplication::DuplicateOneHop`], locals renumbered first).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Csr;
use crate::{idx, vid, VertexId, INVALID_VERTEX};

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("number of partitions must be at least 1")]
    NoPartitions,
    #[error("bias {0} outside [0, 1]")]
    BiasOutOfRange(f64),
    #[error("assignment line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("assignment has {found} entries, graph has {expected} vertices")]
    WrongLength { expected: usize, found: usize },
    #[error("owner {owner} of vertex {vertex} is not below {num_partitions}")]
    OwnerOutOfRange {
        vertex: usize,
        owner: usize,
        num_partitions: usize,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Proxy-vertex strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Duplication {
    #[serde(rename = "all")]
    DuplicateAll,
    #[serde(rename = "onehop")]
    DuplicateOneHop,
}

impl fmt::Display for Duplication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Duplication::DuplicateAll => "all",
            Duplication::DuplicateOneHop => "onehop",
        })
    }
}

impl FromStr for Duplication {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Duplication::DuplicateAll),
            "onehop" | "1hop" => Ok(Duplication::DuplicateOneHop),
            other => Err(format!("unknown duplication `{other}` (expected all or onehop)")),
        }
    }
}

/// Owner partition of every global vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    owner: Vec<u32>,
    num_partitions: usize,
}

impl Assignment {
    pub fn new(owner: Vec<u32>, num_partitions: usize) -> Result<Self, PartitionError> {
        if num_partitions == 0 {
            return Err(PartitionError::NoPartitions);
        }
        if let Some((vertex, &o)) = owner
            .iter()
            .enumerate()
            .find(|(_, &o)| o as usize >= num_partitions)
        {
            return Err(PartitionError::OwnerOutOfRange {
                vertex,
                owner: o as usize,
                num_partitions,
            });
        }
        Ok(Assignment {
            owner,
            num_partitions,
        })
    }

    /// Everything on partition 0.
    pub fn single(num_vertices: usize) -> Self {
        Assignment {
            owner: vec![0; num_vertices],
            num_partitions: 1,
        }
    }

    #[inline]
    pub fn owner(&self, v: VertexId) -> usize {
        self.owner[idx(v)] as usize
    }

    pub fn owners(&self) -> &[u32] {
        &self.owner
    }

    pub fn num_partitions(&self) -> usize {
        self.num_partitions
    }

    pub fn num_vertices(&self) -> usize {
        self.owner.len()
    }

    /// Hosted vertex count per partition.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_partitions];
        for &o in &self.owner {
            sizes[o as usize] += 1;
        }
        sizes
    }
}

/// Uniform random owner for every vertex.
pub fn partition_random(num_vertices: usize, n: usize, seed: u64) -> Result<Assignment, PartitionError> {
    if n == 0 {
        return Err(PartitionError::NoPartitions);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let owner = (0..num_vertices).map(|_| rng.gen_range(0..n) as u32).collect();
    Assignment::new(owner, n)
}

/// Random assignment biased toward partitions that already hold a vertex's
/// neighbors.
///
/// Vertices are visited once in a seeded random order. Each vertex draws its
/// owner from `(1 - bias) * uniform + bias * (neighbor share)`, where the
/// neighbor share counts only already-assigned neighbors; a vertex with no
/// assigned neighbors draws uniformly. `bias = 0` is exactly
/// [`partition_random`]. There is no rebalancing.
pub fn partition_biased_random(
    g: &Csr,
    n: usize,
    seed: u64,
    bias: f64,
) -> Result<Assignment, PartitionError> {
    if n == 0 {
        return Err(PartitionError::NoPartitions);
    }
    if !(0.0..=1.0).contains(&bias) {
        return Err(PartitionError::BiasOutOfRange(bias));
    }
    if bias == 0.0 {
        return partition_random(g.num_vertices(), n, seed);
    }

    const UNASSIGNED: u32 = u32::MAX;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..g.num_vertices()).collect();
    order.shuffle(&mut rng);
    let mut owner = vec![UNASSIGNED; g.num_vertices()];
    let mut counts = vec![0usize; n];
    for v in order {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut total = 0usize;
        for &w in g.neighbors(vid(v)) {
            let o = owner[idx(w)];
            if o != UNASSIGNED {
                counts[o as usize] += 1;
                total += 1;
            }
        }
        let pick = if total == 0 {
            rng.gen_range(0..n)
        } else {
            let r: f64 = rng.gen();
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (j, &c) in counts.iter().enumerate() {
                acc += (1.0 - bias) / n as f64 + bias * c as f64 / total as f64;
                if r < acc {
                    pick = j;
                    break;
                }
            }
            pick
        };
        owner[v] = pick as u32;
    }
    Assignment::new(owner, n)
}

/// Parses an assignment file: one decimal owner per line, line `i` for vertex `i`.
pub fn parse_assignment(text: &str, num_vertices: usize) -> Result<Assignment, PartitionError> {
    let mut owner = Vec::with_capacity(num_vertices);
    for (i, raw) in text.lines().enumerate() {
        let s = raw.trim();
        let value: i64 = s.parse().map_err(|_| PartitionError::Malformed {
            line: i + 1,
            message: format!("`{s}` is not an integer"),
        })?;
        if value < 0 {
            return Err(PartitionError::Malformed {
                line: i + 1,
                message: format!("negative owner {value}"),
            });
        }
        let value = u32::try_from(value).map_err(|_| PartitionError::Malformed {
            line: i + 1,
            message: format!("owner {value} too large"),
        })?;
        owner.push(value);
    }
    if owner.len() != num_vertices {
        return Err(PartitionError::WrongLength {
            expected: num_vertices,
            found: owner.len(),
        });
    }
    let n = owner.iter().max().map_or(1, |&m| m as usize + 1);
    Assignment::new(owner, n)
}

/// Loads an externally produced assignment (e.g. a Metis partition file).
pub fn load_assignment(path: impl AsRef<Path>, num_vertices: usize) -> Result<Assignment, PartitionError> {
    parse_assignment(&std::fs::read_to_string(path)?, num_vertices)
}

pub fn write_assignment(a: &Assignment, mut out: impl std::io::Write) -> std::io::Result<()> {
    for o in a.owners() {
        writeln!(out, "{o}")?;
    }
    Ok(())
}

/// Vertex ID mapping between two ID spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConversionTable {
    Identity(usize),
    Explicit(Vec<VertexId>),
}

impl ConversionTable {
    /// Maps `v`, or `None` when it has no image.
    #[inline]
    pub fn get(&self, v: VertexId) -> Option<VertexId> {
        match self {
            ConversionTable::Identity(len) => (idx(v) < *len).then_some(v),
            ConversionTable::Explicit(table) => table
                .get(idx(v))
                .copied()
                .filter(|&x| x != INVALID_VERTEX),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ConversionTable::Identity(len) => *len,
            ConversionTable::Explicit(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Everything the workers need about the partitioned graph. Immutable and
/// shared by all workers.
#[derive(Clone, Debug)]
pub struct PartitionPlan {
    assignment: Assignment,
    duplication: Duplication,
    num_vertices: usize,
    num_edges: usize,
    subgraphs: Vec<Csr>,
    hosted: Vec<Vec<VertexId>>,
    local_to_global: Vec<ConversionTable>,
    global_to_local: Vec<ConversionTable>,
    borders: Vec<Vec<Vec<VertexId>>>,
}

/// Border sizes and edge cut of a plan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BorderMetrics {
    /// `pair[i][j] = |B_{i,j}|`.
    pub pair: Vec<Vec<usize>>,
    /// `per_partition[i] = |B_i| = sum_j |B_{i,j}|`.
    pub per_partition: Vec<usize>,
    pub total: usize,
    /// Undirected edges whose endpoints live on different partitions.
    pub edge_cut: usize,
}

/// Builds the per-partition subgraphs, conversion tables and borders.
pub fn build_partition_plan(
    g: &Csr,
    a: &Assignment,
    dup: Duplication,
) -> Result<PartitionPlan, PartitionError> {
    if a.num_vertices() != g.num_vertices() {
        return Err(PartitionError::WrongLength {
            expected: g.num_vertices(),
            found: a.num_vertices(),
        });
    }
    let n = a.num_partitions();
    let nv = g.num_vertices();

    let mut hosted: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for v in 0..nv {
        hosted[a.owner(vid(v))].push(vid(v));
    }

    let mut borders = vec![vec![Vec::new(); n]; n];
    for (i, locals) in hosted.iter().enumerate() {
        for &u in locals {
            for &v in g.neighbors(u) {
                let j = a.owner(v);
                if j != i {
                    borders[i][j].push(v);
                }
            }
        }
        for b in borders[i].iter_mut() {
            b.sort_unstable();
            b.dedup();
        }
    }

    let mut subgraphs = Vec::with_capacity(n);
    let mut local_to_global = Vec::with_capacity(n);
    let mut global_to_local = Vec::with_capacity(n);
    for i in 0..n {
        match dup {
            Duplication::DuplicateAll => {
                let mut row_offsets = Vec::with_capacity(nv + 1);
                let mut cols = Vec::new();
                let mut vals = g.edge_values().map(|_| Vec::new());
                row_offsets.push(0);
                for v in 0..nv {
                    let v = vid(v);
                    if a.owner(v) == i {
                        cols.extend_from_slice(g.neighbors(v));
                        if let (Some(out), Some(w)) = (vals.as_mut(), g.edge_values()) {
                            out.extend_from_slice(&w[g.edge_range(v)]);
                        }
                    }
                    row_offsets.push(cols.len());
                }
                subgraphs.push(Csr::from_parts(nv, row_offsets, cols, vals).expect("valid rows"));
                local_to_global.push(ConversionTable::Identity(nv));
                global_to_local.push(ConversionTable::Identity(nv));
            }
            Duplication::DuplicateOneHop => {
                let mut l2g: Vec<VertexId> = hosted[i].clone();
                let mut proxies: Vec<VertexId> = borders[i].iter().flatten().copied().collect();
                proxies.sort_unstable();
                l2g.extend(proxies);
                let mut g2l = vec![INVALID_VERTEX; nv];
                for (local, &gv) in l2g.iter().enumerate() {
                    g2l[idx(gv)] = vid(local);
                }
                let mut row_offsets = Vec::with_capacity(l2g.len() + 1);
                let mut cols = Vec::new();
                let mut vals = g.edge_values().map(|_| Vec::new());
                row_offsets.push(0);
                for &gv in &l2g {
                    if a.owner(gv) == i {
                        cols.extend(g.neighbors(gv).iter().map(|&w| g2l[idx(w)]));
                        if let (Some(out), Some(w)) = (vals.as_mut(), g.edge_values()) {
                            out.extend_from_slice(&w[g.edge_range(gv)]);
                        }
                    }
                    row_offsets.push(cols.len());
                }
                subgraphs.push(
                    Csr::from_parts(l2g.len(), row_offsets, cols, vals).expect("valid rows"),
                );
                local_to_global.push(ConversionTable::Explicit(l2g));
                global_to_local.push(ConversionTable::Explicit(g2l));
            }
        }
    }

    Ok(PartitionPlan {
        assignment: a.clone(),
        duplication: dup,
        num_vertices: nv,
        num_edges: g.num_edges(),
        subgraphs,
        hosted,
        local_to_global,
        global_to_local,
        borders,
    })
}

impl PartitionPlan {
    pub fn num_partitions(&self) -> usize {
        self.assignment.num_partitions()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn duplication(&self) -> Duplication {
        self.duplication
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn subgraph(&self, p: usize) -> &Csr {
        &self.subgraphs[p]
    }

    pub fn subgraphs(&self) -> &[Csr] {
        &self.subgraphs
    }

    /// Global IDs hosted by `p`, ascending (`L_p`).
    pub fn hosted(&self, p: usize) -> &[VertexId] {
        &self.hosted[p]
    }

    /// `|L_p|` for every partition.
    pub fn local_counts(&self) -> Vec<usize> {
        self.hosted.iter().map(Vec::len).collect()
    }

    /// `B_{i,j}` as ascending global IDs.
    pub fn border(&self, i: usize, j: usize) -> &[VertexId] {
        &self.borders[i][j]
    }

    pub fn local_to_global_table(&self, p: usize) -> &ConversionTable {
        &self.local_to_global[p]
    }

    pub fn global_to_local_table(&self, p: usize) -> &ConversionTable {
        &self.global_to_local[p]
    }

    #[inline]
    pub fn local_to_global(&self, p: usize, local: VertexId) -> VertexId {
        self.local_to_global[p]
            .get(local)
            .expect("local ID within the partition")
    }

    #[inline]
    pub fn global_to_local(&self, p: usize, global: VertexId) -> Option<VertexId> {
        self.global_to_local[p].get(global)
    }

    /// Owner of a vertex given by its local ID on partition `p`.
    #[inline]
    pub fn owner_of_local(&self, p: usize, local: VertexId) -> usize {
        match self.duplication {
            Duplication::DuplicateAll => self.assignment.owner(local),
            Duplication::DuplicateOneHop => {
                if idx(local) < self.hosted[p].len() {
                    p
                } else {
                    self.assignment.owner(self.local_to_global(p, local))
                }
            }
        }
    }

    /// Host partition and local ID there of a global vertex.
    pub fn host_of(&self, global: VertexId) -> (usize, VertexId) {
        let p = self.assignment.owner(global);
        (p, self.global_to_local(p, global).expect("hosted vertex is local"))
    }

    pub fn border_metrics(&self) -> BorderMetrics {
        let n = self.num_partitions();
        let pair: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).map(|j| self.borders[i][j].len()).collect())
            .collect();
        let per_partition: Vec<usize> = pair.iter().map(|row| row.iter().sum()).collect();
        let total = per_partition.iter().sum();

        let mut cut: Vec<(VertexId, VertexId)> = Vec::new();
        for p in 0..n {
            let sub = &self.subgraphs[p];
            for &u in &self.hosted[p] {
                let lu = self.global_to_local(p, u).expect("hosted");
                for &lv in sub.neighbors(lu) {
                    let v = self.local_to_global(p, lv);
                    if self.assignment.owner(v) != p {
                        cut.push((u.min(v), u.max(v)));
                    }
                }
            }
        }
        cut.sort_unstable();
        cut.dedup();
        BorderMetrics {
            pair,
            per_partition,
            total,
            edge_cut: cut.len(),
        }
    }

    /// Global arcs `(u, v)` stored on partition `p`.
    pub fn global_arcs(&self, p: usize) -> Vec<(VertexId, VertexId)> {
        let sub = &self.subgraphs[p];
        let mut out = Vec::with_capacity(sub.num_edges());
        for l in 0..sub.num_vertices() {
            let u = self.local_to_global(p, vid(l));
            for &lv in sub.neighbors(vid(l)) {
                out.push((u, self.local_to_global(p, lv)));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;

    fn halves(nv: usize) -> Assignment {
        Assignment::new((0..nv).map(|v| (2 * v / nv) as u32).collect(), 2).unwrap()
    }

    #[test]
    fn random_single_partition() {
        let a = partition_random(10, 1, 3).unwrap();
        assert!(a.owners().iter().all(|&o| o == 0));
        assert!(matches!(partition_random(4, 0, 0), Err(PartitionError::NoPartitions)));
    }

    #[test]
    fn random_sizes_sum() {
        let a = partition_random(4, 2, 7).unwrap();
        assert_eq!(a.sizes().iter().sum::<usize>(), 4);
        assert_eq!(a, partition_random(4, 2, 7).unwrap());
    }

    #[test]
    fn biased_zero_is_random() {
        let g = fixtures::grid(8, 8);
        assert_eq!(
            partition_biased_random(&g, 3, 5, 0.0).unwrap(),
            partition_random(64, 3, 5).unwrap()
        );
        assert!(matches!(
            partition_biased_random(&g, 3, 5, 1.5),
            Err(PartitionError::BiasOutOfRange(_))
        ));
    }

    #[test]
    fn biased_one_on_clique_collapses() {
        let g = fixtures::complete(4);
        for seed in 0..20 {
            let a = partition_biased_random(&g, 2, seed, 1.0).unwrap();
            assert!(a.owners().iter().all(|&o| o == a.owners()[0]), "seed {seed}");
        }
    }

    #[test]
    fn parse_assignment_file() {
        let a = parse_assignment("0\n0\n1\n1\n", 4).unwrap();
        assert_eq!(a.owners(), &[0, 0, 1, 1]);
        assert_eq!(a.num_partitions(), 2);
        assert!(matches!(
            parse_assignment("0\n0\n1\n", 4),
            Err(PartitionError::WrongLength { .. })
        ));
        assert!(matches!(
            parse_assignment("0\n-1\n1\n1\n", 4),
            Err(PartitionError::Malformed { line: 2, .. })
        ));
        assert!(parse_assignment("0\nx\n1\n1\n", 4).is_err());
    }

    #[test]
    fn p4_duplicate_all() {
        let g = fixtures::path(4);
        let plan = build_partition_plan(&g, &halves(4), Duplication::DuplicateAll).unwrap();
        let s0 = plan.subgraph(0);
        assert_eq!(s0.num_vertices(), 4);
        assert_eq!(s0.neighbors(0), &[1]);
        assert_eq!(s0.neighbors(1), &[0, 2]);
        assert_eq!(s0.degree(2), 0);
        assert_eq!(s0.degree(3), 0);
        assert_eq!(plan.global_to_local(0, 3), Some(3));
        assert_eq!(plan.local_counts(), vec![2, 2]);
    }

    #[test]
    fn p4_duplicate_one_hop() {
        let g = fixtures::path(4);
        let plan = build_partition_plan(&g, &halves(4), Duplication::DuplicateOneHop).unwrap();
        let s0 = plan.subgraph(0);
        assert_eq!(s0.num_vertices(), 3);
        assert_eq!(plan.local_to_global(0, 2), 2);
        assert_eq!(plan.global_to_local(0, 3), None);
        assert_eq!(s0.neighbors(1), &[0, 2]);
        // partition 1: locals {2,3} -> {0,1}, proxy for global 1 -> 2
        assert_eq!(plan.global_to_local(1, 2), Some(0));
        assert_eq!(plan.global_to_local(1, 1), Some(2));
        assert_eq!(plan.owner_of_local(1, 2), 0);
    }

    #[test]
    fn single_partition_is_identity() {
        let g = fixtures::grid(3, 4);
        for dup in [Duplication::DuplicateAll, Duplication::DuplicateOneHop] {
            let plan = build_partition_plan(&g, &Assignment::single(12), dup).unwrap();
            assert_eq!(plan.subgraph(0), &g);
            for v in 0..12 {
                assert_eq!(plan.global_to_local(0, v), Some(v));
            }
            let m = plan.border_metrics();
            assert_eq!((m.total, m.edge_cut), (0, 0));
        }
    }

    #[test]
    fn border_counts() {
        let p4 = build_partition_plan(&fixtures::path(4), &halves(4), Duplication::DuplicateAll)
            .unwrap()
            .border_metrics();
        assert_eq!(p4.pair, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(p4.edge_cut, 1);

        let k4 = build_partition_plan(&fixtures::complete(4), &halves(4), Duplication::DuplicateOneHop)
            .unwrap()
            .border_metrics();
        assert_eq!(k4.pair, vec![vec![0, 2], vec![2, 0]]);
        assert_eq!(k4.per_partition, vec![2, 2]);
        assert_eq!(k4.edge_cut, 4);
    }
}
