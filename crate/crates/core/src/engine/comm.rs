//! Frontier splitting, packaging, exchange and merging.

use super::{Communication, EngineError, Primitive};
use crate::frontier::{BufferRole, CapacityError, Frontier, MemoryPool};
use crate::partition::PartitionPlan;
use crate::VertexId;

/// Remote vertices bound for one peer, in the peer's local ID space, with
/// their associates as parallel sequences.
#[derive(Clone, Debug, PartialEq)]
pub struct MessagePackage<V> {
    pub src: usize,
    pub dest: usize,
    pub iteration: usize,
    pub vertices: Vec<VertexId>,
    pub vertex_associates: Vec<Vec<VertexId>>,
    pub value_associates: Vec<Vec<V>>,
}

impl<V: Copy> MessagePackage<V> {
    pub fn empty(src: usize, dest: usize, iteration: usize, num_vertex: usize, num_value: usize) -> Self {
        MessagePackage {
            src,
            dest,
            iteration,
            vertices: Vec::new(),
            vertex_associates: vec![Vec::new(); num_vertex],
            value_associates: vec![Vec::new(); num_value],
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Bytes per record: the vertex ID plus its associates.
    pub fn record_bytes(num_vertex: usize, num_value: usize) -> usize {
        (1 + num_vertex) * std::mem::size_of::<VertexId>() + num_value * std::mem::size_of::<V>()
    }

    /// Overwrites `self` with a copy of `other`, reusing storage.
    pub(crate) fn copy_from(&mut self, other: &MessagePackage<V>) {
        self.src = other.src;
        self.dest = other.dest;
        self.iteration = other.iteration;
        self.vertices.clear();
        self.vertices.extend_from_slice(&other.vertices);
        self.vertex_associates.resize_with(other.vertex_associates.len(), Vec::new);
        for (mine, theirs) in self.vertex_associates.iter_mut().zip(&other.vertex_associates) {
            mine.clear();
            mine.extend_from_slice(theirs);
        }
        self.value_associates.resize_with(other.value_associates.len(), Vec::new);
        for (mine, theirs) in self.value_associates.iter_mut().zip(&other.value_associates) {
            mine.clear();
            mine.extend_from_slice(theirs);
        }
    }

    pub(crate) fn clear(&mut self) {
        self.vertices.clear();
        self.vertex_associates.iter_mut().for_each(Vec::clear);
        self.value_associates.iter_mut().for_each(Vec::clear);
    }
}

/// Result of [`split_frontier`]; `remote[p]` is always empty.
#[derive(Clone, Debug)]
pub struct SplitFrontier {
    pub local: Frontier,
    pub remote: Vec<Frontier>,
}

/// Routes each output vertex to its host: local vertices stay, the rest go
/// to the owning peer. Under broadcast the whole frontier stays local and is
/// also replicated to every peer. Order follows the input.
pub fn split_frontier(out: &[VertexId], plan: &PartitionPlan, p: usize, comm: Communication) -> SplitFrontier {
    let mut pool = MemoryPool::unlimited();
    let mut local = Frontier::new(BufferRole::Queue);
    let mut remote = vec![Frontier::new(BufferRole::Outbox); plan.num_partitions()];
    split_into(out, plan, p, comm, &mut local, &mut remote, &mut pool).expect("unlimited pool");
    SplitFrontier { local, remote }
}

pub(crate) fn split_into(
    out: &[VertexId],
    plan: &PartitionPlan,
    p: usize,
    comm: Communication,
    local: &mut Frontier,
    remote: &mut [Frontier],
    pool: &mut MemoryPool,
) -> Result<(), CapacityError> {
    for r in remote.iter_mut() {
        r.clear();
    }
    match comm {
        Communication::Selective => {
            let mut counts = vec![0usize; remote.len()];
            for &v in out {
                counts[plan.owner_of_local(p, v)] += 1;
            }
            local.ensure_capacity(local.len() + counts[p], pool)?;
            for (q, r) in remote.iter_mut().enumerate() {
                if q != p {
                    r.ensure_capacity(counts[q], pool)?;
                }
            }
            for &v in out {
                let q = plan.owner_of_local(p, v);
                if q == p {
                    local.push(v);
                } else {
                    remote[q].push(v);
                }
            }
        }
        Communication::Broadcast => {
            local.ensure_capacity(local.len() + out.len(), pool)?;
            local.extend_from_slice(out);
            for (q, r) in remote.iter_mut().enumerate() {
                if q != p {
                    r.ensure_capacity(out.len(), pool)?;
                    r.extend_from_slice(out);
                }
            }
        }
    }
    Ok(())
}

/// Packages a remote sub-frontier of `p` for peer `q`: drops vertices the
/// primitive suppresses, converts IDs to `q`'s local space and gathers the
/// associates. Each record is repeated `inflate` times.
#[allow(clippy::too_many_arguments)]
pub fn package_remote<P: Primitive>(
    remote: &[VertexId],
    plan: &PartitionPlan,
    p: usize,
    q: usize,
    prim: &P,
    state: &mut P::State,
    iteration: usize,
    inflate: usize,
) -> Result<MessagePackage<P::Value>, EngineError> {
    let kv = prim.num_vertex_associates();
    let kval = prim.num_value_associates();
    let mut pkg = MessagePackage::empty(p, q, iteration, kv, kval);
    let mut vbuf = vec![0 as VertexId; kv];
    let mut valbuf = vec![P::Value::default(); kval];
    for &v in remote {
        if !prim.presend(state, q, v) {
            continue;
        }
        let global = plan.local_to_global(p, v);
        let there = plan.global_to_local(q, global).ok_or(EngineError::ConversionMiss {
            global: global as u64,
            dest: q,
        })?;
        prim.gather(state, v, &mut vbuf, &mut valbuf);
        for _ in 0..inflate.max(1) {
            pkg.vertices.push(there);
            for (seq, &a) in pkg.vertex_associates.iter_mut().zip(&vbuf) {
                seq.push(a);
            }
            for (seq, &a) in pkg.value_associates.iter_mut().zip(&valbuf) {
                seq.push(a);
            }
        }
    }
    Ok(pkg)
}

/// Delivers every package to its destination. Returns one inbox per
/// partition, ordered by source, and adds package lengths to `h[src][dest]`.
pub fn exchange<V>(packages: Vec<MessagePackage<V>>, n: usize, h: &mut [Vec<u64>]) -> Vec<Vec<MessagePackage<V>>> {
    let mut inboxes: Vec<Vec<MessagePackage<V>>> = (0..n).map(|_| Vec::new()).collect();
    for pkg in packages {
        h[pkg.src][pkg.dest] += pkg.vertices.len() as u64;
        let dest = pkg.dest;
        inboxes[dest].push(pkg);
    }
    for inbox in &mut inboxes {
        inbox.sort_by_key(|pkg| (pkg.iteration, pkg.src));
    }
    inboxes
}

/// Combines every record of `pkg` into `state`, calling `accept` for each
/// vertex the primitive accepted. Returns the number of combine operations.
pub fn merge_received<P: Primitive>(
    prim: &P,
    state: &mut P::State,
    pkg: &MessagePackage<P::Value>,
    mut accept: impl FnMut(VertexId),
) -> usize {
    let mut vbuf = vec![0 as VertexId; pkg.vertex_associates.len()];
    let mut valbuf = vec![P::Value::default(); pkg.value_associates.len()];
    for (i, &v) in pkg.vertices.iter().enumerate() {
        for (slot, seq) in vbuf.iter_mut().zip(&pkg.vertex_associates) {
            *slot = seq[i];
        }
        for (slot, seq) in valbuf.iter_mut().zip(&pkg.value_associates) {
            *slot = seq[i];
        }
        if prim.combine(state, v, &vbuf, &valbuf) {
            accept(v);
        }
    }
    pkg.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;
    use crate::partition::{build_partition_plan, Assignment, Duplication};

    fn p4_plan(dup: Duplication) -> PartitionPlan {
        let a = Assignment::new(vec![0, 0, 1, 1], 2).unwrap();
        build_partition_plan(&fixtures::path(4), &a, dup).unwrap()
    }

    #[test]
    fn split_selective_p4() {
        let plan = p4_plan(Duplication::DuplicateAll);
        let s = split_frontier(&[1, 2], &plan, 0, Communication::Selective);
        assert_eq!(s.local.as_slice(), &[1]);
        assert_eq!(s.remote[1].as_slice(), &[2]);
        assert!(s.remote[0].is_empty());
    }

    #[test]
    fn split_single_partition() {
        let g = fixtures::path(4);
        let plan = build_partition_plan(&g, &Assignment::single(4), Duplication::DuplicateAll).unwrap();
        let s = split_frontier(&[3, 0, 3], &plan, 0, Communication::Selective);
        assert_eq!(s.local.as_slice(), &[3, 0, 3]);
        assert_eq!(s.remote.len(), 1);
        assert!(s.remote[0].is_empty());
    }

    #[test]
    fn split_broadcast_replicates() {
        let g = fixtures::path(6);
        let a = Assignment::new(vec![0, 0, 1, 1, 2, 2], 3).unwrap();
        let plan = build_partition_plan(&g, &a, Duplication::DuplicateAll).unwrap();
        let s = split_frontier(&[0, 2, 5], &plan, 0, Communication::Broadcast);
        assert_eq!(s.remote[1].len(), 3);
        assert_eq!(s.remote[2].len(), 3);
        assert_eq!(s.local.len(), 3);
    }

    #[test]
    fn exchange_counts() {
        let mut h = vec![vec![0u64; 2]; 2];
        let mut p: MessagePackage<u32> = MessagePackage::empty(0, 1, 0, 0, 0);
        p.vertices = vec![1, 2, 3];
        let e: MessagePackage<u32> = MessagePackage::empty(1, 0, 0, 0, 0);
        let inboxes = exchange(vec![p.clone(), e], 2, &mut h);
        assert_eq!(h, vec![vec![0, 3], vec![0, 0]]);
        assert_eq!(inboxes[1], vec![p]);
        assert!(inboxes[0][0].is_empty());

        let none: Vec<MessagePackage<u32>> = Vec::new();
        exchange(none, 2, &mut h);
        assert_eq!(h[0][1], 3);
    }
}
