use std::time::Instant;

use super::comm::{split_into, MessagePackage};
use super::stats::{BufferStats, IterationStats, RunStats};
use super::{
    exchange, merge_received, package_remote, EngineConfig, EngineError, GlobalView, IterationCtx, PartitionView,
    Primitive, Reduce, StampSet,
};
use crate::frontier::{filter_output_bound, BufferRole, Frontier, MemoryPool};
use crate::par::map_workers;
use crate::partition::PartitionPlan;
use crate::VertexId;

/// Outgoing packages and the superstep report of one worker.
type Packaged<P> = (Vec<MessagePackage<<P as Primitive>::Value>>, <P as Primitive>::Report);

struct Inbox<V> {
    pkg: MessagePackage<V>,
    acct: Frontier,
}

struct Worker<'a, P: Primitive> {
    part: PartitionView<'a>,
    state: P::State,
    queue: Frontier,
    next: Frontier,
    output: Frontier,
    advance_out: Frontier,
    outbox: Vec<Frontier>,
    inbox: Vec<Inbox<P::Value>>,
    incoming: Vec<MessagePackage<P::Value>>,
    queued: StampSet,
    pool: MemoryPool,
    edges: u64,
    combines: u64,
}

impl<'a, P: Primitive> Worker<'a, P> {
    fn new(prim: &P, part: PartitionView<'a>, config: &EngineConfig) -> Result<Self, EngineError> {
        let n = part.num_partitions();
        let (nv, ne) = (part.num_local_vertices(), part.num_local_edges());
        let mut pool = MemoryPool::new(config.memory_cap);
        let id_bytes = std::mem::size_of::<VertexId>();
        let rec_bytes = MessagePackage::<P::Value>::record_bytes(prim.num_vertex_associates(), prim.num_value_associates());
        let make = |role: BufferRole, bytes: usize, pool: &mut MemoryPool| {
            Frontier::preallocated(role, config.policy.initial_capacity(role, nv, ne), bytes, pool)
        };
        let queue = make(BufferRole::Queue, id_bytes, &mut pool)?;
        let next = make(BufferRole::Queue, id_bytes, &mut pool)?;
        let output = make(BufferRole::FilterOutput, id_bytes, &mut pool)?;
        let advance_out = make(BufferRole::AdvanceOutput, id_bytes, &mut pool)?;
        let mut outbox = Vec::with_capacity(n);
        let mut inbox = Vec::with_capacity(n);
        for q in 0..n {
            if q == part.id {
                outbox.push(Frontier::new(BufferRole::Outbox));
                inbox.push(Inbox {
                    pkg: MessagePackage::empty(q, part.id, 0, 0, 0),
                    acct: Frontier::new(BufferRole::Inbox),
                });
            } else {
                outbox.push(make(BufferRole::Outbox, rec_bytes, &mut pool)?);
                inbox.push(Inbox {
                    pkg: MessagePackage::empty(q, part.id, 0, prim.num_vertex_associates(), prim.num_value_associates()),
                    acct: make(BufferRole::Inbox, rec_bytes, &mut pool)?,
                });
            }
        }
        let state = prim.init(&part)?;
        let mut w = Worker {
            queued: StampSet::new(nv),
            part,
            state,
            queue,
            next,
            output,
            advance_out,
            outbox,
            inbox,
            incoming: Vec::new(),
            pool,
            edges: 0,
            combines: 0,
        };
        let initial = prim.initial_frontier(&w.part, &mut w.state);
        w.queue.ensure_capacity(initial.len(), &mut w.pool)?;
        w.queue.extend_from_slice(&initial);
        Ok(w)
    }

    /// Iteration body, split and packaging.
    fn compute(
        &mut self,
        prim: &P,
        superstep: usize,
        view: &GlobalView<P::Report>,
        config: &EngineConfig,
    ) -> Result<Packaged<P>, EngineError> {
        self.edges = 0;
        self.output.clear();
        let mut ctx = IterationCtx {
            part: &self.part,
            superstep,
            view,
            pool: &mut self.pool,
            advance_out: &mut self.advance_out,
            policy: &config.policy,
            edges_examined: &mut self.edges,
        };
        prim.iterate(&mut ctx, &mut self.state, &self.queue, &mut self.output)?;

        let comm = prim.communication(&self.state);
        let p = self.part.id;
        self.next.clear();
        self.queued.next_epoch();
        split_into(
            self.output.as_slice(),
            self.part.plan,
            p,
            comm,
            &mut self.next,
            &mut self.outbox,
            &mut self.pool,
        )?;
        let queued = &mut self.queued;
        self.next.retain(|&v| queued.insert(v));

        let mut packages = Vec::with_capacity(self.outbox.len().saturating_sub(1));
        for q in 0..self.outbox.len() {
            if q == p {
                continue;
            }
            packages.push(package_remote(
                self.outbox[q].as_slice(),
                self.part.plan,
                p,
                q,
                prim,
                &mut self.state,
                superstep,
                config.inflate,
            )?);
        }
        Ok((packages, prim.pre_report(&self.state)))
    }

    /// Copies delivered packages into this worker's receive buffers.
    fn receive(&mut self) -> Result<(), EngineError> {
        for ib in &mut self.inbox {
            ib.pkg.clear();
        }
        for pkg in self.incoming.drain(..) {
            let ib = &mut self.inbox[pkg.src];
            ib.acct.ensure_capacity(pkg.len(), &mut self.pool)?;
            ib.pkg.copy_from(&pkg);
        }
        Ok(())
    }

    /// Combines received records and runs the post-merge step.
    fn merge(&mut self, prim: &P, pre: &P::Report) -> Result<P::Report, EngineError> {
        let received: usize = self.inbox.iter().map(|ib| ib.pkg.len()).sum();
        let bound = filter_output_bound(self.next.len() + received, self.part.num_local_vertices(), true);
        self.next.ensure_capacity(bound, &mut self.pool)?;
        let mut combines = 0;
        for ib in &self.inbox {
            let next = &mut self.next;
            let queued = &mut self.queued;
            combines += merge_received(prim, &mut self.state, &ib.pkg, |v| {
                if queued.insert(v) {
                    next.push(v);
                }
            });
        }
        self.combines = combines as u64;
        std::mem::swap(&mut self.queue, &mut self.next);
        Ok(prim.after_merge(&self.part, &mut self.state, pre))
    }

    fn buffer_stats(&self) -> Vec<BufferStats> {
        let p = self.part.id;
        let remote_out = self.outbox.iter().enumerate().filter(|&(q, _)| q != p).map(|(_, f)| f);
        let remote_in = self.inbox.iter().enumerate().filter(|&(q, _)| q != p).map(|(_, ib)| &ib.acct);
        let all: Vec<&Frontier> = [&self.queue, &self.next, &self.output, &self.advance_out]
            .into_iter()
            .chain(remote_out)
            .chain(remote_in)
            .collect();
        BufferRole::ALL
            .iter()
            .map(|&role| {
                let of_role: Vec<&&Frontier> = all.iter().filter(|f| f.role() == role).collect();
                BufferStats {
                    role,
                    buffers: of_role.len(),
                    peak_capacity: of_role.iter().map(|f| f.peak_capacity()).max().unwrap_or(0),
                    realloc_count: of_role.iter().map(|f| f.realloc_count()).sum(),
                }
            })
            .collect()
    }
}

fn first_error<T>(results: Vec<Result<T, EngineError>>) -> Result<Vec<T>, EngineError> {
    results.into_iter().collect()
}

fn reduce<R: Reduce>(reports: &[R]) -> R {
    let mut acc = R::default();
    for r in reports {
        acc.combine(r);
    }
    acc
}

/// Runs `prim` over `plan` until its stop condition holds. Any worker error
/// aborts the run at the next barrier.
pub fn run_primitive<P: Primitive>(
    prim: &P,
    plan: &PartitionPlan,
    config: &EngineConfig,
) -> Result<(P::Output, RunStats), EngineError> {
    if !prim.supports(plan.duplication()) {
        return Err(EngineError::UnsupportedDuplication {
            primitive: prim.name(),
            duplication: plan.duplication(),
        });
    }
    let n = plan.num_partitions();
    let started = Instant::now();
    let mut workers = (0..n)
        .map(|p| Worker::new(prim, PartitionView::new(plan, p), config))
        .collect::<Result<Vec<_>, _>>()?;
    let communication = prim.communication(&workers[0].state);

    let mut view: GlobalView<P::Report> = GlobalView::initial(workers.iter().map(|w| w.queue.len()).collect());
    let mut totals = vec![vec![0u64; n]; n];
    let mut iterations = Vec::new();
    let mut exchange_ms = 0.0;
    let mut dropped = !config.drop_first_package;

    loop {
        let superstep = view.superstep;
        if superstep >= config.max_supersteps {
            return Err(EngineError::SuperstepLimit(config.max_supersteps));
        }
        let step_start = Instant::now();

        let computed = first_error(map_workers(config.execution, &mut workers, |_, w| {
            w.compute(prim, superstep, &view, config)
        }))?;
        let mut packages = Vec::with_capacity(n * n.saturating_sub(1));
        let mut pre_reports = Vec::with_capacity(n);
        for (pkgs, report) in computed {
            packages.extend(pkgs);
            pre_reports.push(report);
        }
        let pre = reduce(&pre_reports);
        let sent: Vec<usize> = (0..n)
            .map(|p| packages.iter().filter(|pkg| pkg.src == p).map(|pkg| pkg.len()).sum())
            .collect();
        if !dropped {
            if let Some(pkg) = packages.iter_mut().find(|pkg| !pkg.is_empty()) {
                pkg.clear();
                dropped = true;
            }
        }

        let exchange_start = Instant::now();
        let mut h = vec![vec![0u64; n]; n];
        let inboxes = exchange(packages, n, &mut h);
        for (w, inbox) in workers.iter_mut().zip(inboxes) {
            w.incoming = inbox;
        }
        first_error(map_workers(config.execution, &mut workers, |_, w| w.receive()))?;
        let exchange_us = exchange_start.elapsed().as_secs_f64() * 1e6;
        exchange_ms += exchange_us / 1e3;

        let post_reports = first_error(map_workers(config.execution, &mut workers, |_, w| w.merge(prim, &pre)))?;
        let post = reduce(&post_reports);

        for (row, step_row) in totals.iter_mut().zip(&h) {
            for (t, &x) in row.iter_mut().zip(step_row) {
                *t += x;
            }
        }
        let frontier_lengths: Vec<usize> = workers.iter().map(|w| w.queue.len()).collect();
        iterations.push(IterationStats {
            superstep,
            edges_examined: workers.iter().map(|w| w.edges).collect(),
            combine_ops: workers.iter().map(|w| w.combines).collect(),
            transmissions: h,
            frontier_lengths: frontier_lengths.clone(),
            wall_us: step_start.elapsed().as_secs_f64() * 1e6,
            exchange_us,
        });
        view = GlobalView {
            superstep: superstep + 1,
            frontier_lengths,
            in_flight: vec![0; n],
            pending_inbox: vec![0; n],
            sent,
            pre,
            post,
        };
        if prim.converged(&view) {
            break;
        }
    }

    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let buffers: Vec<Vec<BufferStats>> = workers.iter().map(|w| w.buffer_stats()).collect();
    let worker_peak_bytes: Vec<usize> = workers.iter().map(|w| w.pool.peak()).collect();
    let local_sizes = workers
        .iter()
        .map(|w| (w.part.num_local_vertices(), w.part.num_local_edges()))
        .collect();
    let stats = RunStats {
        primitive: prim.name().to_string(),
        num_partitions: n,
        duplication: plan.duplication(),
        communication,
        policy: config.policy.name().to_string(),
        supersteps: view.superstep,
        edges_examined: iterations.iter().flat_map(|it| &it.edges_examined).sum(),
        combine_ops: iterations.iter().flat_map(|it| &it.combine_ops).sum(),
        transmissions: totals,
        wall_ms,
        exchange_ms,
        peak_bytes: worker_peak_bytes.iter().sum(),
        worker_peak_bytes,
        local_sizes,
        buffers,
        iterations,
    };
    let states = workers.into_iter().map(|w| w.state).collect();
    Ok((prim.finish(plan, states), stats))
}
