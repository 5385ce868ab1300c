use serde::{Deserialize, Serialize};

use super::Communication;
use crate::frontier::{BufferRole, SizingFactors};
use crate::partition::Duplication;

/// Counters for one superstep. Vectors are indexed by worker.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub superstep: usize,
    pub edges_examined: Vec<u64>,
    pub combine_ops: Vec<u64>,
    /// Records sent `[src][dest]` in this superstep.
    pub transmissions: Vec<Vec<u64>>,
    /// Next input frontier length per worker.
    pub frontier_lengths: Vec<usize>,
    pub wall_us: f64,
    pub exchange_us: f64,
}

impl IterationStats {
    pub fn h_from(&self, i: usize) -> u64 {
        self.transmissions[i].iter().sum()
    }

    pub fn h_total(&self) -> u64 {
        self.transmissions.iter().flatten().sum()
    }
}

/// Buffer accounting for one role on one worker.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BufferStats {
    pub role: BufferRole,
    pub buffers: usize,
    /// Largest peak capacity among the role's buffers.
    pub peak_capacity: usize,
    pub realloc_count: usize,
}

/// Everything measured during one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub primitive: String,
    pub num_partitions: usize,
    pub duplication: Duplication,
    pub communication: Communication,
    pub policy: String,
    pub supersteps: usize,
    pub edges_examined: u64,
    pub combine_ops: u64,
    /// Records sent `[src][dest]` over the run.
    pub transmissions: Vec<Vec<u64>>,
    pub wall_ms: f64,
    pub exchange_ms: f64,
    pub peak_bytes: usize,
    pub worker_peak_bytes: Vec<usize>,
    /// `(|V_i|, |E_i|)` per worker.
    pub local_sizes: Vec<(usize, usize)>,
    pub buffers: Vec<Vec<BufferStats>>,
    pub iterations: Vec<IterationStats>,
}

impl RunStats {
    pub fn h_total(&self) -> u64 {
        self.transmissions.iter().flatten().sum()
    }

    pub fn h_from(&self, i: usize) -> u64 {
        self.transmissions[i].iter().sum()
    }

    pub fn edges_per_worker(&self) -> Vec<u64> {
        let n = self.num_partitions;
        let mut w = vec![0; n];
        for it in &self.iterations {
            for (acc, &e) in w.iter_mut().zip(&it.edges_examined) {
                *acc += e;
            }
        }
        w
    }

    pub fn combines_per_worker(&self) -> Vec<u64> {
        let mut c = vec![0; self.num_partitions];
        for it in &self.iterations {
            for (acc, &x) in c.iter_mut().zip(&it.combine_ops) {
                *acc += x;
            }
        }
        c
    }

    pub fn reallocs(&self) -> usize {
        self.buffers.iter().flatten().map(|b| b.realloc_count).sum()
    }

    pub fn role_reallocs(&self, role: BufferRole) -> usize {
        self.buffers
            .iter()
            .flatten()
            .filter(|b| b.role == role)
            .map(|b| b.realloc_count)
            .sum()
    }

    /// Largest peak capacity of `role` over all workers.
    pub fn role_peak(&self, role: BufferRole) -> usize {
        self.buffers
            .iter()
            .flatten()
            .filter(|b| b.role == role)
            .map(|b| b.peak_capacity)
            .max()
            .unwrap_or(0)
    }

    /// Sizing factors that would have avoided every reallocation of this run.
    pub fn sizing_factors(&self) -> SizingFactors {
        SizingFactors::from_peaks(self.buffers.iter().zip(&self.local_sizes).flat_map(|(bs, &(nv, ne))| {
            bs.iter().map(move |b| (b.role, b.peak_capacity, b.role.unit(nv, ne)))
        }))
    }
}

/// Run statistics serialized for the outside world.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub primitive: String,
    pub n: usize,
    pub partitioner: String,
    pub duplication: Duplication,
    pub communication: Communication,
    pub policy: String,
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(rename = "W")]
    pub w: u64,
    #[serde(rename = "H")]
    pub h: Vec<Vec<u64>>,
    #[serde(rename = "C")]
    pub c: u64,
    pub wall_ms: f64,
    pub peak_bytes: usize,
    pub reallocs: usize,
    pub repeats: usize,
}

impl RunReport {
    pub const SCHEMA: u32 = 1;

    /// `wall_ms` is the mean over `repeats` runs.
    pub fn new(stats: &RunStats, partitioner: &str, wall_ms: f64, repeats: usize) -> Self {
        RunReport {
            schema: Self::SCHEMA,
            primitive: stats.primitive.clone(),
            n: stats.num_partitions,
            partitioner: partitioner.to_string(),
            duplication: stats.duplication,
            communication: stats.communication,
            policy: stats.policy.clone(),
            s: stats.supersteps,
            w: stats.edges_examined,
            h: stats.transmissions.clone(),
            c: stats.combine_ops,
            wall_ms,
            peak_bytes: stats.peak_bytes,
            reallocs: stats.reallocs(),
            repeats,
        }
    }

    pub fn h_total(&self) -> u64 {
        self.h.iter().flatten().sum()
    }

    pub fn h_from(&self, i: usize) -> u64 {
        self.h.get(i).map(|row| row.iter().sum()).unwrap_or(0)
    }
}
