//! Frontier buffers with tracked capacity, and the allocation policies that
//! decide how they are sized.
//!
//! Capacity here is the logical allocation a worker has committed for a
//! buffer. It only grows, and every growth is a reallocation. Under
//! [`AllocationPolicy::JustEnough`] every buffer starts empty and grows to
//! exactly the required size; the preallocating policies size buffers up front
//! and fall back to the same exact growth when the estimate was short.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Csr;
use crate::{idx, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{role} buffer needs {required} entries ({bytes} more bytes), over the {cap}-byte memory cap")]
pub struct CapacityError {
    pub role: BufferRole,
    pub required: usize,
    pub bytes: usize,
    pub cap: usize,
}

/// What a buffer is used for. Sizing factors are kept per role.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BufferRole {
    /// Advance output before filtering; sized in units of `|E_i|`.
    AdvanceOutput,
    /// Output frontier of an iteration body; units of `|V_i|`.
    FilterOutput,
    /// Input frontier assembled for the next superstep; units of `|V_i|`.
    Queue,
    /// Per-peer staging of remote sub-frontiers; units of `|V_i|`.
    Outbox,
    /// Per-peer receive buffers; units of `|V_i|`.
    Inbox,
}

impl BufferRole {
    pub const ALL: [BufferRole; 5] = [
        BufferRole::AdvanceOutput,
        BufferRole::FilterOutput,
        BufferRole::Queue,
        BufferRole::Outbox,
        BufferRole::Inbox,
    ];

    /// Sizing unit of this role given `|V_i|` and `|E_i|`.
    pub fn unit(self, num_vertices: usize, num_edges: usize) -> usize {
        match self {
            BufferRole::AdvanceOutput => num_edges,
            _ => num_vertices,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BufferRole::AdvanceOutput => "advance_output",
            BufferRole::FilterOutput => "filter_output",
            BufferRole::Queue => "queue",
            BufferRole::Outbox => "outbox",
            BufferRole::Inbox => "inbox",
        }
    }
}

impl fmt::Display for BufferRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-worker byte accounting with an optional hard cap.
#[derive(Clone, Debug, Default)]
pub struct MemoryPool {
    cap: Option<usize>,
    used: usize,
    peak: usize,
}

impl MemoryPool {
    pub fn new(cap: Option<usize>) -> Self {
        MemoryPool {
            cap,
            used: 0,
            peak: 0,
        }
    }

    pub fn unlimited() -> Self {
        Self::new(None)
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn peak(&self) -> usize {
        self.peak
    }

    fn charge(&mut self, role: BufferRole, required: usize, bytes: usize) -> Result<(), CapacityError> {
        if let Some(cap) = self.cap {
            if self.used + bytes > cap {
                return Err(CapacityError {
                    role,
                    required,
                    bytes,
                    cap,
                });
            }
        }
        self.used += bytes;
        self.peak = self.peak.max(self.used);
        Ok(())
    }
}

/// Growable sequence of local vertex IDs with capacity and peak tracking.
#[derive(Clone, Debug)]
pub struct Frontier {
    items: Vec<VertexId>,
    capacity: usize,
    realloc_count: usize,
    peak_capacity: usize,
    role: BufferRole,
    elem_bytes: usize,
}

impl Frontier {
    pub fn new(role: BufferRole) -> Self {
        Frontier {
            items: Vec::new(),
            capacity: 0,
            realloc_count: 0,
            peak_capacity: 0,
            role,
            elem_bytes: std::mem::size_of::<VertexId>(),
        }
    }

    /// Preallocated buffer. The initial allocation is not a reallocation.
    pub fn preallocated(
        role: BufferRole,
        capacity: usize,
        elem_bytes: usize,
        pool: &mut MemoryPool,
    ) -> Result<Self, CapacityError> {
        let mut f = Frontier::new(role);
        f.elem_bytes = elem_bytes;
        pool.charge(role, capacity, capacity * elem_bytes)?;
        f.items.reserve_exact(capacity);
        f.capacity = capacity;
        f.peak_capacity = capacity;
        Ok(f)
    }

    /// A buffer holding exactly `items`, with capacity equal to their count.
    pub fn from_items(role: BufferRole, items: Vec<VertexId>) -> Self {
        let n = items.len();
        Frontier {
            items,
            capacity: n,
            realloc_count: 0,
            peak_capacity: n,
            role,
            elem_bytes: std::mem::size_of::<VertexId>(),
        }
    }

    /// Grows the buffer to hold at least `required` entries. Growth is to
    /// exactly `required`; contents are preserved. Returns whether a
    /// reallocation happened.
    pub fn ensure_capacity(&mut self, required: usize, pool: &mut MemoryPool) -> Result<bool, CapacityError> {
        if required <= self.capacity {
            return Ok(false);
        }
        let extra = (required - self.capacity) * self.elem_bytes;
        pool.charge(self.role, required, extra)?;
        self.items.reserve_exact(required - self.items.len());
        self.capacity = required;
        self.peak_capacity = self.peak_capacity.max(required);
        self.realloc_count += 1;
        Ok(true)
    }

    #[inline]
    pub fn push(&mut self, v: VertexId) {
        assert!(
            self.items.len() < self.capacity,
            "{} buffer overflow: capacity {} not ensured",
            self.role,
            self.capacity
        );
        self.items.push(v);
    }

    pub fn extend_from_slice(&mut self, vs: &[VertexId]) {
        assert!(
            self.items.len() + vs.len() <= self.capacity,
            "{} buffer overflow: capacity {} not ensured",
            self.role,
            self.capacity
        );
        self.items.extend_from_slice(vs);
    }

    pub fn clear(&mut self) {
        self.items.clear();
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.items
    }

    pub fn iter(&self) -> std::slice::Iter<'_, VertexId> {
        self.items.iter()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn realloc_count(&self) -> usize {
        self.realloc_count
    }

    pub fn peak_capacity(&self) -> usize {
        self.peak_capacity
    }

    pub fn role(&self) -> BufferRole {
        self.role
    }

    pub fn elem_bytes(&self) -> usize {
        self.elem_bytes
    }

    /// Bytes per entry, charged to the pool on growth.
    pub fn set_elem_bytes(&mut self, bytes: usize) {
        self.elem_bytes = bytes;
    }

    /// Keeps only entries where `keep` holds, in order.
    pub fn retain(&mut self, keep: impl FnMut(&VertexId) -> bool) {
        self.items.retain(keep);
    }
}

impl<'a> IntoIterator for &'a Frontier {
    type Item = &'a VertexId;
    type IntoIter = std::slice::Iter<'a, VertexId>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// Invalid local vertex in a frontier.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("frontier entry {vertex} is not a vertex of a {num_vertices}-vertex subgraph")]
pub struct InvalidVertex {
    pub vertex: u64,
    pub num_vertices: usize,
}

/// Exact sum of out-degrees over the frontier: an upper bound on advance
/// output, exact when every visited edge is accepted.
pub fn estimate_advance_output(items: &[VertexId], g: &Csr) -> Result<usize, InvalidVertex> {
    let mut total = 0usize;
    for &v in items {
        if idx(v) >= g.num_vertices() {
            return Err(InvalidVertex {
                vertex: v as u64,
                num_vertices: g.num_vertices(),
            });
        }
        total += g.degree(v);
    }
    Ok(total)
}

/// Output bound of a filter over `len` inputs: `len`, capped by `|V_i|` when
/// the filter removes duplicates.
pub fn filter_output_bound(len: usize, num_local_vertices: usize, dedup: bool) -> usize {
    if dedup {
        len.min(num_local_vertices)
    } else {
        len
    }
}

/// Ratio of buffer size to its sizing unit, per role.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SizingFactors(pub BTreeMap<BufferRole, f64>);

#[derive(Debug, Error)]
pub enum SizingError {
    #[error("sizing factor for {0} must be positive, got {1}")]
    NonPositive(BufferRole, f64),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SizingFactors {
    pub fn validate(&self) -> Result<(), SizingError> {
        for (&role, &f) in &self.0 {
            if f <= 0.0 || !f.is_finite() {
                return Err(SizingError::NonPositive(role, f));
            }
        }
        Ok(())
    }

    pub fn get(&self, role: BufferRole) -> f64 {
        self.0.get(&role).copied().unwrap_or(0.0)
    }

    /// Largest `peak / unit` per role over the given observations; roles
    /// whose peak stayed at zero are left out.
    pub fn from_peaks(observations: impl IntoIterator<Item = (BufferRole, usize, usize)>) -> Self {
        let mut map: BTreeMap<BufferRole, f64> = BTreeMap::new();
        for (role, peak, unit) in observations {
            if peak == 0 || unit == 0 {
                continue;
            }
            let ratio = peak as f64 / unit as f64;
            let entry = map.entry(role).or_insert(0.0);
            *entry = entry.max(ratio);
        }
        SizingFactors(map)
    }

    /// Capacity for `role` on a partition with the given unit size.
    pub fn capacity(&self, role: BufferRole, unit: usize) -> usize {
        (self.get(role) * unit as f64).ceil() as usize
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map of floats serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SizingError> {
        let f: SizingFactors = serde_json::from_str(text)?;
        f.validate()?;
        Ok(f)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SizingError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), SizingError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// How worker buffers are sized.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum AllocationPolicy {
    /// Start empty, grow to exactly what is required.
    #[default]
    JustEnough,
    /// Preallocate from sizing factors; grow exactly when short.
    FixedPrealloc(SizingFactors),
    /// Size advance output at `|E_i|` and every other buffer at `|V_i|`.
    Maximum,
    /// Preallocate like `FixedPrealloc` and fuse advance with the filter that
    /// follows it, so no advance-output buffer exists.
    PreallocFused(SizingFactors),
}

impl AllocationPolicy {
    pub fn initial_capacity(&self, role: BufferRole, num_vertices: usize, num_edges: usize) -> usize {
        let unit = role.unit(num_vertices, num_edges);
        match self {
            AllocationPolicy::JustEnough => 0,
            AllocationPolicy::Maximum => unit,
            AllocationPolicy::FixedPrealloc(f) => f.capacity(role, unit),
            AllocationPolicy::PreallocFused(f) => {
                if role == BufferRole::AdvanceOutput {
                    0
                } else {
                    f.capacity(role, unit)
                }
            }
        }
    }

    pub fn fused(&self) -> bool {
        matches!(self, AllocationPolicy::PreallocFused(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            AllocationPolicy::JustEnough => "just",
            AllocationPolicy::FixedPrealloc(_) => "fixed",
            AllocationPolicy::Maximum => "max",
            AllocationPolicy::PreallocFused(_) => "fused",
        }
    }
}
