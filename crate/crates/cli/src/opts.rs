use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use bspgraph::cost::PrimitiveKind;
use bspgraph::engine::Communication;
use bspgraph::frontier::SizingFactors;
use bspgraph::graph::{load_graph, rmat_generate, sample_sources, DEFAULT_RMAT_PROBS, DEFAULT_WEIGHT_RANGE};
use bspgraph::partition::{build_partition_plan, load_assignment, partition_biased_random, partition_random};
use bspgraph::primitives::{
    PrimitiveParams, DEFAULT_DAMPING, DEFAULT_DO_A, DEFAULT_DO_B, DEFAULT_EPSILON, DEFAULT_MAX_ITER,
};
use bspgraph::{AllocationPolicy, Assignment, Csr, Duplication, EngineConfig, Execution, PartitionPlan, VertexId};
use clap::{Args, ValueEnum};

#[derive(Clone, Debug, PartialEq)]
pub struct RmatSpec {
    pub scale: u32,
    pub edge_factor: usize,
    pub probs: [f64; 4],
}

impl FromStr for RmatSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 2 && parts.len() != 6 {
            return Err("expected scale,ef or scale,ef,A,B,C,D".into());
        }
        let scale = parts[0].parse().map_err(|_| format!("bad scale `{}`", parts[0]))?;
        let edge_factor = parts[1].parse().map_err(|_| format!("bad edge factor `{}`", parts[1]))?;
        let mut probs = DEFAULT_RMAT_PROBS;
        if parts.len() == 6 {
            for (p, tok) in probs.iter_mut().zip(&parts[2..]) {
                *p = tok.parse().map_err(|_| format!("bad probability `{tok}`"))?;
            }
        }
        Ok(RmatSpec {
            scale,
            edge_factor,
            probs,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PartitionerSpec {
    Random,
    Biased(f64),
    File(PathBuf),
}

impl FromStr for PartitionerSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "random" {
            Ok(PartitionerSpec::Random)
        } else if let Some(b) = s.strip_prefix("biased:") {
            b.parse().map(PartitionerSpec::Biased).map_err(|_| format!("bad bias `{b}`"))
        } else if let Some(p) = s.strip_prefix("file:") {
            Ok(PartitionerSpec::File(p.into()))
        } else {
            Err(format!("unknown partitioner `{s}` (random, biased:<f>, file:<path>)"))
        }
    }
}

impl PartitionerSpec {
    pub fn label(&self) -> String {
        match self {
            PartitionerSpec::Random => "random".into(),
            PartitionerSpec::Biased(b) => format!("biased:{b}"),
            PartitionerSpec::File(p) => format!("file:{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AllocSpec {
    Just,
    Fixed(PathBuf),
    Max,
    Fused(Option<PathBuf>),
}

impl FromStr for AllocSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "just" => Ok(AllocSpec::Just),
            "max" => Ok(AllocSpec::Max),
            "fused" => Ok(AllocSpec::Fused(None)),
            _ => {
                if let Some(p) = s.strip_prefix("fixed:") {
                    Ok(AllocSpec::Fixed(p.into()))
                } else if let Some(p) = s.strip_prefix("fused:") {
                    Ok(AllocSpec::Fused(Some(p.into())))
                } else {
                    Err(format!("unknown allocation `{s}` (just, fixed:<path>, max, fused)"))
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DupArg {
    All,
    Onehop,
}

impl From<DupArg> for Duplication {
    fn from(d: DupArg) -> Self {
        match d {
            DupArg::All => Duplication::DuplicateAll,
            DupArg::Onehop => Duplication::DuplicateOneHop,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CommArg {
    Selective,
    Broadcast,
}

impl From<CommArg> for Communication {
    fn from(c: CommArg) -> Self {
        match c {
            CommArg::Selective => Communication::Selective,
            CommArg::Broadcast => Communication::Broadcast,
        }
    }
}

fn parse_weight_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo = lo.trim().parse().map_err(|_| format!("bad weight `{lo}`"))?;
    let hi = hi.trim().parse().map_err(|_| format!("bad weight `{hi}`"))?;
    Ok((lo, hi))
}

#[derive(Args, Clone, Debug)]
pub struct GraphOpts {
    /// Edge list or Matrix Market file.
    #[arg(long, conflicts_with = "rmat", required_unless_present = "rmat")]
    pub graph: Option<PathBuf>,
    /// R-MAT parameters: scale,ef[,A,B,C,D].
    #[arg(long)]
    pub rmat: Option<RmatSpec>,
    /// Seed for generation, partitioning, weights and source sampling.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Assign random integer weights in lo,hi to every undirected edge.
    #[arg(long, value_parser = parse_weight_range)]
    pub weights: Option<(u32, u32)>,
}

impl GraphOpts {
    /// Loads or generates the graph, undirected with self-loops and
    /// duplicates removed.
    pub fn load(&self) -> Result<Csr> {
        let raw = match (&self.graph, &self.rmat) {
            (Some(path), _) => load_graph(path).with_context(|| format!("loading {}", path.display()))?,
            (None, Some(r)) => {
                let edges = rmat_generate(r.scale, r.edge_factor, r.probs, self.seed)?;
                Csr::build(1usize << r.scale, &edges, None)?
            }
            (None, None) => bail!("one of --graph or --rmat is required"),
        };
        let mut g = raw.symmetrize_dedup();
        if let Some((lo, hi)) = self.weights {
            g = g.with_random_weights(lo, hi, self.seed)?;
        }
        Ok(g)
    }

    /// Like [`Self::load`], adding default random weights when `kind` needs
    /// them and the graph has none.
    pub fn load_for(&self, kind: PrimitiveKind) -> Result<Csr> {
        let g = self.load()?;
        if kind == PrimitiveKind::Sssp && !g.is_weighted() {
            let (lo, hi) = DEFAULT_WEIGHT_RANGE;
            return Ok(g.with_random_weights(lo, hi, self.seed)?);
        }
        Ok(g)
    }

    pub fn name(&self) -> String {
        match (&self.graph, &self.rmat) {
            (Some(p), _) => p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            (None, Some(r)) => format!("rmat{}-{}", r.scale, r.edge_factor),
            _ => String::new(),
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct PartOpts {
    /// Number of partitions (workers).
    #[arg(long, default_value_t = 1)]
    pub parts: usize,
    /// random, biased:<f> or file:<path>.
    #[arg(long, default_value = "random")]
    pub partitioner: PartitionerSpec,
    #[arg(long, value_enum, default_value_t = DupArg::All)]
    pub dup: DupArg,
}

pub fn assign(g: &Csr, parts: usize, spec: &PartitionerSpec, seed: u64) -> Result<Assignment> {
    Ok(match spec {
        PartitionerSpec::Random => partition_random(g.num_vertices(), parts, seed)?,
        PartitionerSpec::Biased(b) => partition_biased_random(g, parts, seed, *b)?,
        PartitionerSpec::File(p) => {
            // The file decides the partition count unless --parts asks for more
            // (trailing empty partitions).
            let a = load_assignment(p, g.num_vertices())?;
            if parts > a.num_partitions() {
                Assignment::new(a.owners().to_vec(), parts)?
            } else if parts != 1 && parts < a.num_partitions() {
                bail!("{} names {} partitions, --parts is {parts}", p.display(), a.num_partitions());
            } else {
                a
            }
        }
    })
}

impl PartOpts {
    pub fn assignment(&self, g: &Csr, seed: u64) -> Result<Assignment> {
        assign(g, self.parts, &self.partitioner, seed)
    }

    pub fn plan(&self, g: &Csr, seed: u64) -> Result<PartitionPlan> {
        Ok(build_partition_plan(g, &self.assignment(g, seed)?, self.dup.into())?)
    }
}

#[derive(Args, Clone, Debug)]
pub struct EngineOpts {
    /// just, fixed:<path>, max or fused.
    #[arg(long, default_value = "just")]
    pub alloc: AllocSpec,
    /// Sizing factors for preallocation (fixed, or fused when --alloc fused).
    #[arg(long)]
    pub prealloc_from: Option<PathBuf>,
    /// Per-worker frontier memory cap in bytes.
    #[arg(long)]
    pub memory_cap: Option<usize>,
    /// Run workers one after another on one thread.
    #[arg(long)]
    pub sequential: bool,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_supersteps: usize,
}

impl EngineOpts {
    pub fn policy(&self) -> Result<AllocationPolicy> {
        let load = |p: &PathBuf| SizingFactors::load(p).with_context(|| format!("reading {}", p.display()));
        Ok(match (&self.alloc, &self.prealloc_from) {
            (AllocSpec::Fused(Some(p)), _) | (AllocSpec::Fused(None), Some(p)) => {
                AllocationPolicy::PreallocFused(load(p)?)
            }
            (AllocSpec::Fused(None), None) => AllocationPolicy::PreallocFused(SizingFactors::default()),
            (AllocSpec::Fixed(p), _) | (AllocSpec::Just, Some(p)) => AllocationPolicy::FixedPrealloc(load(p)?),
            (AllocSpec::Max, Some(_)) => bail!("--prealloc-from does not apply to --alloc max"),
            (AllocSpec::Max, None) => AllocationPolicy::Maximum,
            (AllocSpec::Just, None) => AllocationPolicy::JustEnough,
        })
    }

    pub fn config(&self) -> Result<EngineConfig> {
        Ok(EngineConfig {
            execution: if self.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            },
            policy: self.policy()?,
            memory_cap: self.memory_cap,
            max_supersteps: self.max_supersteps,
            ..Default::default()
        })
    }
}

#[derive(Args, Clone, Debug)]
pub struct PrimOpts {
    #[arg(long, value_parser = parse_kind)]
    pub primitive: PrimitiveKind,
    /// Source vertex.
    #[arg(long, conflicts_with = "sources")]
    pub source: Option<u64>,
    /// Number of random source vertices.
    #[arg(long)]
    pub sources: Option<usize>,
    /// Communication scheme; defaults to the primitive's own.
    #[arg(long, value_enum)]
    pub comm: Option<CommArg>,
    /// Record BFS/SSSP predecessors.
    #[arg(long)]
    pub mark_preds: bool,
    #[arg(long, default_value_t = DEFAULT_DO_A)]
    pub do_a: f64,
    #[arg(long, default_value_t = DEFAULT_DO_B)]
    pub do_b: f64,
    #[arg(long, default_value_t = DEFAULT_DAMPING)]
    pub damping: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

pub fn parse_kind(s: &str) -> Result<PrimitiveKind, String> {
    s.parse().map_err(|e: bspgraph::cost::CostError| e.to_string())
}

impl PrimOpts {
    pub fn params(&self, source: VertexId) -> PrimitiveParams {
        PrimitiveParams {
            source,
            mark_preds: self.mark_preds,
            communication: self.comm.map(Into::into),
            do_a: self.do_a,
            do_b: self.do_b,
            damping: self.damping,
            epsilon: self.epsilon,
            max_iter: self.max_iter,
        }
    }

    /// Sources to run from; CC and PR ignore sources and run once.
    pub fn source_list(&self, g: &Csr, seed: u64) -> Result<Vec<VertexId>> {
        if matches!(self.primitive, PrimitiveKind::Cc | PrimitiveKind::Pr) {
            return Ok(vec![0]);
        }
        let nv = g.num_vertices();
        match (self.source, self.sources) {
            (Some(s), _) => {
                if s as usize >= nv {
                    bail!("source {s} out of range for {nv} vertices");
                }
                Ok(vec![s as VertexId])
            }
            (None, Some(k)) => {
                if k == 0 {
                    bail!("--sources must be at least 1");
                }
                Ok(sample_sources(nv, k, seed))
            }
            (None, None) => Ok(vec![0]),
        }
    }
}

pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|e| anyhow::anyhow!("`{t}`: {e}")))
        .collect()
}

/// Writes `text` to `path`, or to stdout when it is `-`.
pub fn write_out(path: &std::path::Path, text: &str) -> Result<()> {
    if path.as_os_str() == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}
