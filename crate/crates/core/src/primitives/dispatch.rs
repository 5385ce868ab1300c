//! Running any primitive by kind with one parameter set.

use std::io::{self, Write};

use super::{
    Bc, BcOutput, Bfs, BfsOutput, Cc, CcOutput, Dobfs, DobfsOutput, PageRank, PrOutput, Sssp, SsspOutput, UNREACHED,
    UNVISITED, DEFAULT_DAMPING, DEFAULT_DO_A, DEFAULT_DO_B, DEFAULT_EPSILON, DEFAULT_MAX_ITER,
};
use crate::cost::PrimitiveKind;
use crate::engine::{run_primitive, Communication, EngineConfig, EngineError, RunStats};
use crate::partition::PartitionPlan;
use crate::VertexId;

#[derive(Clone, Debug, PartialEq)]
pub struct PrimitiveParams {
    pub source: VertexId,
    pub mark_preds: bool,
    /// `None` keeps the primitive's own scheme.
    pub communication: Option<Communication>,
    pub do_a: f64,
    pub do_b: f64,
    pub damping: f64,
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for PrimitiveParams {
    fn default() -> Self {
        PrimitiveParams {
            source: 0,
            mark_preds: false,
            communication: None,
            do_a: DEFAULT_DO_A,
            do_b: DEFAULT_DO_B,
            damping: DEFAULT_DAMPING,
            epsilon: DEFAULT_EPSILON,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PrimitiveOutput {
    Bfs(BfsOutput),
    Dobfs(DobfsOutput),
    Sssp(SsspOutput),
    Cc(CcOutput),
    Bc(BcOutput),
    Pr(PrOutput),
}

impl PrimitiveOutput {
    pub fn num_vertices(&self) -> usize {
        match self {
            PrimitiveOutput::Bfs(o) => o.labels.len(),
            PrimitiveOutput::Dobfs(o) => o.labels.len(),
            PrimitiveOutput::Sssp(o) => o.dist.len(),
            PrimitiveOutput::Cc(o) => o.labels.len(),
            PrimitiveOutput::Bc(o) => o.bc.len(),
            PrimitiveOutput::Pr(o) => o.ranks.len(),
        }
    }

    /// Per-vertex result as text; `inf` for unreached vertices.
    pub fn value_string(&self, v: usize) -> String {
        fn hop(l: u32) -> String {
            if l == UNVISITED {
                "inf".into()
            } else {
                l.to_string()
            }
        }
        match self {
            PrimitiveOutput::Bfs(o) => hop(o.labels[v]),
            PrimitiveOutput::Dobfs(o) => hop(o.labels[v]),
            PrimitiveOutput::Sssp(o) if o.dist[v] == UNREACHED => "inf".into(),
            PrimitiveOutput::Sssp(o) => o.dist[v].to_string(),
            PrimitiveOutput::Cc(o) => o.labels[v].to_string(),
            PrimitiveOutput::Bc(o) => format!("{:e}", o.bc[v]),
            PrimitiveOutput::Pr(o) => format!("{:e}", o.ranks[v]),
        }
    }

    /// One `vertex value` line per vertex.
    pub fn write_values<W: Write>(&self, mut out: W) -> io::Result<()> {
        for v in 0..self.num_vertices() {
            writeln!(out, "{v} {}", self.value_string(v))?;
        }
        Ok(())
    }
}

fn fixed(kind: PrimitiveKind, native: Communication, asked: Option<Communication>) -> Result<(), EngineError> {
    match asked {
        Some(c) if c != native => Err(EngineError::UnsupportedCommunication {
            primitive: kind.name(),
            communication: c,
        }),
        _ => Ok(()),
    }
}

/// Runs `kind` on `plan`. BFS honors a requested communication scheme; the
/// other primitives reject any scheme but their own. BC mixes both and
/// accepts no override.
pub fn run_kind(
    kind: PrimitiveKind,
    plan: &PartitionPlan,
    params: &PrimitiveParams,
    config: &EngineConfig,
) -> Result<(PrimitiveOutput, RunStats), EngineError> {
    let p = params;
    match kind {
        PrimitiveKind::Bfs => {
            let mut prim = Bfs::new(p.source);
            prim.mark_preds = p.mark_preds;
            prim.communication = p.communication.unwrap_or(Communication::Selective);
            run_primitive(&prim, plan, config).map(|(o, s)| (PrimitiveOutput::Bfs(o), s))
        }
        PrimitiveKind::Dobfs => {
            fixed(kind, Communication::Broadcast, p.communication)?;
            let prim = Dobfs {
                source: p.source,
                do_a: p.do_a,
                do_b: p.do_b,
            };
            run_primitive(&prim, plan, config).map(|(o, s)| (PrimitiveOutput::Dobfs(o), s))
        }
        PrimitiveKind::Sssp => {
            fixed(kind, Communication::Selective, p.communication)?;
            let prim = Sssp {
                source: p.source,
                mark_preds: p.mark_preds,
            };
            run_primitive(&prim, plan, config).map(|(o, s)| (PrimitiveOutput::Sssp(o), s))
        }
        PrimitiveKind::Cc => {
            fixed(kind, Communication::Broadcast, p.communication)?;
            run_primitive(&Cc, plan, config).map(|(o, s)| (PrimitiveOutput::Cc(o), s))
        }
        PrimitiveKind::Bc => {
            if let Some(c) = p.communication {
                return Err(EngineError::UnsupportedCommunication {
                    primitive: kind.name(),
                    communication: c,
                });
            }
            run_primitive(&Bc { source: p.source }, plan, config).map(|(o, s)| (PrimitiveOutput::Bc(o), s))
        }
        PrimitiveKind::Pr => {
            fixed(kind, Communication::Selective, p.communication)?;
            let prim = PageRank {
                damping: p.damping,
                epsilon: p.epsilon,
                max_iter: p.max_iter,
            };
            run_primitive(&prim, plan, config).map(|(o, s)| (PrimitiveOutput::Pr(o), s))
        }
    }
}

/// Whether `kind` runs on plans with the given duplication.
pub fn kind_supports(kind: PrimitiveKind, dup: crate::partition::Duplication, comm: Option<Communication>) -> bool {
    use crate::engine::Primitive;
    use crate::partition::Duplication;
    match kind {
        PrimitiveKind::Bfs => {
            let mut b = Bfs::new(0);
            b.communication = comm.unwrap_or(Communication::Selective);
            b.supports(dup)
        }
        PrimitiveKind::Sssp | PrimitiveKind::Pr => true,
        _ => dup == Duplication::DuplicateAll,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;
    use crate::partition::{build_partition_plan, Assignment, Duplication};

    #[test]
    fn overrides_are_checked() {
        let g = fixtures::path(4);
        let plan = build_partition_plan(&g, &Assignment::new(vec![0, 0, 1, 1], 2).unwrap(), Duplication::DuplicateAll)
            .unwrap();
        let cfg = EngineConfig::default();
        let mut p = PrimitiveParams {
            communication: Some(Communication::Selective),
            ..Default::default()
        };
        assert!(matches!(
            run_kind(PrimitiveKind::Cc, &plan, &p, &cfg),
            Err(EngineError::UnsupportedCommunication { .. })
        ));
        p.communication = Some(Communication::Broadcast);
        let (out, _) = run_kind(PrimitiveKind::Bfs, &plan, &p, &cfg).unwrap();
        assert_eq!(out.value_string(3), "3");
    }
}
