//! Traversal operators over one partition's subgraph.

use super::EngineError;
use crate::frontier::{estimate_advance_output, filter_output_bound, Frontier, MemoryPool};
use crate::graph::Csr;
use crate::VertexId;

/// Visits every out-edge of `input`, pushing the destination of each edge
/// `visit(src, dst, edge)` accepts. `output` is cleared first and sized from
/// the degree sum. Returns the number of edges examined.
pub fn advance<V>(
    g: &Csr,
    input: &[VertexId],
    output: &mut Frontier,
    pool: &mut MemoryPool,
    mut visit: V,
) -> Result<u64, EngineError>
where
    V: FnMut(VertexId, VertexId, usize) -> bool,
{
    let need = estimate_advance_output(input, g)?;
    output.clear();
    output.ensure_capacity(need, pool)?;
    let cols = g.col_indices();
    for &u in input {
        for e in g.edge_range(u) {
            let v = cols[e];
            if visit(u, v, e) {
                output.push(v);
            }
        }
    }
    Ok(need as u64)
}

/// Order-preserving subset of `input` where `keep` holds. Passing
/// `dedup_vertices = Some(|V_i|)` promises `keep` accepts each vertex at most
/// once, which caps the output bound.
pub fn filter<K>(
    input: &[VertexId],
    output: &mut Frontier,
    pool: &mut MemoryPool,
    dedup_vertices: Option<usize>,
    mut keep: K,
) -> Result<(), EngineError>
where
    K: FnMut(VertexId) -> bool,
{
    let bound = filter_output_bound(input.len(), dedup_vertices.unwrap_or(0), dedup_vertices.is_some());
    output.clear();
    output.ensure_capacity(bound, pool)?;
    for &v in input {
        if keep(v) {
            output.push(v);
        }
    }
    Ok(())
}

/// `filter(advance(input, visit), keep)` in one pass with no intermediate
/// frontier. Returns the number of edges examined.
pub fn advance_filter_fused<V, K>(
    g: &Csr,
    input: &[VertexId],
    output: &mut Frontier,
    pool: &mut MemoryPool,
    dedup_vertices: Option<usize>,
    mut visit: V,
    mut keep: K,
) -> Result<u64, EngineError>
where
    V: FnMut(VertexId, VertexId, usize) -> bool,
    K: FnMut(VertexId) -> bool,
{
    let edges = estimate_advance_output(input, g)?;
    let bound = filter_output_bound(edges, dedup_vertices.unwrap_or(0), dedup_vertices.is_some());
    output.clear();
    output.ensure_capacity(bound, pool)?;
    let cols = g.col_indices();
    for &u in input {
        for e in g.edge_range(u) {
            let v = cols[e];
            if visit(u, v, e) && keep(v) {
                output.push(v);
            }
        }
    }
    Ok(edges as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontier::BufferRole;
    use crate::graph::fixtures;

    fn out() -> Frontier {
        Frontier::new(BufferRole::FilterOutput)
    }

    #[test]
    fn advance_star() {
        let g = fixtures::star(5);
        let mut pool = MemoryPool::unlimited();
        let mut o = out();
        let w = advance(&g, &[0], &mut o, &mut pool, |_, _, _| true).unwrap();
        assert_eq!(w, 4);
        let mut got = o.as_slice().to_vec();
        got.sort_unstable();
        assert_eq!(got, vec![1, 2, 3, 4]);

        let w = advance(&g, &[], &mut o, &mut pool, |_, _, _| true).unwrap();
        assert_eq!(w, 0);
        assert!(o.is_empty());
    }

    #[test]
    fn advance_unvisited_only() {
        let g = fixtures::path(4);
        let visited = [true, true, false, false];
        let mut pool = MemoryPool::unlimited();
        let mut o = out();
        advance(&g, &[1], &mut o, &mut pool, |_, v, _| !visited[v as usize]).unwrap();
        assert_eq!(o.as_slice(), &[2]);
    }

    #[test]
    fn filter_cases() {
        let mut pool = MemoryPool::unlimited();
        let mut o = out();
        filter(&[1, 2, 3], &mut o, &mut pool, None, |v| v % 2 == 1).unwrap();
        assert_eq!(o.as_slice(), &[1, 3]);
        filter(&[1, 2, 3], &mut o, &mut pool, None, |_| false).unwrap();
        assert!(o.is_empty());
        filter(&[1, 2, 3], &mut o, &mut pool, None, |_| true).unwrap();
        assert_eq!(o.as_slice(), &[1, 2, 3]);
    }

    #[test]
    fn fused_star_even() {
        let g = fixtures::star(5);
        let mut pool = MemoryPool::unlimited();
        let mut o = out();
        advance_filter_fused(&g, &[0], &mut o, &mut pool, None, |_, _, _| true, |v| v % 2 == 0).unwrap();
        let mut got = o.as_slice().to_vec();
        got.sort_unstable();
        assert_eq!(got, vec![2, 4]);
    }

    #[test]
    fn invalid_input_vertex() {
        let g = fixtures::path(3);
        let mut pool = MemoryPool::unlimited();
        let mut o = out();
        assert!(matches!(
            advance(&g, &[9], &mut o, &mut pool, |_, _, _| true),
            Err(EngineError::InvalidVertex(_))
        ));
    }
}
