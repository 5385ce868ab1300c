//! Edge-list loaders.
//!
//! Two text formats are accepted:
//!
//! - plain lists: one `u v [w]` per line, 0-based, with `#` or `%` comments;
//! - Matrix Market coordinate files (`%%MatrixMarket matrix coordinate ...`),
//!   1-based, converted to 0-based on load.

use std::io::Write;
use std::path::Path;

use super::{Csr, GraphError};
use crate::{VertexId, Weight};

/// Raw arcs as read from a file, before CSR construction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeList {
    pub num_vertices: usize,
    pub edges: Vec<(VertexId, VertexId)>,
    pub weights: Option<Vec<Weight>>,
}

impl EdgeList {
    pub fn into_csr(self) -> Result<Csr, GraphError> {
        Csr::build(self.num_vertices, &self.edges, self.weights.as_deref())
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_id(tok: &str, line: usize) -> Result<u64, GraphError> {
    tok.parse::<u64>()
        .map_err(|_| parse_err(line, format!("invalid vertex ID `{tok}`")))
}

fn parse_weight(tok: &str, line: usize) -> Result<Weight, GraphError> {
    if let Ok(w) = tok.parse::<i64>() {
        if w < 0 {
            return Err(parse_err(line, format!("negative weight {w}")));
        }
        return Weight::try_from(w).map_err(|_| parse_err(line, format!("weight {w} too large")));
    }
    match tok.parse::<f64>() {
        Ok(x) if x < 0.0 => Err(parse_err(line, format!("negative weight {x}"))),
        Ok(x) if x.fract() == 0.0 && x <= Weight::MAX as f64 => Ok(x as Weight),
        _ => Err(parse_err(line, format!("weight `{tok}` is not a nonnegative integer"))),
    }
}

fn to_vertex(id: u64, line: usize) -> Result<VertexId, GraphError> {
    VertexId::try_from(id)
        .ok()
        .filter(|&v| v != crate::INVALID_VERTEX)
        .ok_or_else(|| parse_err(line, format!("vertex ID {id} exceeds the ID width")))
}

/// Parses either supported format from text.
pub fn parse_edge_list(text: &str) -> Result<EdgeList, GraphError> {
    let first = text.lines().next().unwrap_or("");
    if first.trim_start().starts_with("%%MatrixMarket") {
        parse_matrix_market(text)
    } else {
        parse_plain(text)
    }
}

fn parse_plain(text: &str) -> Result<EdgeList, GraphError> {
    let mut out = EdgeList::default();
    let mut weights: Vec<Weight> = Vec::new();
    let mut weighted: Option<bool> = None;
    let mut max_id: Option<u64> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') || s.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks.len() != 2 && toks.len() != 3 {
            return Err(parse_err(line, "expected `u v [w]`"));
        }
        let has_w = toks.len() == 3;
        match weighted {
            None => weighted = Some(has_w),
            Some(prev) if prev != has_w => {
                return Err(GraphError::WeightCountMismatch {
                    edges: out.edges.len() + 1,
                    weights: weights.len() + usize::from(has_w),
                })
            }
            _ => {}
        }
        let u = parse_id(toks[0], line)?;
        let v = parse_id(toks[1], line)?;
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        out.edges.push((to_vertex(u, line)?, to_vertex(v, line)?));
        if has_w {
            weights.push(parse_weight(toks[2], line)?);
        }
    }
    out.num_vertices = max_id.map_or(0, |m| m as usize + 1);
    out.weights = (weighted == Some(true)).then_some(weights);
    Ok(out)
}

fn parse_matrix_market(text: &str) -> Result<EdgeList, GraphError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if fields.len() < 4 || fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(parse_err(1, "only `matrix coordinate` Matrix Market files are supported"));
    }
    let pattern = fields.get(3).is_some_and(|f| f == "pattern");

    let mut size: Option<(usize, usize, usize)> = None;
    let mut out = EdgeList::default();
    let mut weights = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = s.split_whitespace().collect();
        if size.is_none() {
            if toks.len() != 3 {
                return Err(parse_err(line, "expected `rows cols entries` size line"));
            }
            let p = |t: &str| {
                t.parse::<usize>()
                    .map_err(|_| parse_err(line, format!("invalid size field `{t}`")))
            };
            size = Some((p(toks[0])?, p(toks[1])?, p(toks[2])?));
            continue;
        }
        let (rows, cols, _) = size.unwrap();
        let want = if pattern { 2 } else { 3 };
        if toks.len() < want {
            return Err(parse_err(line, format!("expected {want} fields")));
        }
        let u = parse_id(toks[0], line)?;
        let v = parse_id(toks[1], line)?;
        if u == 0 || v == 0 || u as usize > rows || v as usize > cols {
            return Err(parse_err(line, "entry outside the declared matrix size"));
        }
        out.edges
            .push((to_vertex(u - 1, line)?, to_vertex(v - 1, line)?));
        if !pattern {
            weights.push(parse_weight(toks[2], line)?);
        }
    }
    let (rows, cols, entries) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if entries != out.edges.len() {
        return Err(parse_err(
            0,
            format!("header declares {entries} entries, found {}", out.edges.len()),
        ));
    }
    out.num_vertices = rows.max(cols);
    out.weights = (!pattern).then_some(weights);
    Ok(out)
}

/// Reads a graph file in either format into a (directed, unprocessed) CSR.
pub fn load_graph(path: impl AsRef<Path>) -> Result<Csr, GraphError> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text)?.into_csr()
}

/// Writes the graph as a plain 0-based edge list.
pub fn write_edge_list<W: Write>(g: &Csr, mut out: W) -> Result<(), GraphError> {
    writeln!(out, "# {} vertices, {} arcs", g.num_vertices(), g.num_edges())?;
    for (u, v, w) in g.arcs() {
        match w {
            Some(w) => writeln!(out, "{u} {v} {w}")?,
            None => writeln!(out, "{u} {v}")?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_list_with_comments() {
        let el = parse_edge_list("# header\n0 1\n% other\n1 2\n\n2 3\n").unwrap();
        assert_eq!(el.num_vertices, 4);
        assert_eq!(el.edges, vec![(0, 1), (1, 2), (2, 3)]);
        assert!(el.weights.is_none());
    }

    #[test]
    fn plain_list_weights() {
        let el = parse_edge_list("0 1 5\n1 2 7\n").unwrap();
        assert_eq!(el.weights, Some(vec![5, 7]));
        assert!(parse_edge_list("0 1 5\n1 2\n").is_err());
        assert!(parse_edge_list("0 1 -3\n").is_err());
        assert!(parse_edge_list("0 x\n").is_err());
    }

    #[test]
    fn matrix_market_is_one_based() {
        let text = "%%MatrixMarket matrix coordinate pattern symmetric\n% c\n4 4 3\n1 2\n2 3\n3 4\n";
        let el = parse_edge_list(text).unwrap();
        assert_eq!(el.num_vertices, 4);
        assert_eq!(el.edges, vec![(0, 1), (1, 2), (2, 3)]);

        let weighted = "%%MatrixMarket matrix coordinate integer general\n2 2 1\n1 2 9\n";
        assert_eq!(parse_edge_list(weighted).unwrap().weights, Some(vec![9]));

        let short = "%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n";
        assert!(parse_edge_list(short).is_err());
    }

    #[test]
    fn write_then_read() {
        let g = Csr::build(3, &[(0, 1), (2, 1)], Some(&[4, 6])).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = parse_edge_list(std::str::from_utf8(&buf).unwrap())
            .unwrap()
            .into_csr()
            .unwrap();
        assert_eq!(back, g);
    }
}
