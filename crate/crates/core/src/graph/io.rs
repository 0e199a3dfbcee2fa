use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{IngestReport, WeightedGraph};
use crate::error::GraphError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    /// `n m` header, then `u v w` lines with 0-based ids.
    EdgeList,
    /// DIMACS shortest-path format: `p sp n m`, `a u v w` with 1-based ids.
    DimacsGr,
}

impl std::str::FromStr for GraphFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "edge-list" | "edgelist" | "txt" => Ok(GraphFormat::EdgeList),
            "dimacs" | "dimacs-gr" | "gr" => Ok(GraphFormat::DimacsGr),
            other => Err(format!("unknown graph format {other:?}")),
        }
    }
}

pub fn load_graph(path: &Path, format: GraphFormat) -> Result<(WeightedGraph, IngestReport), GraphError> {
    let file = File::open(path).map_err(|e| GraphError::Io(format!("{}: {e}", path.display())))?;
    parse_graph(BufReader::new(file), format)
}

pub fn parse_graph<R: BufRead>(reader: R, format: GraphFormat) -> Result<(WeightedGraph, IngestReport), GraphError> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(reader),
        GraphFormat::DimacsGr => parse_dimacs(reader),
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, GraphError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from {tok:?}")))
}

fn check_edge(u: usize, v: usize, w: f64, n: usize, line: usize) -> Result<(), GraphError> {
    if u >= n || v >= n {
        return Err(GraphError::VertexOutOfRange { line, id: u.max(v), n });
    }
    if !(w > 0.0) || !w.is_finite() {
        return Err(GraphError::NonPositiveWeight { line, w });
    }
    Ok(())
}

fn parse_edge_list<R: BufRead>(reader: R) -> Result<(WeightedGraph, IngestReport), GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut raw = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| GraphError::Io(e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let mut it = t.split_whitespace();
        match header {
            None => {
                let n: usize = field(it.next(), lineno, "vertex count")?;
                let m: usize = field(it.next(), lineno, "edge count")?;
                header = Some((n, m));
                raw.reserve(m);
            }
            Some((n, m)) => {
                if raw.len() == m {
                    return Err(parse_err(lineno, format!("more than the declared {m} edges")));
                }
                let u: usize = field(it.next(), lineno, "endpoint u")?;
                let v: usize = field(it.next(), lineno, "endpoint v")?;
                let w: f64 = field(it.next(), lineno, "weight")?;
                check_edge(u, v, w, n, lineno)?;
                raw.push((u, v, w));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(1, "missing \"n m\" header"))?;
    if raw.len() != m {
        return Err(parse_err(0, format!("declared {m} edges, found {}", raw.len())));
    }
    WeightedGraph::from_edges_with_report(n, raw)
}

fn parse_dimacs<R: BufRead>(reader: R) -> Result<(WeightedGraph, IngestReport), GraphError> {
    let mut n: Option<usize> = None;
    let mut raw = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| GraphError::Io(e.to_string()))?;
        let mut it = line.split_whitespace();
        match it.next() {
            None | Some("c") => continue,
            Some("p") => {
                let kind: String = field(it.next(), lineno, "problem kind")?;
                if kind != "sp" {
                    return Err(parse_err(lineno, format!("expected \"p sp\", got \"p {kind}\"")));
                }
                n = Some(field(it.next(), lineno, "vertex count")?);
                let m: usize = field(it.next(), lineno, "arc count")?;
                raw.reserve(m);
            }
            Some("a") => {
                let n = n.ok_or_else(|| parse_err(lineno, "arc before \"p sp\" header"))?;
                let u: usize = field(it.next(), lineno, "tail")?;
                let v: usize = field(it.next(), lineno, "head")?;
                let w: f64 = field(it.next(), lineno, "weight")?;
                if u == 0 || v == 0 {
                    return Err(GraphError::VertexOutOfRange { line: lineno, id: 0, n });
                }
                check_edge(u - 1, v - 1, w, n, lineno)?;
                raw.push((u - 1, v - 1, w));
            }
            Some(other) => return Err(parse_err(lineno, format!("unknown line type {other:?}"))),
        }
    }
    let n = n.ok_or_else(|| parse_err(1, "missing \"p sp\" header"))?;
    WeightedGraph::from_edges_with_report(n, raw)
}

/// Writes `n m` then one `u v w` line per edge. Weights use Rust's
/// shortest round-trip float formatting.
pub fn write_edge_list<W: Write>(out: &mut W, g: &WeightedGraph) -> std::io::Result<()> {
    writeln!(out, "{} {}", g.n(), g.m())?;
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.u, e.v, e.w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str, f: GraphFormat) -> Result<(WeightedGraph, IngestReport), GraphError> {
        parse_graph(s.as_bytes(), f)
    }

    #[test]
    fn triangle_read_back() {
        let (g, rep) = parse("3 3\n0 1 1.0\n1 2 1.0\n0 2 2.0\n", GraphFormat::EdgeList).unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
        assert_eq!(rep, IngestReport::default());
        assert_eq!(g.edge(2).w, 2.0);
    }

    #[test]
    fn duplicate_and_loop_reported() {
        let (g, rep) = parse("2 3\n0 1 5\n0 1 2\n0 0 1\n", GraphFormat::EdgeList).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.edge(0).w, 2.0);
        assert_eq!(rep.collapsed, 1);
        assert_eq!(rep.self_loops, 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse("3 2\n0 1 1\n0 x 1\n", GraphFormat::EdgeList).unwrap_err();
        assert!(matches!(e, GraphError::Parse { line: 3, .. }), "{e:?}");
        let e = parse("3 1\n0 5 1\n", GraphFormat::EdgeList).unwrap_err();
        assert_eq!(e, GraphError::VertexOutOfRange { line: 2, id: 5, n: 3 });
        let e = parse("3 1\n\n0 1 -1\n", GraphFormat::EdgeList).unwrap_err();
        assert!(matches!(e, GraphError::NonPositiveWeight { line: 3, .. }));
    }

    #[test]
    fn dimacs_is_one_based() {
        let src = "c demo\np sp 3 2\na 1 2 4\na 2 3 1.5\n";
        let (g, _) = parse(src, GraphFormat::DimacsGr).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges()[0].key(), (0, 1));
        assert_eq!(g.edges()[1].w, 1.5);
        // arcs in both directions collapse into one undirected edge
        let (g, rep) = parse("p sp 2 2\na 1 2 3\na 2 1 3\n", GraphFormat::DimacsGr).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(rep.collapsed, 1);
    }

    #[test]
    fn round_trip() {
        let g = WeightedGraph::from_edges(4, vec![(0, 1, 0.1), (1, 2, 1e-7), (2, 3, 12345.678)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &g).unwrap();
        let (h, _) = parse(std::str::from_utf8(&buf).unwrap(), GraphFormat::EdgeList).unwrap();
        assert_eq!(g, h);
    }
}
