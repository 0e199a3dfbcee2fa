//! Pieces shared by the clustered level-by-level builders: source-edge
//! deduplication, representative graphs and star covers.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::SpannerError;
use crate::graph::{EdgeId, VertexId, WeightedGraph};
use crate::hz::UnweightedGraph;

/// A bucket edge together with the representatives of its endpoints'
/// clusters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceEdge {
    pub edge: EdgeId,
    pub ru: VertexId,
    pub rv: VertexId,
}

/// Drops edges inside one cluster and keeps the lightest edge (ties: smaller
/// id) between each pair of clusters. Output is sorted by representative
/// pair.
pub fn dedupe_source_edges<F>(g: &WeightedGraph, bucket: &[EdgeId], mut rep: F) -> Vec<SourceEdge>
where
    F: FnMut(VertexId) -> VertexId,
{
    let mut best: HashMap<(VertexId, VertexId), SourceEdge> = HashMap::new();
    for &id in bucket {
        let e = g.edge(id);
        let (a, b) = (rep(e.u), rep(e.v));
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        let cand = SourceEdge { edge: id, ru: key.0, rv: key.1 };
        best.entry(key)
            .and_modify(|cur| {
                let cw = g.edge(cur.edge).w;
                if e.w < cw || (e.w == cw && id < cur.edge) {
                    *cur = cand;
                }
            })
            .or_insert(cand);
    }
    let mut out: Vec<SourceEdge> = best.into_values().collect();
    out.sort_unstable_by_key(|s| (s.ru, s.rv));
    out
}

/// Simple unweighted graph on cluster representatives; node `x` stands for
/// representative `reps[x]` and edge `j` for source edge `source[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentativeGraph {
    pub graph: UnweightedGraph,
    pub reps: Vec<VertexId>,
    pub source: Vec<EdgeId>,
}

impl RepresentativeGraph {
    pub fn build(sources: &[SourceEdge]) -> Self {
        let mut reps: Vec<VertexId> = sources.iter().flat_map(|s| [s.ru, s.rv]).collect();
        reps.sort_unstable();
        reps.dedup();
        let index = |r: VertexId| reps.binary_search(&r).expect("representative present");
        let edges: Vec<(usize, usize)> = sources.iter().map(|s| (index(s.ru), index(s.rv))).collect();
        let graph = UnweightedGraph::new(reps.len(), edges).expect("deduplicated source edges form a simple graph");
        RepresentativeGraph {
            graph,
            reps,
            source: sources.iter().map(|s| s.edge).collect(),
        }
    }
}

/// One part of a star cover: a spanning tree of the part given by graph
/// edge indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarPart {
    pub center: usize,
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
}

/// Vertex-disjoint parts covering every vertex: first a maximal set of
/// disjoint closed neighbourhoods (scanned by ascending id), then each
/// leftover vertex joins the part of its smallest neighbour that was
/// covered in the first pass.
pub fn grow_star_cover(g: &UnweightedGraph) -> Result<Vec<StarPart>, SpannerError> {
    let n = g.n();
    let mut part = vec![usize::MAX; n];
    let mut parts: Vec<StarPart> = Vec::new();
    for v in 0..n {
        if g.neighbors(v).is_empty() {
            return Err(SpannerError::Invariant(format!("star cover: vertex {v} is isolated")));
        }
        if part[v] != usize::MAX || g.neighbors(v).iter().any(|&(y, _)| part[y] != usize::MAX) {
            continue;
        }
        let id = parts.len();
        let mut p = StarPart { center: v, nodes: vec![v], edges: Vec::new() };
        part[v] = id;
        for &(y, e) in g.neighbors(v) {
            part[y] = id;
            p.nodes.push(y);
            p.edges.push(e);
        }
        parts.push(p);
    }
    let first_pass = part.clone();
    for v in 0..n {
        if part[v] != usize::MAX {
            continue;
        }
        let (y, e) = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&(y, _)| first_pass[y] != usize::MAX)
            .min()
            .ok_or_else(|| SpannerError::Invariant(format!("star cover: vertex {v} has no covered neighbour")))?;
        let id = first_pass[y];
        part[v] = id;
        parts[id].nodes.push(v);
        parts[id].edges.push(e);
    }
    for p in &mut parts {
        p.nodes.sort_unstable();
    }
    Ok(parts)
}

/// Hop diameter of a part, using only its own edges.
pub fn part_hop_diameter(g: &UnweightedGraph, part: &StarPart) -> usize {
    let local: HashMap<usize, usize> = part.nodes.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut adj = vec![Vec::new(); part.nodes.len()];
    for &e in &part.edges {
        let (a, b) = g.edges()[e];
        let (a, b) = (local[&a], local[&b]);
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut worst = 0;
    for s in 0..adj.len() {
        let mut dist = vec![usize::MAX; adj.len()];
        let mut queue = std::collections::VecDeque::from([s]);
        dist[s] = 0;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        worst = worst.max(dist.into_iter().max().unwrap_or(0));
    }
    worst
}

/// Checks the star-cover postconditions: partition, parts of at least two
/// vertices, hop diameter at most 4, edges inside their part.
pub fn check_star_cover(g: &UnweightedGraph, parts: &[StarPart]) -> Result<(), String> {
    let mut seen = vec![false; g.n()];
    for p in parts {
        if p.nodes.len() < 2 {
            return Err(format!("part centered at {} has a single vertex", p.center));
        }
        if p.edges.len() + 1 != p.nodes.len() {
            return Err(format!("part centered at {} is not a tree", p.center));
        }
        for &x in &p.nodes {
            if std::mem::replace(&mut seen[x], true) {
                return Err(format!("vertex {x} covered twice"));
            }
        }
        for &e in &p.edges {
            let (a, b) = g.edges()[e];
            if p.nodes.binary_search(&a).is_err() || p.nodes.binary_search(&b).is_err() {
                return Err(format!("edge {e} leaves its part"));
            }
        }
        let d = part_hop_diameter(g, p);
        if d > 4 {
            return Err(format!("part centered at {} has hop diameter {d}", p.center));
        }
    }
    if let Some(v) = seen.iter().position(|&s| !s) {
        return Err(format!("vertex {v} not covered"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ug(n: usize, e: &[(usize, usize)]) -> UnweightedGraph {
        UnweightedGraph::new(n, e.to_vec()).unwrap()
    }

    #[test]
    fn dedupe_rules() {
        let g = WeightedGraph::from_edges(4, vec![(0, 2, 5.0), (1, 3, 3.0), (0, 1, 1.0)]).unwrap();
        // clusters {0,1} and {2,3}
        let rep = |v: usize| if v < 2 { 0 } else { 2 };
        let s = dedupe_source_edges(&g, &[0, 1, 2], rep);
        assert_eq!(s, vec![SourceEdge { edge: 1, ru: 0, rv: 2 }]);
        let all = dedupe_source_edges(&g, &[0, 1, 2], |v| v);
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn dedupe_ties_by_id() {
        let g = WeightedGraph::from_edges(4, vec![(1, 3, 2.0), (0, 2, 2.0)]).unwrap();
        let rep = |v: usize| if v < 2 { 0 } else { 2 };
        assert_eq!(dedupe_source_edges(&g, &[1, 0], rep)[0].edge, 0);
    }

    #[test]
    fn star_cover_examples() {
        let single = ug(2, &[(0, 1)]);
        let c = grow_star_cover(&single).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].nodes, vec![0, 1]);

        let star = ug(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        let c = grow_star_cover(&star).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].nodes.len(), 6);

        // v0 takes {v0, v1}; v2 touches v1, so v3 centers {v2, v3}
        let path = ug(4, &[(0, 1), (1, 2), (2, 3)]);
        let c = grow_star_cover(&path).unwrap();
        check_star_cover(&path, &c).unwrap();
        assert_eq!(c[0].nodes, vec![0, 1]);
        assert_eq!(c[1].nodes, vec![2, 3]);

        let isolated = ug(3, &[(0, 1)]);
        assert!(grow_star_cover(&isolated).is_err());
    }

    #[test]
    fn leftover_attaches_to_first_pass_vertex() {
        // Star {0,1}; vertex 2 touches covered vertex 1 so it is no center;
        // vertex 3 then takes its whole neighbourhood {2,3,4}.
        let p = ug(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let c = grow_star_cover(&p).unwrap();
        check_star_cover(&p, &c).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].nodes, vec![2, 3, 4]);
    }
}
