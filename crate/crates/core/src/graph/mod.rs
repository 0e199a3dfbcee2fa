//! Weighted undirected graphs, MST, shortest paths and file formats.

mod io;
mod mst;
mod paths;

pub use io::{load_graph, parse_graph, write_edge_list, GraphFormat};
pub use mst::{minimum_spanning_forest, minimum_spanning_tree, MstResult};
pub use paths::{sssp_distances, DistanceMap};
pub(crate) use paths::HeapItem;

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub w: f64,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId, w: f64) -> Self {
        Edge { u, v, w }
    }

    /// Endpoints as (min, max).
    pub fn key(&self) -> (VertexId, VertexId) {
        if self.u <= self.v {
            (self.u, self.v)
        } else {
            (self.v, self.u)
        }
    }

    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// What ingestion removed while building a simple graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub self_loops: usize,
    pub collapsed: usize,
}

/// CSR adjacency: `nbrs[offsets[v]..offsets[v+1]]` lists `(neighbor, edge id)`.
#[derive(Clone, Debug)]
pub struct Adjacency {
    offsets: Vec<usize>,
    nbrs: Vec<(VertexId, EdgeId)>,
}

impl Adjacency {
    fn build(n: usize, edges: &[Edge]) -> Self {
        let mut deg = vec![0usize; n + 1];
        for e in edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + deg[v];
        }
        let mut fill = offsets.clone();
        let mut nbrs = vec![(0, 0); offsets[n]];
        for (id, e) in edges.iter().enumerate() {
            nbrs[fill[e.u]] = (e.v, id);
            fill[e.u] += 1;
            nbrs[fill[e.v]] = (e.u, id);
            fill[e.v] += 1;
        }
        Adjacency { offsets, nbrs }
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.nbrs[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

/// Simple undirected graph with strictly positive weights.
#[derive(Debug, Default)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: OnceLock<Adjacency>,
}

impl Clone for WeightedGraph {
    fn clone(&self) -> Self {
        WeightedGraph {
            n: self.n,
            edges: self.edges.clone(),
            adj: OnceLock::new(),
        }
    }
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl WeightedGraph {
    /// Builds a simple graph, dropping self-loops and keeping the lightest
    /// copy of each parallel bundle. Edge ids follow first appearance.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId, f64)>,
    {
        Self::from_edges_with_report(n, edges).map(|(g, _)| g)
    }

    pub fn from_edges_with_report<I>(n: usize, edges: I) -> Result<(Self, IngestReport), GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId, f64)>,
    {
        let mut report = IngestReport::default();
        let mut index: HashMap<(VertexId, VertexId), usize> = HashMap::new();
        let mut out: Vec<Edge> = Vec::new();
        for (pos, (u, v, w)) in edges.into_iter().enumerate() {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange {
                    line: pos + 1,
                    id: u.max(v),
                    n,
                });
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(GraphError::NonPositiveWeight { line: pos + 1, w });
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            let e = Edge::new(u, v, w);
            match index.get(&e.key()) {
                Some(&id) => {
                    report.collapsed += 1;
                    if w < out[id].w {
                        out[id].w = w;
                    }
                }
                None => {
                    index.insert(e.key(), out.len());
                    out.push(e);
                }
            }
        }
        Ok((
            WeightedGraph {
                n,
                edges: out,
                adj: OnceLock::new(),
            },
            report,
        ))
    }

    pub fn empty(n: usize) -> Self {
        WeightedGraph {
            n,
            edges: Vec::new(),
            adj: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn adjacency(&self) -> &Adjacency {
        self.adj.get_or_init(|| Adjacency::build(self.n, &self.edges))
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::min)
    }

    /// Subgraph on the same vertex set keeping the listed edges (in the
    /// given order).
    pub fn subgraph(&self, ids: &[EdgeId]) -> WeightedGraph {
        WeightedGraph {
            n: self.n,
            edges: ids.iter().map(|&id| self.edges[id]).collect(),
            adj: OnceLock::new(),
        }
    }

    /// Looks up the edge id of `{u, v}` by scanning the smaller adjacency.
    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let adj = self.adjacency();
        let (a, b) = if adj.degree(u) <= adj.degree(v) { (u, v) } else { (v, u) };
        adj.neighbors(a).iter().find(|&&(x, _)| x == b).map(|&(_, id)| id)
    }

    /// Connected component label per vertex (labels are the smallest vertex
    /// id of each component).
    pub fn components(&self) -> Vec<VertexId> {
        let adj = self.adjacency();
        let mut label = vec![usize::MAX; self.n];
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = s;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &(y, _) in adj.neighbors(x) {
                    if label[y] == usize::MAX {
                        label[y] = s;
                        stack.push(y);
                    }
                }
            }
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().iter().all(|&c| c == 0)
    }

    /// Edge ids of all bridges (iterative Tarjan low-link).
    pub fn bridges(&self) -> Vec<EdgeId> {
        let adj = self.adjacency();
        let n = self.n;
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut out = Vec::new();
        let mut time = 0;
        // frame: (vertex, parent edge, next neighbor index)
        let mut stack: Vec<(VertexId, usize, usize)> = Vec::new();
        for s in 0..n {
            if disc[s] != usize::MAX {
                continue;
            }
            disc[s] = time;
            low[s] = time;
            time += 1;
            stack.push((s, usize::MAX, 0));
            while let Some(top) = stack.last_mut() {
                let (x, pe, idx) = *top;
                let nb = adj.neighbors(x);
                if idx < nb.len() {
                    top.2 += 1;
                    let (y, id) = nb[idx];
                    if id == pe {
                        continue;
                    }
                    if disc[y] == usize::MAX {
                        disc[y] = time;
                        low[y] = time;
                        time += 1;
                        stack.push((y, id, 0));
                    } else {
                        low[x] = low[x].min(disc[y]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _, _)) = stack.last() {
                        low[p] = low[p].min(low[x]);
                        if low[x] > disc[p] {
                            out.push(pe);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Divides every weight by the minimum weight. Returns the scaled graph and
/// the divisor.
pub fn normalize_weights(g: &WeightedGraph) -> Result<(WeightedGraph, f64), GraphError> {
    let scale = g.min_weight().ok_or(GraphError::EmptyEdgeSet)?;
    let edges = g
        .edges
        .iter()
        .map(|e| Edge::new(e.u, e.v, if e.w == scale { 1.0 } else { e.w / scale }))
        .collect();
    Ok((
        WeightedGraph {
            n: g.n,
            edges,
            adj: OnceLock::new(),
        },
        scale,
    ))
}
