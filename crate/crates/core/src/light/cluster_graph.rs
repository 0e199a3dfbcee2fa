//! Node-weighted cluster graphs over the subdivided MST.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::tree::SubdividedMst;
use crate::dsu::ClassicUf;
use crate::graph::{EdgeId, WeightedGraph};

/// Current clusters of one class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterState {
    /// Cluster of every subdivided-tree vertex.
    pub of: Vec<usize>,
    /// Potential, an upper bound on the cluster's diameter in the spanner.
    pub phi: Vec<f64>,
    /// The cluster holds only virtual vertices.
    pub virt: Vec<bool>,
    /// Weight of tree edges inside the cluster (used for virtual ones).
    pub span: Vec<f64>,
    /// Parent MST edge weight of a virtual cluster, 0 otherwise.
    pub parent_w: Vec<f64>,
}

impl ClusterState {
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn total_potential(&self) -> f64 {
        self.phi.iter().sum()
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for (v, &c) in self.of.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterEdge {
    pub a: usize,
    pub b: usize,
    pub w: f64,
    pub source: EdgeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeTreeEdge {
    pub a: usize,
    pub b: usize,
    pub w: f64,
    /// Index into the subdivided tree's edges.
    pub tree_edge: usize,
}

/// Cluster graph of one level: nodes are clusters weighted by potential,
/// `tree` spans it using subdivided-MST edges, `edges` are the surviving
/// level edges.
#[derive(Clone, Debug)]
pub struct PotentialClusterGraph {
    pub omega: Vec<f64>,
    pub virt: Vec<bool>,
    pub span: Vec<f64>,
    pub parent_w: Vec<f64>,
    pub tree: Vec<NodeTreeEdge>,
    pub tree_adj: Vec<Vec<(usize, usize)>>,
    pub edges: Vec<ClusterEdge>,
    pub edge_adj: Vec<Vec<(usize, usize)>>,
    /// Bucket edges dropped as intra-cluster, parallel or tree-spanned.
    pub dropped: usize,
    paths: TreePaths,
}

impl PotentialClusterGraph {
    pub fn n(&self) -> usize {
        self.omega.len()
    }

    pub fn is_non_isolated(&self, x: usize) -> bool {
        !self.edge_adj[x].is_empty()
    }

    /// Node-plus-edge weight of the tree path between `a` and `b`.
    pub fn tree_augmented_distance(&self, a: usize, b: usize) -> Option<f64> {
        self.paths.augmented(a, b, &self.omega)
    }

    /// Nodes on the tree path from `a` to `b`, both included.
    pub fn tree_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        self.paths.path(a, b)
    }
}

pub fn build_cluster_graph(
    g: &WeightedGraph,
    t: &SubdividedMst,
    state: &ClusterState,
    bucket: &[EdgeId],
    stretch_limit: f64,
) -> PotentialClusterGraph {
    let k = state.len();
    let mut candidates: Vec<NodeTreeEdge> = t
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| state.of[e.a] != state.of[e.b])
        .map(|(i, e)| NodeTreeEdge { a: state.of[e.a], b: state.of[e.b], w: e.w, tree_edge: i })
        .collect();
    candidates.sort_by(|x, y| x.w.total_cmp(&y.w).then(x.tree_edge.cmp(&y.tree_edge)));
    let mut uf = ClassicUf::new(k);
    let mut tree = Vec::new();
    for e in candidates {
        if uf.union(e.a, e.b) {
            tree.push(e);
        }
    }
    let mut tree_adj = vec![Vec::new(); k];
    for (i, e) in tree.iter().enumerate() {
        tree_adj[e.a].push((e.b, i));
        tree_adj[e.b].push((e.a, i));
    }
    let paths = TreePaths::new(&tree_adj, &tree, &state.phi);

    let mut lightest: BTreeMap<(usize, usize), ClusterEdge> = BTreeMap::new();
    let mut dropped = 0;
    for &id in bucket {
        let e = g.edge(id);
        let (a, b) = (state.of[e.u], state.of[e.v]);
        if a == b {
            dropped += 1;
            continue;
        }
        let key = (a.min(b), a.max(b));
        let ce = ClusterEdge { a: key.0, b: key.1, w: e.w, source: id };
        match lightest.get(&key) {
            Some(old) if (old.w, old.source) <= (e.w, id) => dropped += 1,
            Some(_) => {
                dropped += 1;
                lightest.insert(key, ce);
            }
            None => {
                lightest.insert(key, ce);
            }
        }
    }
    let mut edges = Vec::new();
    for ce in lightest.into_values() {
        match paths.augmented(ce.a, ce.b, &state.phi) {
            Some(d) if d <= stretch_limit * ce.w => dropped += 1,
            _ => edges.push(ce),
        }
    }
    let mut edge_adj = vec![Vec::new(); k];
    for (i, e) in edges.iter().enumerate() {
        edge_adj[e.a].push((e.b, i));
        edge_adj[e.b].push((e.a, i));
    }
    PotentialClusterGraph {
        omega: state.phi.clone(),
        virt: state.virt.clone(),
        span: state.span.clone(),
        parent_w: state.parent_w.clone(),
        tree,
        tree_adj,
        edges,
        edge_adj,
        dropped,
        paths,
    }
}

/// Rooted forest with binary lifting for path queries.
#[derive(Clone, Debug)]
struct TreePaths {
    up: Vec<Vec<usize>>,
    depth: Vec<usize>,
    comp: Vec<usize>,
    /// Sum of node and edge weights from the root down to the node.
    prefix: Vec<f64>,
}

impl TreePaths {
    fn new(adj: &[Vec<(usize, usize)>], tree: &[NodeTreeEdge], omega: &[f64]) -> Self {
        let n = adj.len();
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![0; n];
        let mut comp = vec![usize::MAX; n];
        let mut prefix = vec![0.0; n];
        for r in 0..n {
            if comp[r] != usize::MAX {
                continue;
            }
            comp[r] = r;
            parent[r] = r;
            prefix[r] = omega[r];
            let mut stack = vec![r];
            while let Some(x) = stack.pop() {
                for &(y, e) in &adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = r;
                        parent[y] = x;
                        depth[y] = depth[x] + 1;
                        prefix[y] = prefix[x] + tree[e].w + omega[y];
                        stack.push(y);
                    }
                }
            }
        }
        let mut up = vec![parent];
        let mut span = 1;
        while span < n {
            let prev = up.last().unwrap();
            let next: Vec<usize> = (0..n).map(|v| prev[prev[v]]).collect();
            up.push(next);
            span *= 2;
        }
        TreePaths { up, depth, comp, prefix }
    }

    fn lca(&self, mut a: usize, mut b: usize) -> Option<usize> {
        if self.comp[a] != self.comp[b] {
            return None;
        }
        if self.depth[a] < self.depth[b] {
            std::mem::swap(&mut a, &mut b);
        }
        let mut diff = self.depth[a] - self.depth[b];
        let mut lvl = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                a = self.up[lvl][a];
            }
            diff >>= 1;
            lvl += 1;
        }
        if a == b {
            return Some(a);
        }
        for lvl in (0..self.up.len()).rev() {
            if self.up[lvl][a] != self.up[lvl][b] {
                a = self.up[lvl][a];
                b = self.up[lvl][b];
            }
        }
        Some(self.up[0][a])
    }

    fn augmented(&self, a: usize, b: usize, omega: &[f64]) -> Option<f64> {
        let l = self.lca(a, b)?;
        Some(self.prefix[a] + self.prefix[b] - 2.0 * self.prefix[l] + omega[l])
    }

    fn path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let l = self.lca(a, b)?;
        let mut left = vec![a];
        let mut x = a;
        while x != l {
            x = self.up[0][x];
            left.push(x);
        }
        let mut right = Vec::new();
        let mut y = b;
        while y != l {
            right.push(y);
            y = self.up[0][y];
        }
        left.extend(right.into_iter().rev());
        Some(left)
    }
}

/// Largest node-plus-edge weight of a shortest path inside the subgraph
/// `(nodes, edges)`, with node weights `omega`.
pub fn augmented_diameter(nodes: &[usize], edges: &[(usize, usize, f64)], omega: &[f64]) -> f64 {
    if nodes.is_empty() {
        return 0.0;
    }
    let local: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nodes.len()];
    for &(a, b, w) in edges {
        let (la, lb) = (local[&a], local[&b]);
        adj[la].push((lb, w + omega[b]));
        adj[lb].push((la, w + omega[a]));
    }
    let from = |s: usize| -> Vec<f64> {
        crate::pm::local_dijkstra(&adj, s).into_iter().map(|d| d + omega[nodes[s]]).collect()
    };
    let farthest = |d: &[f64]| -> (usize, f64) {
        d.iter()
            .enumerate()
            .filter(|(_, x)| x.is_finite())
            .fold((0, f64::NEG_INFINITY), |best, (i, &x)| if x > best.1 { (i, x) } else { best })
    };
    if edges.len() + 1 == nodes.len() {
        let (x, _) = farthest(&from(0));
        farthest(&from(x)).1
    } else {
        (0..nodes.len()).map(|s| farthest(&from(s)).1).fold(0.0, f64::max)
    }
}
