use serde::{Deserialize, Serialize};

use super::{EdgeId, VertexId, WeightedGraph};
use crate::dsu::ClassicUf;
use crate::error::GraphError;

/// Minimum spanning forest, rooted per component at its smallest vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MstResult {
    /// Roots in ascending order; the first one is vertex 0 when n > 0.
    pub roots: Vec<VertexId>,
    pub parent: Vec<Option<VertexId>>,
    /// Edge id (into the source graph) joining a vertex to its parent.
    pub parent_edge: Vec<Option<EdgeId>>,
    /// Tree edge ids sorted ascending.
    pub edges: Vec<EdgeId>,
    pub total_weight: f64,
    /// Vertices in BFS order from the roots; parents precede children.
    pub order: Vec<VertexId>,
    pub depth: Vec<usize>,
}

impl MstResult {
    pub fn root(&self) -> VertexId {
        self.roots[0]
    }

    pub fn is_tree(&self) -> bool {
        self.roots.len() <= 1
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.edges.binary_search(&id).is_ok()
    }

    /// Tree path between `a` and `b` as a list of edge ids, or `None` when
    /// they lie in different trees.
    pub fn path_edges(&self, mut a: VertexId, mut b: VertexId) -> Option<Vec<EdgeId>> {
        let mut left = Vec::new();
        let mut right = Vec::new();
        while self.depth[a] > self.depth[b] {
            left.push(self.parent_edge[a]?);
            a = self.parent[a]?;
        }
        while self.depth[b] > self.depth[a] {
            right.push(self.parent_edge[b]?);
            b = self.parent[b]?;
        }
        while a != b {
            left.push(self.parent_edge[a]?);
            right.push(self.parent_edge[b]?);
            a = self.parent[a]?;
            b = self.parent[b]?;
        }
        right.reverse();
        left.extend(right);
        Some(left)
    }
}

/// Kruskal over edges sorted by (w, min endpoint, max endpoint).
pub fn minimum_spanning_forest(g: &WeightedGraph) -> MstResult {
    let n = g.n();
    let mut ids: Vec<EdgeId> = (0..g.m()).collect();
    ids.sort_by(|&a, &b| {
        let (ea, eb) = (g.edge(a), g.edge(b));
        ea.w.total_cmp(&eb.w).then(ea.key().cmp(&eb.key()))
    });
    let mut uf = ClassicUf::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for id in ids {
        let e = g.edge(id);
        if uf.union(e.u, e.v) {
            tree.push(id);
        }
    }
    root_forest(g, tree)
}

/// Like [`minimum_spanning_forest`] but rejects disconnected input.
pub fn minimum_spanning_tree(g: &WeightedGraph) -> Result<MstResult, GraphError> {
    let f = minimum_spanning_forest(g);
    if f.roots.len() > 1 {
        return Err(GraphError::Disconnected {
            a: f.roots[0],
            b: f.roots[1],
        });
    }
    Ok(f)
}

fn root_forest(g: &WeightedGraph, mut tree: Vec<EdgeId>) -> MstResult {
    let n = g.n();
    tree.sort_unstable();
    let mut adj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); n];
    let mut total = 0.0;
    for &id in &tree {
        let e = g.edge(id);
        adj[e.u].push((e.v, id));
        adj[e.v].push((e.u, id));
        total += e.w;
    }
    let mut parent = vec![None; n];
    let mut parent_edge = vec![None; n];
    let mut depth = vec![0; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut roots = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        roots.push(s);
        seen[s] = true;
        let start = order.len();
        order.push(s);
        let mut head = start;
        while head < order.len() {
            let x = order[head];
            head += 1;
            for &(y, id) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    parent_edge[y] = Some(id);
                    depth[y] = depth[x] + 1;
                    order.push(y);
                }
            }
        }
    }
    MstResult {
        roots,
        parent,
        parent_edge,
        edges: tree,
        total_weight: total,
        order,
        depth,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, e: &[(usize, usize, f64)]) -> WeightedGraph {
        WeightedGraph::from_edges(n, e.iter().copied()).unwrap()
    }

    fn keys(gr: &WeightedGraph, t: &MstResult) -> Vec<(usize, usize)> {
        let mut k: Vec<_> = t.edges.iter().map(|&id| gr.edge(id).key()).collect();
        k.sort();
        k
    }

    #[test]
    fn triangle() {
        let gr = g(3, &[(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)]);
        let t = minimum_spanning_tree(&gr).unwrap();
        assert_eq!(keys(&gr, &t), vec![(0, 1), (1, 2)]);
        assert_eq!(t.total_weight, 3.0);
        assert_eq!(t.root(), 0);
        assert_eq!(t.parent[2], Some(1));
    }

    #[test]
    fn four_cycle_tie_break() {
        // Enumerate the four spanning trees (drop one cycle edge each) and
        // pick the lexicographically smallest sorted key list: with equal
        // weights, Kruskal's order keeps (0,1),(0,3),(1,2) and rejects (2,3).
        let gr = g(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]);
        let mut candidates: Vec<Vec<(usize, usize)>> = (0..4)
            .map(|drop| {
                let mut k: Vec<_> = gr
                    .edges()
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != drop)
                    .map(|(_, e)| e.key())
                    .collect();
                k.sort();
                k
            })
            .collect();
        candidates.sort();
        let t = minimum_spanning_tree(&gr).unwrap();
        assert_eq!(keys(&gr, &t), candidates[0]);
    }

    #[test]
    fn star_is_its_own_mst() {
        let gr = g(5, &[(0, 1, 1.0), (0, 2, 2.0), (0, 3, 3.0), (0, 4, 4.0)]);
        let t = minimum_spanning_tree(&gr).unwrap();
        assert_eq!(t.edges, vec![0, 1, 2, 3]);
        assert_eq!(t.total_weight, 10.0);
    }

    #[test]
    fn disconnected_witnesses() {
        let gr = g(4, &[(0, 1, 1.0), (2, 3, 1.0)]);
        assert_eq!(
            minimum_spanning_tree(&gr).unwrap_err(),
            GraphError::Disconnected { a: 0, b: 2 }
        );
        let f = minimum_spanning_forest(&gr);
        assert_eq!(f.roots, vec![0, 2]);
        assert_eq!(f.path_edges(0, 3), None);
    }

    #[test]
    fn tree_paths() {
        let gr = g(5, &[(0, 1, 1.0), (1, 2, 1.0), (1, 3, 1.0), (3, 4, 1.0)]);
        let t = minimum_spanning_tree(&gr).unwrap();
        assert_eq!(t.path_edges(2, 4).unwrap(), vec![1, 2, 3]);
        assert_eq!(t.path_edges(4, 4).unwrap(), Vec::<usize>::new());
    }
}
