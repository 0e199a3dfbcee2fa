//! The subdivided MST and the level-1 clusters built on it.

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, MstResult, WeightedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub w: f64,
    /// MST edge of the input graph this piece came from.
    pub origin: EdgeId,
}

/// MST with heavy edges split by virtual vertices. Vertices `0..n` are the
/// input vertices, `n..` are virtual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubdividedMst {
    pub n_original: usize,
    pub w_bar: f64,
    pub edges: Vec<TreeEdge>,
    /// For each virtual vertex (index `v - n_original`), its parent edge.
    pub virtual_parent: Vec<EdgeId>,
    #[serde(skip)]
    adj: Vec<Vec<(usize, usize)>>,
}

impl SubdividedMst {
    pub fn n_total(&self) -> usize {
        self.n_original + self.virtual_parent.len()
    }

    pub fn is_virtual(&self, v: usize) -> bool {
        v >= self.n_original
    }

    pub fn parent_edge(&self, v: usize) -> Option<EdgeId> {
        v.checked_sub(self.n_original).map(|i| self.virtual_parent[i])
    }

    /// `(neighbour, tree edge index)` pairs.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    fn rebuild_adjacency(&mut self) {
        let mut adj = vec![Vec::new(); self.n_total()];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.a].push((e.b, i));
            adj[e.b].push((e.a, i));
        }
        self.adj = adj;
    }
}

/// Splits every MST edge heavier than `w_bar` into `ceil(w / w_bar)` pieces:
/// full pieces of `w_bar` and a lighter last one.
pub fn subdivide_mst(g: &WeightedGraph, mst: &MstResult, w_bar: f64) -> SubdividedMst {
    let n = g.n();
    let mut out = SubdividedMst {
        n_original: n,
        w_bar,
        edges: Vec::new(),
        virtual_parent: Vec::new(),
        adj: Vec::new(),
    };
    for &id in &mst.edges {
        let e = g.edge(id);
        if !(e.w > w_bar) {
            out.edges.push(TreeEdge { a: e.u, b: e.v, w: e.w, origin: id });
            continue;
        }
        let mut pieces = (e.w / w_bar).ceil() as usize;
        while pieces > 1 && (pieces - 1) as f64 * w_bar >= e.w {
            pieces -= 1;
        }
        let mut prev = e.u;
        for p in 0..pieces {
            let w = if p + 1 == pieces { e.w - (pieces - 1) as f64 * w_bar } else { w_bar };
            let next = if p + 1 == pieces {
                e.v
            } else {
                out.virtual_parent.push(id);
                n + out.virtual_parent.len() - 1
            };
            out.edges.push(TreeEdge { a: prev, b: next, w, origin: id });
            prev = next;
        }
    }
    out.rebuild_adjacency();
    out
}

/// Partition of the subdivided tree into connected subtrees.
#[derive(Clone, Debug, PartialEq)]
pub struct Level1Clusters {
    pub of: Vec<usize>,
    /// Weighted tree diameter of each cluster.
    pub diameter: Vec<f64>,
    /// Whether the cluster is a whole component of the tree.
    pub whole_component: Vec<bool>,
}

/// Bottom-up clustering: a child is absorbed when its cluster is still open
/// and the joining edge is at most `l0`; a cluster closes once its height
/// reaches `l0`. Open leftovers join a closed child cluster over an edge of
/// weight at most `l0` when there is one.
pub fn level1_clusters(t: &SubdividedMst, l0: f64) -> Level1Clusters {
    let nt = t.n_total();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nt];
    let mut order = Vec::with_capacity(nt);
    let mut seen = vec![false; nt];
    let mut comp = vec![usize::MAX; nt];
    let mut comp_count = 0;
    for root in 0..nt {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let start = order.len();
        order.push(root);
        let mut k = start;
        while k < order.len() {
            let x = order[k];
            comp[x] = comp_count;
            k += 1;
            for &(y, e) in t.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, e));
                    order.push(y);
                }
            }
        }
        comp_count += 1;
    }

    // Union-find over tree vertices with labels kept at the cluster top.
    let mut uf = crate::dsu::ClassicUf::new(nt);
    let mut open = vec![true; nt];
    let mut height = vec![0.0f64; nt];
    for &v in order.iter().rev() {
        // children were handled earlier in reverse BFS order
        if height[v] >= l0 {
            open[v] = false;
        }
        if let Some((p, e)) = parent[v] {
            let w = t.edges[e].w;
            if open[v] && w <= l0 {
                uf.union(v, p);
                height[p] = height[p].max(height[v] + w);
            }
        }
    }
    // Leftover open clusters: tops that were not absorbed.
    for &v in &order {
        let top = uf.find(v);
        if top != v || !open[v] || height[v] >= l0 {
            continue;
        }
        let target = t
            .neighbors(v)
            .iter()
            .filter(|&&(y, e)| parent[y] == Some((v, e)) && t.edges[e].w <= l0 && uf.find(y) == y && !open[y])
            .map(|&(y, _)| y)
            .min();
        if let Some(y) = target {
            uf.union(v, y);
        }
    }

    let mut id = vec![usize::MAX; nt];
    let mut of = vec![0; nt];
    let mut count = 0;
    for v in 0..nt {
        let r = uf.find(v);
        if id[r] == usize::MAX {
            id[r] = count;
            count += 1;
        }
        of[v] = id[r];
    }
    let diameter = cluster_tree_diameters(t, &of, count);
    let mut comps_of_cluster = vec![usize::MAX; count];
    let mut clusters_in_comp = vec![0usize; comp_count];
    for v in 0..nt {
        if comps_of_cluster[of[v]] == usize::MAX {
            comps_of_cluster[of[v]] = comp[v];
            clusters_in_comp[comp[v]] += 1;
        }
    }
    let whole_component = (0..count).map(|c| clusters_in_comp[comps_of_cluster[c]] == 1).collect();
    Level1Clusters { of, diameter, whole_component }
}

/// Tree diameter of every cluster, using only tree edges inside it.
pub fn cluster_tree_diameters(t: &SubdividedMst, of: &[usize], count: usize) -> Vec<f64> {
    let nt = t.n_total();
    let mut diameter = vec![0.0; count];
    let mut done = vec![false; count];
    let mut dist = vec![f64::NAN; nt];
    let mut touched = Vec::new();
    let sweep = |s: usize, dist: &mut Vec<f64>, touched: &mut Vec<usize>| -> (usize, f64) {
        for &x in touched.iter() {
            dist[x] = f64::NAN;
        }
        touched.clear();
        dist[s] = 0.0;
        touched.push(s);
        let mut stack = vec![s];
        let mut best = (s, 0.0);
        while let Some(x) = stack.pop() {
            if dist[x] > best.1 {
                best = (x, dist[x]);
            }
            for &(y, e) in t.neighbors(x) {
                if of[y] == of[s] && dist[y].is_nan() {
                    dist[y] = dist[x] + t.edges[e].w;
                    touched.push(y);
                    stack.push(y);
                }
            }
        }
        best
    };
    for v in 0..nt {
        let c = of[v];
        if done[c] {
            continue;
        }
        done[c] = true;
        let (far, _) = sweep(v, &mut dist, &mut touched);
        diameter[c] = sweep(far, &mut dist, &mut touched).1;
    }
    diameter
}
