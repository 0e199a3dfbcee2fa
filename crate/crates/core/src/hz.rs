//! Deterministic (2k-1)-spanner for unweighted simple graphs by ball
//! growing: a ball around the next surviving vertex grows until the next
//! layer is at most n^(1/k) times larger, the BFS tree of the enlarged ball
//! is kept, and the inner ball is deleted.

use std::collections::HashSet;

use crate::error::HzError;

/// Default constant in the size bound `C_hz * n^(1+1/k) + n`.
pub const C_HZ: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnweightedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl UnweightedGraph {
    /// Rejects self-loops and parallel edges.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, HzError> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut adj = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(HzError::OutOfRange { id: u.max(v), n });
            }
            if u == v {
                return Err(HzError::SelfLoop(u));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(HzError::Parallel(u.min(v), u.max(v)));
            }
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        Ok(UnweightedGraph { n, edges, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HzOutput {
    /// Indices into the input edge list, ascending.
    pub edges: Vec<usize>,
    pub ops: u64,
}

pub fn hz_spanner(g: &UnweightedGraph, k: usize) -> Result<HzOutput, HzError> {
    if k == 0 {
        return Err(HzError::ZeroK);
    }
    let n = g.n;
    let growth = (n.max(1) as f64).powf(1.0 / k as f64);
    let mut removed = vec![false; n];
    let mut stamp = vec![usize::MAX; n];
    let mut tree_edge = vec![usize::MAX; n];
    let mut keep = vec![false; g.m()];
    let mut ops = 0u64;

    let mut ball: Vec<usize> = Vec::new();
    let mut frontier: Vec<usize> = Vec::new();
    let mut layer: Vec<usize> = Vec::new();
    for v in 0..n {
        if removed[v] {
            continue;
        }
        ball.clear();
        frontier.clear();
        ball.push(v);
        frontier.push(v);
        stamp[v] = v;
        let mut radius = 0;
        loop {
            layer.clear();
            for &x in &frontier {
                for &(y, id) in &g.adj[x] {
                    ops += 1;
                    if removed[y] || stamp[y] == v {
                        continue;
                    }
                    stamp[y] = v;
                    tree_edge[y] = id;
                    layer.push(y);
                }
            }
            let inner = ball.len();
            let outer = inner + layer.len();
            if outer as f64 <= growth * inner as f64 || radius + 1 >= k {
                break;
            }
            ball.extend_from_slice(&layer);
            std::mem::swap(&mut frontier, &mut layer);
            radius += 1;
        }
        for &y in ball.iter().skip(1).chain(layer.iter()) {
            keep[tree_edge[y]] = true;
        }
        for &x in &ball {
            removed[x] = true;
        }
        // Layer vertices stay in play for later balls.
        for &y in &layer {
            stamp[y] = usize::MAX;
        }
    }
    let edges = (0..g.m()).filter(|&i| keep[i]).collect();
    Ok(HzOutput { edges, ops })
}

/// Hop distances from `s` in the subgraph formed by `edge_ids`.
pub fn hop_distances(g: &UnweightedGraph, edge_ids: &[usize], s: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); g.n];
    for &id in edge_ids {
        let (u, v) = g.edges[id];
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut dist = vec![usize::MAX; g.n];
    let mut queue = std::collections::VecDeque::new();
    dist[s] = 0;
    queue.push_back(s);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Largest per-edge hop stretch of `edge_ids` over all edges of `g`.
pub fn max_hop_stretch(g: &UnweightedGraph, edge_ids: &[usize]) -> usize {
    let mut worst = 0;
    let mut by_source: Vec<Vec<usize>> = vec![Vec::new(); g.n];
    for &(u, v) in &g.edges {
        by_source[u].push(v);
    }
    for (u, targets) in by_source.iter().enumerate() {
        if targets.is_empty() {
            continue;
        }
        let d = hop_distances(g, edge_ids, u);
        for &v in targets {
            worst = worst.max(d[v]);
        }
    }
    worst
}
