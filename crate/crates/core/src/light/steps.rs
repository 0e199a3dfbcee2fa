//! One level of clustering on a cluster graph: high-degree stars, branching
//! balls, blue-edge neighbourhoods, and the leftover trees and paths.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::cluster_graph::{augmented_diameter, PotentialClusterGraph};
use crate::error::SpannerError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubgraphKind {
    /// Around a node of large degree.
    HighStar,
    /// Truncated ball around a branching node of a long tree.
    Branching,
    /// One level edge with path neighbourhoods around both ends.
    BlueEdge,
    /// Piece of a long path holding one of its ends.
    Prefix,
    /// Piece from the middle of a long path.
    Internal,
    /// A whole short component of the tree with nothing to attach to.
    Component,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeClass {
    High,
    LowPlus,
    LowMinus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Subgraph {
    pub kind: SubgraphKind,
    pub nodes: Vec<usize>,
    /// Indices into the cluster graph's tree.
    pub tree_edges: Vec<usize>,
    /// Indices into the cluster graph's level edges.
    pub cluster_edges: Vec<usize>,
}

impl Subgraph {
    pub fn edge_triples(&self, cg: &PotentialClusterGraph) -> Vec<(usize, usize, f64)> {
        self.tree_edges
            .iter()
            .map(|&i| (cg.tree[i].a, cg.tree[i].b, cg.tree[i].w))
            .chain(self.cluster_edges.iter().map(|&i| (cg.edges[i].a, cg.edges[i].b, cg.edges[i].w)))
            .collect()
    }

    pub fn augmented_diameter(&self, cg: &PotentialClusterGraph) -> f64 {
        augmented_diameter(&self.nodes, &self.edge_triples(cg), &cg.omega)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    pub subgraphs: Vec<Subgraph>,
    pub class: Vec<NodeClass>,
    pub degenerate: bool,
    /// Augmented diameter of every long-path piece when it was cut.
    pub piece_diameters: Vec<f64>,
    /// Places where a fallback was needed.
    pub notes: Vec<String>,
}

const NONE: usize = usize::MAX;

struct Builder<'a> {
    cg: &'a PotentialClusterGraph,
    l: f64,
    assign: Vec<usize>,
    free: Vec<bool>,
    subs: Vec<Subgraph>,
    notes: Vec<String>,
}

struct Component {
    nodes: Vec<usize>,
    edges: Vec<usize>,
    adm: f64,
}

impl Component {
    fn degree_in(&self, cg: &PotentialClusterGraph, x: usize) -> usize {
        self.edges.iter().filter(|&&e| cg.tree[e].a == x || cg.tree[e].b == x).count()
    }

    fn is_path(&self, cg: &PotentialClusterGraph) -> bool {
        self.nodes.iter().all(|&x| self.degree_in(cg, x) <= 2)
    }
}

impl<'a> Builder<'a> {
    fn new_sub(&mut self, kind: SubgraphKind, nodes: Vec<usize>, tree_edges: Vec<usize>, cluster_edges: Vec<usize>) -> usize {
        let id = self.subs.len();
        for &x in &nodes {
            self.assign[x] = id;
            self.free[x] = false;
        }
        self.subs.push(Subgraph { kind, nodes, tree_edges, cluster_edges });
        id
    }

    fn attach(&mut self, s: usize, nodes: &[usize], tree_edges: &[usize], cluster_edges: &[usize]) {
        for &x in nodes {
            self.assign[x] = s;
            self.free[x] = false;
        }
        let sub = &mut self.subs[s];
        sub.nodes.extend_from_slice(nodes);
        sub.tree_edges.extend_from_slice(tree_edges);
        sub.cluster_edges.extend_from_slice(cluster_edges);
    }

    /// Moves all of `from` into `to` over the tree edge `e`.
    fn merge(&mut self, from: usize, to: usize, e: usize) {
        let moved = std::mem::replace(
            &mut self.subs[from],
            Subgraph { kind: SubgraphKind::Component, nodes: Vec::new(), tree_edges: Vec::new(), cluster_edges: Vec::new() },
        );
        let mut tree_edges = moved.tree_edges;
        tree_edges.push(e);
        self.attach(to, &moved.nodes, &tree_edges, &moved.cluster_edges);
    }

    fn free_components(&self) -> Vec<Component> {
        let cg = self.cg;
        let n = cg.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for r in 0..n {
            if !self.free[r] || seen[r] {
                continue;
            }
            seen[r] = true;
            let mut nodes = vec![r];
            let mut edges = Vec::new();
            let mut k = 0;
            while k < nodes.len() {
                let x = nodes[k];
                k += 1;
                for &(y, e) in &cg.tree_adj[x] {
                    if self.free[y] && !seen[y] {
                        seen[y] = true;
                        nodes.push(y);
                        edges.push(e);
                    }
                }
            }
            let triples: Vec<_> = edges.iter().map(|&e| (cg.tree[e].a, cg.tree[e].b, cg.tree[e].w)).collect();
            let adm = augmented_diameter(&nodes, &triples, &cg.omega);
            out.push(Component { nodes, edges, adm });
        }
        out
    }

    /// A tree edge from `x` to an assigned node, preferring the lightest.
    fn assigned_neighbor(&self, x: usize, accept: impl Fn(usize) -> bool) -> Option<(usize, usize)> {
        self.cg.tree_adj[x]
            .iter()
            .filter(|&&(y, _)| self.assign[y] != NONE && accept(self.assign[y]))
            .min_by(|a, b| self.cg.tree[a.1].w.total_cmp(&self.cg.tree[b.1].w).then(a.1.cmp(&b.1)))
            .copied()
    }

    fn non_virtual_count(&self, s: usize) -> usize {
        self.subs[s].nodes.iter().filter(|&&x| !self.cg.virt[x]).count()
    }

    fn step1(&mut self, high: &[bool]) {
        let cg = self.cg;
        let n = cg.n();
        for h in 0..n {
            if !high[h] || self.assign[h] != NONE || cg.edge_adj[h].iter().any(|&(y, _)| self.assign[y] != NONE) {
                continue;
            }
            let mut nodes = vec![h];
            let mut ce = Vec::new();
            for &(y, e) in &cg.edge_adj[h] {
                nodes.push(y);
                ce.push(e);
            }
            self.new_sub(SubgraphKind::HighStar, nodes, Vec::new(), ce);
        }
        let centers = self.subs.len();
        let mut first_pass = vec![false; n];
        for s in 0..centers {
            for &x in &self.subs[s].nodes {
                first_pass[x] = true;
            }
        }
        for h in 0..n {
            if !high[h] || self.assign[h] != NONE {
                continue;
            }
            match cg.edge_adj[h].iter().find(|&&(y, _)| first_pass[y]) {
                Some(&(y, e)) => {
                    let s = self.assign[y];
                    self.attach(s, &[h], &[], &[e]);
                }
                None => {
                    self.notes.push(format!("high node {h} has no star neighbour"));
                    self.new_sub(SubgraphKind::HighStar, vec![h], Vec::new(), Vec::new());
                }
            }
        }
        for x in 0..n {
            if self.assign[x] != NONE {
                continue;
            }
            if let Some(&(h, e)) = cg.edge_adj[x].iter().find(|&&(y, _)| high[y]) {
                let s = self.assign[h];
                self.attach(s, &[x], &[], &[e]);
            }
        }
    }

    fn step2(&mut self) -> Vec<usize> {
        let cg = self.cg;
        let mut made = Vec::new();
        loop {
            let comps = self.free_components();
            let pick = comps.iter().find_map(|c| {
                if c.adm < 6.0 * self.l {
                    return None;
                }
                let branching: Vec<usize> = c.nodes.iter().copied().filter(|&x| c.degree_in(cg, x) >= 3).collect();
                let best = branching
                    .iter()
                    .copied()
                    .filter(|&x| cg.is_non_isolated(x))
                    .min()
                    .or_else(|| branching.iter().copied().min())?;
                Some(best)
            });
            let Some(phi) = pick else { break };
            let mut dist = vec![f64::NAN; cg.n()];
            dist[phi] = cg.omega[phi];
            let mut nodes = vec![phi];
            let mut edges = Vec::new();
            let mut stack = vec![phi];
            while let Some(x) = stack.pop() {
                if dist[x] >= 2.0 * self.l {
                    continue;
                }
                for &(y, e) in &cg.tree_adj[x] {
                    if self.free[y] && dist[y].is_nan() {
                        dist[y] = dist[x] + cg.tree[e].w + cg.omega[y];
                        nodes.push(y);
                        edges.push(e);
                        stack.push(y);
                    }
                }
            }
            made.push(self.new_sub(SubgraphKind::Branching, nodes, edges, Vec::new()));
        }

        // Balls with a single non-virtual node that is also non-isolated get
        // folded into a neighbour.
        let mut changed = true;
        while changed {
            changed = false;
            for &s in &made {
                if self.subs[s].nodes.is_empty() || self.non_virtual_count(s) != 1 {
                    continue;
                }
                let only = self.subs[s].nodes.iter().copied().find(|&x| !cg.virt[x]).unwrap();
                if !cg.is_non_isolated(only) {
                    continue;
                }
                let nodes = self.subs[s].nodes.clone();
                let near = |b: &Builder, ok: &dyn Fn(usize) -> bool| {
                    nodes.iter().find_map(|&x| b.assigned_neighbor(x, |t| t != s && ok(t)))
                };
                let mut target = near(self, &|t| self.subs[t].kind == SubgraphKind::HighStar).or_else(|| {
                    near(self, &|t| self.subs[t].kind == SubgraphKind::Branching && self.non_virtual_count(t) >= 2)
                });
                if target.is_none() {
                    target = near(self, &|t| self.subs[t].kind == SubgraphKind::Branching);
                    if target.is_some() {
                        self.notes.push(format!("ball {s} merged into a ball with one non-virtual node"));
                    }
                }
                if let Some((y, e)) = target {
                    let to = self.assign[y];
                    self.merge(s, to, e);
                    changed = true;
                }
            }
        }
        made.into_iter().filter(|&s| !self.subs[s].nodes.is_empty()).collect()
    }

    fn step3(&mut self) {
        let cg = self.cg;
        let mut attach = Vec::new();
        for c in self.free_components() {
            if c.adm < 6.0 * self.l {
                continue;
            }
            if !c.is_path(cg) {
                self.notes.push("long tree with a branching node left after ball growing".into());
            }
            for &x in &c.nodes {
                if cg.tree_adj[x].len() >= 3 {
                    attach.push(x);
                }
            }
        }
        for x in attach {
            match self.assigned_neighbor(x, |_| true) {
                Some((y, e)) => {
                    let s = self.assign[y];
                    self.attach(s, &[x], &[e], &[]);
                }
                None => self.notes.push(format!("branching path node {x} has no assigned neighbour")),
            }
        }
    }

    fn step4(&mut self) {
        let cg = self.cg;
        loop {
            let comps = self.free_components();
            let mut where_: Vec<Option<(usize, usize)>> = vec![None; cg.n()];
            let mut paths = Vec::new();
            for c in comps {
                if c.adm < 6.0 * self.l || !c.is_path(cg) {
                    continue;
                }
                let p = path_order(cg, &c);
                let pre = augmented_prefix(cg, &p);
                let total = *pre.last().unwrap();
                for (pos, &x) in p.nodes.iter().enumerate() {
                    let from_start = pre[pos];
                    let to_end = total - pre[pos] + cg.omega[x];
                    if from_start > self.l && to_end > self.l {
                        where_[x] = Some((paths.len(), pos));
                    }
                }
                paths.push((p, pre));
            }
            let blue_edge = cg.edges.iter().enumerate().find_map(|(i, e)| match (where_[e.a], where_[e.b]) {
                (Some(a), Some(b)) => Some((i, a, b)),
                _ => None,
            });
            let Some((ei, (pa, ia), (pb, ib))) = blue_edge else { break };
            let seg = |p: usize, at: usize| -> Range<usize> {
                let (path, pre) = &paths[p];
                let om = |i: usize| cg.omega[path.nodes[i]];
                let mut lo = at;
                while lo > 0 && pre[at] - pre[lo - 1] + om(lo - 1) <= self.l {
                    lo -= 1;
                }
                let mut hi = at;
                while hi + 1 < path.nodes.len() && pre[hi + 1] - pre[at] + om(at) <= self.l {
                    hi += 1;
                }
                lo..hi + 1
            };
            let (ra, rb) = (seg(pa, ia), seg(pb, ib));
            let mut ranges = vec![(pa, ra.clone())];
            if pa == pb && ra.start <= rb.end && rb.start <= ra.end {
                ranges[0].1 = ra.start.min(rb.start)..ra.end.max(rb.end);
            } else {
                ranges.push((pb, rb));
            }
            let mut nodes = Vec::new();
            let mut edges = Vec::new();
            for (p, r) in ranges {
                let path = &paths[p].0;
                nodes.extend_from_slice(&path.nodes[r.clone()]);
                edges.extend_from_slice(&path.edges[r.start..r.end - 1]);
            }
            self.new_sub(SubgraphKind::BlueEdge, nodes, edges, vec![ei]);
        }
    }

    fn step5(&mut self) -> Vec<f64> {
        let cg = self.cg;
        let comps = self.free_components();
        let (short, long): (Vec<_>, Vec<_>) = comps.into_iter().partition(|c| c.adm < 6.0 * self.l);
        for c in short {
            let hook = c.nodes.iter().find_map(|&x| self.assigned_neighbor(x, |_| true));
            match hook {
                Some((y, e)) => {
                    let s = self.assign[y];
                    let mut edges = c.edges.clone();
                    edges.push(e);
                    self.attach(s, &c.nodes, &edges, &[]);
                }
                None => {
                    self.new_sub(SubgraphKind::Component, c.nodes, c.edges, Vec::new());
                }
            }
        }
        let mut piece_diameters = Vec::new();
        for c in long {
            if !c.is_path(cg) {
                self.notes.push("long component is not a path at the last step".into());
                self.new_sub(SubgraphKind::Component, c.nodes, c.edges, Vec::new());
                continue;
            }
            let p = path_order(cg, &c);
            let last = p.nodes.len() - 1;
            let hooks = [
                self.assigned_neighbor(p.nodes[0], |_| true),
                self.assigned_neighbor(p.nodes[last], |_| true),
            ];
            let spec: Vec<PathNode> = p
                .nodes
                .iter()
                .map(|&x| PathNode {
                    omega: cg.omega[x],
                    is_virtual: cg.virt[x],
                    non_isolated: cg.is_non_isolated(x),
                    span: cg.span[x],
                })
                .collect();
            let weights: Vec<f64> = p.edges.iter().map(|&e| cg.tree[e].w).collect();
            let ranges = match break_long_path(&spec, &weights, self.l) {
                Ok(r) => r,
                Err(err) => {
                    self.notes.push(err.to_string());
                    vec![0..p.nodes.len()]
                }
            };
            for r in ranges {
                let nodes = p.nodes[r.clone()].to_vec();
                let edges = p.edges[r.start..r.end - 1].to_vec();
                let triples: Vec<_> = edges.iter().map(|&e| (cg.tree[e].a, cg.tree[e].b, cg.tree[e].w)).collect();
                piece_diameters.push(augmented_diameter(&nodes, &triples, &cg.omega));
                let hook = if r.start == 0 && hooks[0].is_some() {
                    hooks[0]
                } else if r.end == last + 1 && hooks[1].is_some() {
                    hooks[1]
                } else {
                    None
                };
                match hook {
                    Some((y, e)) => {
                        let s = self.assign[y];
                        let mut edges = edges;
                        edges.push(e);
                        self.attach(s, &nodes, &edges, &[]);
                    }
                    None => {
                        let kind = if r.start == 0 || r.end == last + 1 {
                            SubgraphKind::Prefix
                        } else {
                            SubgraphKind::Internal
                        };
                        self.new_sub(kind, nodes, edges, Vec::new());
                    }
                }
            }
        }
        piece_diameters
    }
}

struct OrderedPath {
    nodes: Vec<usize>,
    /// `edges[i]` joins `nodes[i]` and `nodes[i+1]`.
    edges: Vec<usize>,
}

fn path_order(cg: &PotentialClusterGraph, c: &Component) -> OrderedPath {
    let in_comp: std::collections::HashSet<usize> = c.edges.iter().copied().collect();
    let start = c.nodes.iter().copied().filter(|&x| c.degree_in(cg, x) <= 1).min().unwrap_or(c.nodes[0]);
    let mut nodes = vec![start];
    let mut edges = Vec::new();
    let mut prev_edge = usize::MAX;
    let mut x = start;
    loop {
        let next = cg.tree_adj[x].iter().find(|&&(_, e)| e != prev_edge && in_comp.contains(&e));
        match next {
            Some(&(y, e)) if nodes.len() < c.nodes.len() => {
                nodes.push(y);
                edges.push(e);
                prev_edge = e;
                x = y;
            }
            _ => break,
        }
    }
    OrderedPath { nodes, edges }
}

/// `pre[i]` is the augmented length of the path prefix ending at node `i`.
fn augmented_prefix(cg: &PotentialClusterGraph, p: &OrderedPath) -> Vec<f64> {
    let mut pre = Vec::with_capacity(p.nodes.len());
    let mut acc = 0.0;
    for (i, &x) in p.nodes.iter().enumerate() {
        if i > 0 {
            acc += cg.tree[p.edges[i - 1]].w;
        }
        acc += cg.omega[x];
        pre.push(acc);
    }
    pre
}

/// Clusters the nodes of `cg` at scale `l` for a graph with parameters
/// `g_factor` and `eps`; every node ends in exactly one subgraph.
pub fn cluster_step(cg: &PotentialClusterGraph, l: f64, g_factor: f64, eps: f64) -> Clustering {
    let n = cg.n();
    let mut b = Builder {
        cg,
        l,
        assign: vec![NONE; n],
        free: vec![true; n],
        subs: Vec::new(),
        notes: Vec::new(),
    };
    let threshold = 2.0 * g_factor / eps;
    let high: Vec<bool> = (0..n).map(|x| cg.edge_adj[x].len() as f64 >= threshold).collect();
    b.step1(&high);
    b.step2();
    b.step3();
    b.step4();
    let degenerate = b.subs.is_empty();
    let piece_diameters = b.step5();

    let class = (0..n)
        .map(|x| {
            if degenerate {
                NodeClass::LowMinus
            } else if high[x] {
                NodeClass::High
            } else if b.subs[b.assign[x]].kind == SubgraphKind::Internal {
                NodeClass::LowMinus
            } else {
                NodeClass::LowPlus
            }
        })
        .collect();
    let subgraphs = b.subs.into_iter().filter(|s| !s.nodes.is_empty()).collect();
    Clustering { subgraphs, class, degenerate, piece_diameters, notes: b.notes }
}

/// Node of a long path handed to [`break_long_path`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathNode {
    pub omega: f64,
    pub is_virtual: bool,
    pub non_isolated: bool,
    /// Weight of the tree edges inside the node's cluster.
    pub span: f64,
}

/// Cuts a path of augmented diameter at least `6l` into consecutive pieces.
/// Runs of non-virtual nodes (and the two ends) joined by contracted edges
/// of weight at most `2l` are grouped two or three edges at a time; what is
/// left is cut greedily into pieces of augmented diameter at least `l`.
/// `weights[i]` joins nodes `i` and `i + 1`.
pub fn break_long_path(nodes: &[PathNode], weights: &[f64], l: f64) -> Result<Vec<Range<usize>>, SpannerError> {
    let len = nodes.len();
    if len == 0 || weights.len() + 1 != len {
        return Err(SpannerError::Invariant(format!(
            "path with {len} nodes needs {} edge weights, got {}",
            len.saturating_sub(1),
            weights.len()
        )));
    }
    let adm = |r: &Range<usize>| -> f64 {
        nodes[r.clone()].iter().map(|p| p.omega).sum::<f64>() + weights[r.start..r.end - 1].iter().sum::<f64>()
    };
    if adm(&(0..len)) < 6.0 * l {
        return Err(SpannerError::Invariant(format!(
            "path of augmented diameter {} is shorter than {}",
            adm(&(0..len)),
            6.0 * l
        )));
    }

    let kept: Vec<usize> = (0..len).filter(|&i| !nodes[i].is_virtual || i == 0 || i + 1 == len).collect();
    // contracted edge between kept[t] and kept[t+1]
    let contracted: Vec<f64> = kept
        .windows(2)
        .map(|w| weights[w[0]..w[1]].iter().sum::<f64>() + nodes[w[0] + 1..w[1]].iter().map(|p| p.span).sum::<f64>())
        .collect();

    let mut pieces: Vec<Range<usize>> = Vec::new();
    let mut t = 0;
    while t < kept.len() {
        let mut u = t;
        while u < contracted.len() && contracted[u] <= 2.0 * l {
            u += 1;
        }
        // kept[t..=u] is a maximal run
        let run = u - t + 1;
        if run >= 2 {
            let mut groups = vec![3; run / 3];
            match run % 3 {
                1 => *groups.last_mut().unwrap() += 1,
                2 => groups.push(2),
                _ => {}
            }
            let mut s = t;
            for gsize in groups {
                pieces.push(kept[s]..kept[s + gsize - 1] + 1);
                s += gsize;
            }
        }
        t = u + 1;
    }

    // Cut the gaps between grouped pieces.
    let mut out: Vec<Range<usize>> = Vec::new();
    let mut cursor = 0;
    let cut_gap = |from: usize, to: usize, out: &mut Vec<Range<usize>>| {
        if from >= to {
            return;
        }
        let first = out.len();
        let mut start = from;
        for i in from..to {
            if adm(&(start..i + 1)) >= l {
                out.push(start..i + 1);
                start = i + 1;
            }
        }
        if start < to {
            if out.len() > first {
                out.last_mut().unwrap().end = to;
            } else {
                out.push(start..to);
            }
        }
    };
    for p in pieces {
        cut_gap(cursor, p.start, &mut out);
        cursor = p.end;
        out.push(p);
    }
    cut_gap(cursor, len, &mut out);

    // Short pieces join their left neighbour, or the right one at the start.
    let mut merged: Vec<Range<usize>> = Vec::new();
    for r in out {
        match merged.last_mut() {
            Some(prev) if adm(prev) < l || adm(&r) < l => prev.end = r.end,
            _ => merged.push(r),
        }
    }
    Ok(merged)
}
