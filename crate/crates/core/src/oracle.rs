//! Ground truth for judging spanners: the greedy baseline, exact per-edge
//! stretch, sparsity and lightness. Shortest paths and the MST weight are
//! computed here with their own code, not with the graph module's.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::OracleError;
use crate::graph::{EdgeId, WeightedGraph};

/// Relative slack on every ratio comparison.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

type Adj = Vec<Vec<(usize, f64)>>;

fn adjacency(n: usize, edges: impl Iterator<Item = (usize, usize, f64)>) -> Adj {
    let mut adj = vec![Vec::new(); n];
    for (u, v, w) in edges {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    adj
}

/// Dijkstra from `s` that stops once every vertex in `targets` is settled or
/// the frontier passes `cutoff`.
fn dijkstra(adj: &Adj, s: usize, targets: &[usize], cutoff: f64) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut done = vec![false; adj.len()];
    let mut is_target = vec![false; adj.len()];
    let mut want = 0;
    for &t in targets {
        if !std::mem::replace(&mut is_target[t], true) {
            want += 1;
        }
    }
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(Entry(0.0, s));
    while let Some(Entry(d, x)) = heap.pop() {
        if done[x] {
            continue;
        }
        if d > cutoff {
            break;
        }
        done[x] = true;
        if is_target[x] {
            want -= 1;
            if want == 0 {
                break;
            }
        }
        for &(y, w) in &adj[x] {
            let nd = d + w;
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(Entry(nd, y));
            }
        }
    }
    for (x, d) in dist.iter_mut().enumerate() {
        if !done[x] {
            *d = f64::INFINITY;
        }
    }
    dist
}

/// Greedy spanner: edges in nondecreasing weight (ties by id), each kept iff
/// the current spanner distance between its ends exceeds `t * w`.
pub fn greedy_spanner(g: &WeightedGraph, t: f64) -> Vec<EdgeId> {
    let mut order: Vec<EdgeId> = (0..g.m()).collect();
    order.sort_by(|&a, &b| g.edge(a).w.total_cmp(&g.edge(b).w).then(a.cmp(&b)));
    let mut adj: Adj = vec![Vec::new(); g.n()];
    let mut kept = Vec::new();
    for id in order {
        let e = g.edge(id);
        let d = dijkstra(&adj, e.u, &[e.v], t * e.w)[e.v];
        if d > t * e.w {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
            kept.push(id);
        }
    }
    kept.sort_unstable();
    kept
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBucket {
    pub range: String,
    pub count: usize,
}

const HISTOGRAM_EDGES: [f64; 7] = [1.0, 1.5, 2.0, 3.0, 5.0, 9.0, 17.0];

fn histogram(stretches: &[f64]) -> Vec<HistogramBucket> {
    let mut labels = vec![format!("<={}", HISTOGRAM_EDGES[0])];
    for w in HISTOGRAM_EDGES.windows(2) {
        labels.push(format!("({},{}]", w[0], w[1]));
    }
    labels.push(format!(">{}", HISTOGRAM_EDGES[HISTOGRAM_EDGES.len() - 1]));
    labels.push("inf".to_string());
    let mut counts = vec![0; labels.len()];
    for &s in stretches {
        let slot = if s.is_infinite() {
            labels.len() - 1
        } else {
            HISTOGRAM_EDGES
                .iter()
                .position(|&b| s <= b * (1.0 + TOLERANCE))
                .unwrap_or(HISTOGRAM_EDGES.len())
        };
        counts[slot] += 1;
    }
    labels
        .into_iter()
        .zip(counts)
        .map(|(range, count)| HistogramBucket { range, count })
        .collect()
}

fn ser_stretch<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str("inf")
    }
}

fn de_stretch<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(x) => Ok(x),
        Raw::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Raw::Text(t) => Err(serde::de::Error::custom(format!("bad stretch {t:?}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StretchReport {
    #[serde(serialize_with = "ser_stretch", deserialize_with = "de_stretch")]
    pub max_stretch: f64,
    pub witness: Option<(usize, usize, f64)>,
    pub target: f64,
    pub pass: bool,
    pub histogram_buckets: Vec<HistogramBucket>,
}

/// Largest `d_H(u,v) / w(u,v)` over the edges of `g`, where `h` must be a
/// subgraph of `g` with inherited weights.
pub fn verify_stretch(g: &WeightedGraph, h: &WeightedGraph, t: f64) -> Result<StretchReport, OracleError> {
    if g.n() != h.n() {
        return Err(OracleError::VertexCount { graph: g.n(), spanner: h.n() });
    }
    let mut index: HashMap<(usize, usize), f64> = HashMap::with_capacity(g.m());
    for e in g.edges() {
        index.insert((e.u.min(e.v), e.u.max(e.v)), e.w);
    }
    for e in h.edges() {
        match index.get(&(e.u.min(e.v), e.u.max(e.v))) {
            Some(&w) if w == e.w => {}
            _ => return Err(OracleError::NotSubgraph { u: e.u, v: e.v, w: e.w }),
        }
    }
    let adj = adjacency(h.n(), h.edges().iter().map(|e| (e.u, e.v, e.w)));
    let mut by_source: Vec<Vec<(usize, f64)>> = vec![Vec::new(); g.n()];
    for e in g.edges() {
        by_source[e.u.min(e.v)].push((e.u.max(e.v), e.w));
    }
    let per_source: Vec<Vec<(usize, usize, f64, f64)>> = by_source
        .par_iter()
        .enumerate()
        .filter(|(_, t)| !t.is_empty())
        .map(|(u, targets)| {
            let ids: Vec<usize> = targets.iter().map(|&(v, _)| v).collect();
            let dist = dijkstra(&adj, u, &ids, f64::INFINITY);
            targets.iter().map(|&(v, w)| (u, v, w, dist[v] / w)).collect()
        })
        .collect();

    let mut stretches = Vec::with_capacity(g.m());
    let mut max_stretch = if g.m() == 0 { 1.0 } else { 0.0 };
    let mut witness = None;
    for (u, v, w, s) in per_source.into_iter().flatten() {
        stretches.push(s);
        if s > max_stretch || witness.is_none() {
            max_stretch = s.max(max_stretch);
            witness = Some((u, v, w));
        }
    }
    Ok(StretchReport {
        max_stretch,
        witness,
        target: t,
        pass: max_stretch <= t * (1.0 + TOLERANCE),
        histogram_buckets: histogram(&stretches),
    })
}

/// [`verify_stretch`] for an edge-id subset of `g`.
pub fn verify_edge_subset(g: &WeightedGraph, edges: &[EdgeId], t: f64) -> Result<StretchReport, OracleError> {
    if let Some(&bad) = edges.iter().find(|&&id| id >= g.m()) {
        return Err(OracleError::UnknownEdge(bad));
    }
    verify_stretch(g, &g.subgraph(edges), t)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityMetrics {
    pub edges: usize,
    pub weight: f64,
    pub mst_weight: f64,
    pub sparsity: f64,
    pub lightness: f64,
}

/// Weight of a minimum spanning forest by Prim's algorithm.
pub fn mst_weight(g: &WeightedGraph) -> f64 {
    let adj = adjacency(g.n(), g.edges().iter().map(|e| (e.u, e.v, e.w)));
    let mut inside = vec![false; g.n()];
    let mut total = 0.0;
    for s in 0..g.n() {
        if inside[s] {
            continue;
        }
        let mut heap = BinaryHeap::new();
        heap.push(Entry(0.0, s));
        while let Some(Entry(w, x)) = heap.pop() {
            if inside[x] {
                continue;
            }
            inside[x] = true;
            total += w;
            for &(y, wy) in &adj[x] {
                if !inside[y] {
                    heap.push(Entry(wy, y));
                }
            }
        }
    }
    total
}

pub fn spanner_metrics(g: &WeightedGraph, h: &WeightedGraph) -> QualityMetrics {
    let weight: f64 = h.edges().iter().map(|e| e.w).sum();
    let mst = mst_weight(g);
    let tree_size = g.n().saturating_sub(1);
    QualityMetrics {
        edges: h.m(),
        weight,
        mst_weight: mst,
        sparsity: if tree_size == 0 { 0.0 } else { h.m() as f64 / tree_size as f64 },
        lightness: if mst > 0.0 { weight / mst } else { 0.0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wg(n: usize, e: &[(usize, usize, f64)]) -> WeightedGraph {
        WeightedGraph::from_edges(n, e.to_vec()).unwrap()
    }

    #[test]
    fn greedy_examples() {
        let c4 = wg(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]);
        assert_eq!(greedy_spanner(&c4, 3.0), vec![0, 1, 2]);
        let tri = wg(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 2.0)]);
        assert_eq!(greedy_spanner(&tri, 1.0), vec![0, 1]);
        let tree = wg(4, &[(0, 1, 4.0), (1, 2, 1.0), (1, 3, 9.0)]);
        assert_eq!(greedy_spanner(&tree, 5.0), vec![0, 1, 2]);
    }

    #[test]
    fn stretch_examples() {
        let tri = wg(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]);
        let r = verify_stretch(&tri, &tri, 1.0).unwrap();
        assert_eq!(r.max_stretch, 1.0);
        assert!(r.pass);
        let r = verify_edge_subset(&tri, &[0, 1], 1.5).unwrap();
        assert_eq!(r.max_stretch, 2.0);
        assert!(!r.pass);
        assert_eq!(r.witness, Some((0, 2, 1.0)));

        let path = wg(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        let r = verify_edge_subset(&path, &[0], 100.0).unwrap();
        assert!(r.max_stretch.is_infinite());
        assert!(!r.pass);
        assert_eq!(r.witness, Some((1, 2, 1.0)));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"max_stretch\":\"inf\""));
        let back: StretchReport = serde_json::from_str(&json).unwrap();
        assert!(back.max_stretch.is_infinite());
    }

    #[test]
    fn rejects_non_subgraph() {
        let g = wg(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        let h = wg(3, &[(0, 2, 1.0)]);
        assert!(matches!(verify_stretch(&g, &h, 1.0), Err(OracleError::NotSubgraph { .. })));
        let h = wg(3, &[(0, 1, 2.0)]);
        assert!(verify_stretch(&g, &h, 1.0).is_err());
    }

    #[test]
    fn metrics_examples() {
        let mut e = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                e.push((a, b, 1.0));
            }
        }
        let k4 = wg(4, &e);
        let m = spanner_metrics(&k4, &k4);
        assert_eq!((m.sparsity, m.lightness), (2.0, 2.0));
        let tree = wg(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]);
        let m = spanner_metrics(&k4, &tree);
        assert_eq!((m.sparsity, m.lightness), (1.0, 1.0));
    }
}
