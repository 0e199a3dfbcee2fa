use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{VertexId, WeightedGraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceMap {
    pub source: VertexId,
    pub dist: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq)]
pub(crate) struct HeapItem {
    pub d: f64,
    pub v: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.d.total_cmp(&self.d).then_with(|| other.v.cmp(&self.v))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `source`; unreachable vertices get `f64::INFINITY`.
pub fn sssp_distances(g: &WeightedGraph, source: VertexId) -> DistanceMap {
    let adj = g.adjacency();
    let mut dist = vec![f64::INFINITY; g.n()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapItem { d: 0.0, v: source });
    while let Some(HeapItem { d, v }) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(y, id) in adj.neighbors(v) {
            let nd = d + g.edge(id).w;
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(HeapItem { d: nd, v: y });
            }
        }
    }
    DistanceMap { source, dist }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_and_shortcut() {
        let g = WeightedGraph::from_edges(3, vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(sssp_distances(&g, 0).dist, vec![0.0, 1.0, 2.0]);
        let g = WeightedGraph::from_edges(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 10.0)]).unwrap();
        assert_eq!(sssp_distances(&g, 0).dist[2], 2.0);
    }

    #[test]
    fn unreachable_is_infinite() {
        let g = WeightedGraph::from_edges(3, vec![(0, 1, 1.0)]).unwrap();
        let d = sssp_distances(&g, 0);
        assert_eq!(d.source, 0);
        assert!(d.dist[2].is_infinite());
    }
}
