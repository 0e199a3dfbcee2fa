//! Edge selection for one level of the heavy-edge construction.

use super::cluster_graph::PotentialClusterGraph;
use super::steps::{Clustering, NodeClass};
use crate::error::SpannerError;
use crate::graph::EdgeId;
use crate::hz::{hz_spanner, UnweightedGraph};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Selection {
    /// Source edges of the input graph, ascending.
    pub edges: Vec<EdgeId>,
    /// Edges first added by each of the three rules.
    pub step_counts: [usize; 3],
}

/// Level edges inside each subgraph, a (2k-1)-spanner of the edges among
/// high nodes, and every edge touching a low node.
pub fn select_level_edges(cg: &PotentialClusterGraph, c: &Clustering, k: usize) -> Result<Selection, SpannerError> {
    let mut chosen = vec![false; cg.edges.len()];
    let mut counts = [0; 3];
    let mut take = |i: usize, step: usize, chosen: &mut Vec<bool>| {
        if !chosen[i] {
            chosen[i] = true;
            counts[step] += 1;
        }
    };
    for x in &c.subgraphs {
        for &i in &x.cluster_edges {
            take(i, 0, &mut chosen);
        }
    }

    let mut local = vec![usize::MAX; cg.n()];
    let mut high_count = 0;
    for (x, cl) in c.class.iter().enumerate() {
        if *cl == NodeClass::High {
            local[x] = high_count;
            high_count += 1;
        }
    }
    let high_edges: Vec<usize> = (0..cg.edges.len())
        .filter(|&i| local[cg.edges[i].a] != usize::MAX && local[cg.edges[i].b] != usize::MAX)
        .collect();
    if !high_edges.is_empty() {
        let kg = UnweightedGraph::new(
            high_count,
            high_edges.iter().map(|&i| (local[cg.edges[i].a], local[cg.edges[i].b])).collect(),
        )?;
        for j in hz_spanner(&kg, k)?.edges {
            take(high_edges[j], 1, &mut chosen);
        }
    }

    for (i, e) in cg.edges.iter().enumerate() {
        if c.class[e.a] != NodeClass::High || c.class[e.b] != NodeClass::High {
            take(i, 2, &mut chosen);
        }
    }
    let mut edges: Vec<EdgeId> = (0..cg.edges.len()).filter(|&i| chosen[i]).map(|i| cg.edges[i].source).collect();
    edges.sort_unstable();
    Ok(Selection { edges, step_counts: counts })
}
