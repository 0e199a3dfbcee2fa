//! Level-by-level spanner on the pointer machine: classic union-find
//! clusters, one unweighted spanner call per level on the representative
//! graph, and star-cover merges.

use rayon::prelude::*;

use crate::buckets::{partition_edge_ids, ClassLevels, Grid};
use crate::cluster::{check_star_cover, dedupe_source_edges, grow_star_cover, RepresentativeGraph};
use crate::dsu::ClassicUf;
use crate::error::SpannerError;
use crate::graph::{EdgeId, WeightedGraph};
use crate::hz::{hz_spanner, UnweightedGraph};
use crate::spanner::{BuildParams, BuildReport, ClusterReport, LevelRecord, Spanner};

/// Cluster diameter budget factor.
pub const G_PM: f64 = 9.0;

/// Internal epsilon for the pm and linear builders.
pub fn internal_eps(eps: f64, nominal: bool) -> f64 {
    if nominal {
        eps
    } else {
        (eps / (8.0 * G_PM + 1.0)).min(1.0 / (2.0 * G_PM))
    }
}

/// Only graphs up to this size get the in-cluster diameter check.
pub(crate) const DIAMETER_CHECK_MAX_N: usize = 200;

pub fn build_pm(g: &WeightedGraph, params: &BuildParams) -> Result<Spanner, SpannerError> {
    params.validate()?;
    let eps = internal_eps(params.eps, params.nominal_eps);
    let mut report = ClusterReport {
        g: G_PM,
        internal_eps: eps,
        ..ClusterReport::default()
    };
    if g.m() == 0 {
        let mut s = Spanner::new("pm", params, g.n(), Vec::new());
        if params.instrument {
            s.report = Some(BuildReport::Pm(report));
        }
        return Ok(s);
    }
    let grid = Grid::new(eps, g.min_weight().unwrap_or(1.0))?;
    let all: Vec<EdgeId> = (0..g.m()).collect();
    let buckets = partition_edge_ids(g, &all, grid)?;
    let outputs: Vec<ClassOutput> = buckets
        .classes
        .par_iter()
        .map(|(&sigma, class)| run_class(g, &grid, sigma, class, params))
        .collect::<Result<_, _>>()?;

    let mut edges = Vec::new();
    let mut ops = 0;
    for out in outputs {
        edges.extend(out.edges);
        ops += out.ops;
        report.levels.extend(out.levels);
        report.violations.extend(out.violations);
    }
    let mut s = Spanner::new("pm", params, g.n(), edges);
    s.ops = ops;
    if params.instrument {
        s.report = Some(BuildReport::Pm(report));
    }
    Ok(s)
}

#[derive(Default)]
struct ClassOutput {
    edges: Vec<EdgeId>,
    ops: u64,
    levels: Vec<LevelRecord>,
    violations: Vec<String>,
}

fn run_class(
    g: &WeightedGraph,
    grid: &Grid,
    sigma: usize,
    class: &ClassLevels,
    params: &BuildParams,
) -> Result<ClassOutput, SpannerError> {
    let n = g.n();
    let mut uf = ClassicUf::new(n);
    let mut out = ClassOutput::default();
    let mut total_delta = 0usize;
    for (i, bucket) in &class.levels {
        let sources = dedupe_source_edges(g, bucket, |v| uf.find(v));
        let mut rec = LevelRecord {
            sigma,
            i: *i,
            bucket_edges: bucket.len(),
            ..LevelRecord::default()
        };
        if sources.is_empty() {
            if params.instrument {
                out.levels.push(rec);
            }
            continue;
        }
        let rg = RepresentativeGraph::build(&sources);
        let hz = hz_spanner(&rg.graph, params.k)?;
        out.ops += hz.ops;
        out.edges.extend(hz.edges.iter().map(|&j| rg.source[j]));

        let selected = UnweightedGraph::new(rg.graph.n(), hz.edges.iter().map(|&j| rg.graph.edges()[j]).collect())?;
        let parts = grow_star_cover(&selected)?;
        if params.check {
            if let Err(e) = check_star_cover(&selected, &parts) {
                out.violations.push(format!("pm sigma={sigma} i={i}: star cover: {e}"));
            }
        }
        let mut delta = 0;
        let mut merged: Vec<usize> = Vec::new();
        for p in &parts {
            let center = rg.reps[p.center];
            for &x in &p.nodes {
                if x != p.center {
                    uf.union(rg.reps[x], center);
                }
            }
            delta += p.nodes.len() - 1;
            merged.push(center);
        }
        total_delta += delta;
        rec.rep_vertices = rg.reps.len();
        rec.selected_edges = hz.edges.len();
        rec.delta = delta;

        if params.check {
            if 2 * delta < rg.reps.len() {
                out.violations.push(format!(
                    "pm sigma={sigma} i={i}: cluster drop {delta} below half of {}",
                    rg.reps.len()
                ));
            }
            if n <= DIAMETER_CHECK_MAX_N {
                let bound = G_PM * grid.level_scale(sigma, *i as i64);
                let labels: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
                for &c in &merged {
                    let members: Vec<usize> = (0..n).filter(|&v| labels[v] == c).collect();
                    let d = induced_diameter(g, &out.edges, &members);
                    if d > bound * (1.0 + 1e-9) {
                        out.violations.push(format!(
                            "pm sigma={sigma} i={i}: cluster of {} vertices has diameter {d} > {bound}",
                            members.len()
                        ));
                    }
                }
            }
        }
        if params.instrument {
            out.levels.push(rec);
        }
    }
    if params.check && total_delta > n {
        out.violations.push(format!("pm sigma={sigma}: total cluster drop {total_delta} exceeds n={n}"));
    }
    out.ops += uf.ops();
    Ok(out)
}

/// Weighted diameter of the subgraph induced on `members` by the edges in
/// `edges`; infinite when disconnected.
pub(crate) fn induced_diameter(g: &WeightedGraph, edges: &[EdgeId], members: &[usize]) -> f64 {
    use std::collections::HashMap;
    let local: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); members.len()];
    for &id in edges {
        let e = g.edge(id);
        if let (Some(&a), Some(&b)) = (local.get(&e.u), local.get(&e.v)) {
            adj[a].push((b, e.w));
            adj[b].push((a, e.w));
        }
    }
    let mut worst: f64 = 0.0;
    for s in 0..members.len() {
        let d = local_dijkstra(&adj, s);
        worst = worst.max(d.into_iter().fold(0.0, f64::max));
    }
    worst
}

pub(crate) fn local_dijkstra(adj: &[Vec<(usize, f64)>], s: usize) -> Vec<f64> {
    use crate::graph::HeapItem;
    use std::collections::BinaryHeap;
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(HeapItem { d: 0.0, v: s });
    while let Some(HeapItem { d, v }) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(y, w) in &adj[v] {
            let nd = d + w;
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(HeapItem { d: nd, v: y });
            }
        }
    }
    dist
}
