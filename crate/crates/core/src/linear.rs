//! Level-by-level spanner whose clusters are MST subtrees. Merges are
//! `Link` calls on the static-tree union-find, driven by the forest of
//! light cluster-tree edges.

use std::collections::{HashMap, HashSet};

use crate::buckets::{mst_edge_levels, partition_edge_ids, ClassLevels, Grid};
use crate::cluster::{check_star_cover, dedupe_source_edges, grow_star_cover, RepresentativeGraph};
use crate::dsu::StaticTreeUf;
use crate::error::SpannerError;
use crate::graph::{minimum_spanning_forest, EdgeId, MstResult, WeightedGraph};
use crate::hz::{hz_spanner, UnweightedGraph};
use crate::pm::{induced_diameter, internal_eps, DIAMETER_CHECK_MAX_N, G_PM};
use crate::spanner::{BuildParams, BuildReport, ClusterReport, LevelRecord, Spanner};

pub fn build_linear(g: &WeightedGraph, params: &BuildParams) -> Result<Spanner, SpannerError> {
    params.validate()?;
    let eps = internal_eps(params.eps, params.nominal_eps);
    let mut report = ClusterReport {
        g: G_PM,
        internal_eps: eps,
        ..ClusterReport::default()
    };
    let mst = minimum_spanning_forest(g);
    let mut edges = mst.edges.clone();
    let mut ops = 0;
    if g.m() > 0 {
        let grid = Grid::new(eps, g.min_weight().unwrap_or(1.0))?;
        let all: Vec<EdgeId> = (0..g.m()).collect();
        let buckets = partition_edge_ids(g, &all, grid)?;
        for (&sigma, class) in &buckets.classes {
            let out = run_class(g, &mst, &grid, sigma, class, params)?;
            edges.extend(out.edges);
            ops += out.ops;
            report.levels.extend(out.levels);
            report.violations.extend(out.violations);
        }
    }
    let mut s = Spanner::new("linear", params, g.n(), edges);
    s.ops = ops;
    if params.instrument {
        s.report = Some(BuildReport::Linear(report));
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
    mst: &MstResult,
    grid: &Grid,
    sigma: usize,
    class: &ClassLevels,
    params: &BuildParams,
) -> Result<ClassOutput, SpannerError> {
    let n = g.n();
    let mut uf = StaticTreeUf::new(&mst.parent)?;
    let tree_levels = mst_edge_levels(g, mst, grid, sigma);
    let child_of = |id: EdgeId| {
        let e = g.edge(id);
        if mst.parent[e.u] == Some(e.v) && mst.parent_edge[e.u] == Some(id) {
            e.u
        } else {
            e.v
        }
    };
    let mut out = ClassOutput::default();
    // Forest edges are stored as the MST child vertex of their tree edge.
    let mut carried: Vec<usize> = Vec::new();
    let mut next_tree_level = 0;
    let mut total_delta = 0;
    let fail = |out: &mut ClassOutput, i: usize, msg: String| {
        out.violations.push(format!("linear sigma={sigma} i={i}: {msg}"));
    };

    for (i, bucket) in &class.levels {
        let i = *i;
        while next_tree_level < tree_levels.levels.len() && tree_levels.levels[next_tree_level].0 <= i {
            carried.extend(tree_levels.levels[next_tree_level].1.iter().map(|&id| child_of(id)));
            next_tree_level += 1;
        }
        let (links0, finds0) = (uf.links(), uf.finds());

        // Representative graph and its spanner, on the level-i clusters.
        let mut find_err = None;
        let sources = dedupe_source_edges(g, bucket, |v| match uf.find(v) {
            Ok(r) => r,
            Err(e) => {
                find_err = Some(e);
                v
            }
        });
        if let Some(e) = find_err {
            return Err(e.into());
        }
        let mut rec = LevelRecord {
            sigma,
            i,
            bucket_edges: bucket.len(),
            ..LevelRecord::default()
        };
        let non_isolated: HashSet<usize> = sources.iter().flat_map(|s| [s.ru, s.rv]).collect();
        if !sources.is_empty() {
            let rg = RepresentativeGraph::build(&sources);
            let hz = hz_spanner(&rg.graph, params.k)?;
            out.ops += hz.ops;
            out.edges.extend(hz.edges.iter().map(|&j| rg.source[j]));
            rec.rep_vertices = rg.reps.len();
            rec.selected_edges = hz.edges.len();
        }

        // Cluster forest on the carried and new tree edges.
        let mut forest_children: Vec<usize> = Vec::with_capacity(carried.len());
        let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(carried.len());
        for &v in &carried {
            let p = mst.parent[v].expect("forest edge has a parent");
            let (a, b) = (uf.find(v)?, uf.find(p)?);
            if a == b {
                continue;
            }
            if params.check && a != v {
                fail(&mut out, i, format!("forest edge below vertex {v} does not leave a cluster root"));
            }
            forest_children.push(v);
            pairs.push((a, b));
        }
        let mut nodes: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        nodes.sort_unstable();
        nodes.dedup();
        if params.check {
            for x in &non_isolated {
                if nodes.binary_search(x).is_err() {
                    fail(&mut out, i, format!("non-isolated cluster {x} missing from the forest"));
                }
            }
            if n <= DIAMETER_CHECK_MAX_N {
                check_cycle_property(g, mst, &sources, &forest_children, &mut uf, &nodes)
                    .unwrap_or_else(|m| fail(&mut out, i, m));
            }
        }

        let index: HashMap<usize, usize> = nodes.iter().enumerate().map(|(x, &c)| (c, x)).collect();
        let forest = UnweightedGraph::new(nodes.len(), pairs.iter().map(|&(a, b)| (index[&a], index[&b])).collect())?;
        let parts = grow_star_cover(&forest)?;
        if params.check {
            if let Err(e) = check_star_cover(&forest, &parts) {
                fail(&mut out, i, format!("star cover: {e}"));
            }
        }
        let mut used = vec![false; forest.m()];
        let mut delta = 0;
        for p in &parts {
            for &e in &p.edges {
                used[e] = true;
                uf.link(forest_children[e])?;
            }
            delta += p.nodes.len() - 1;
        }
        carried = (0..forest.m()).filter(|&e| !used[e]).map(|e| forest_children[e]).collect();
        total_delta += delta;
        rec.delta = delta;
        rec.links = Some(uf.links() - links0);
        rec.finds = Some(uf.finds() - finds0);

        if params.check {
            if 2 * delta < nodes.len() {
                fail(&mut out, i, format!("cluster drop {delta} below half of {}", nodes.len()));
            }
            if n <= DIAMETER_CHECK_MAX_N {
                let bound = G_PM * grid.level_scale(sigma, i as i64);
                check_subtrees(g, mst, &parts, &nodes, &mut uf, bound).unwrap_or_else(|m| fail(&mut out, i, m));
            }
        }
        if params.instrument {
            out.levels.push(rec);
        }
    }
    if params.check && total_delta > n {
        out.violations.push(format!("linear sigma={sigma}: total cluster drop {total_delta} exceeds n={n}"));
    }
    out.ops += uf.ops();
    Ok(out)
}

/// Every tree edge that crosses clusters on the MST path of a source edge
/// must be a forest edge, so both its clusters are forest nodes.
fn check_cycle_property(
    g: &WeightedGraph,
    mst: &MstResult,
    sources: &[crate::cluster::SourceEdge],
    forest_children: &[usize],
    uf: &mut StaticTreeUf,
    nodes: &[usize],
) -> Result<(), String> {
    let in_forest: HashSet<usize> = forest_children.iter().copied().collect();
    for s in sources {
        let e = g.edge(s.edge);
        let Some(path) = mst.path_edges(e.u, e.v) else {
            continue;
        };
        for id in path {
            let t = g.edge(id);
            let (a, b) = (uf.find(t.u).map_err(|e| e.to_string())?, uf.find(t.v).map_err(|e| e.to_string())?);
            if a == b {
                continue;
            }
            let child = if mst.parent[t.u] == Some(t.v) { t.u } else { t.v };
            if !in_forest.contains(&child) || nodes.binary_search(&a).is_err() || nodes.binary_search(&b).is_err() {
                return Err(format!("tree edge {id} on the path of edge {} is not a forest edge", s.edge));
            }
        }
    }
    Ok(())
}

/// Newly merged clusters must be connected MST subtrees rooted at their
/// representative, with tree diameter within `bound`.
fn check_subtrees(
    g: &WeightedGraph,
    mst: &MstResult,
    parts: &[crate::cluster::StarPart],
    nodes: &[usize],
    uf: &mut StaticTreeUf,
    bound: f64,
) -> Result<(), String> {
    let n = g.n();
    let labels: Vec<usize> = (0..n).map(|v| uf.find(v)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    for p in parts {
        let rep = labels[nodes[p.center]];
        let members: Vec<usize> = (0..n).filter(|&v| labels[v] == rep).collect();
        let tops: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&v| mst.parent[v].map_or(true, |q| labels[q] != rep))
            .collect();
        if tops != [rep] {
            return Err(format!("cluster {rep} is not a subtree rooted at its representative"));
        }
        let d = induced_diameter(g, &mst.edges, &members);
        if d > bound * (1.0 + 1e-9) {
            return Err(format!("cluster {rep} of {} vertices has tree diameter {d} > {bound}", members.len()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::minimum_spanning_tree;

    #[test]
    fn tree_input_is_kept() {
        let g = WeightedGraph::from_edges(5, vec![(0, 1, 1.0), (1, 2, 3.0), (1, 3, 7.5), (3, 4, 2.0)]).unwrap();
        let s = build_linear(&g, &BuildParams::new(2, 0.25).checked()).unwrap();
        assert_eq!(s.edges, vec![0, 1, 2, 3]);
        assert!(s.report.unwrap().violations().is_empty());
    }

    #[test]
    fn heavy_chord_triangle() {
        let g = WeightedGraph::from_edges(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 10.0)]).unwrap();
        let s = build_linear(&g, &BuildParams::new(2, 0.25).checked()).unwrap();
        let t = minimum_spanning_tree(&g).unwrap();
        for id in &t.edges {
            assert!(s.contains(*id));
        }
        assert!(s.report.unwrap().violations().is_empty());
    }

    #[test]
    fn records_link_counts() {
        let mut e = Vec::new();
        for v in 1..12 {
            e.push((v - 1, v, 1.0));
        }
        e.push((0, 11, 1.0));
        e.push((3, 8, 1.0));
        let g = WeightedGraph::from_edges(12, e).unwrap();
        let s = build_linear(&g, &BuildParams::new(2, 0.5).with_nominal_eps(true).checked()).unwrap();
        let BuildReport::Linear(r) = s.report.unwrap() else { panic!() };
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert!(r.levels.iter().all(|l| l.links.is_some() && l.finds.is_some()));
        assert!(r.levels.iter().map(|l| l.links.unwrap()).sum::<u64>() > 0);
    }
}
