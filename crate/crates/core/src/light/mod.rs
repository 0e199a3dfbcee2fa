//! Sparse and light spanner. Edges up to `w(MST)/(m eps)` go through the
//! pm construction together with the MST; heavier edges are handled class
//! by class on the subdivided MST, with clusters carrying potentials that
//! bound their diameters.

pub mod cluster_graph;
pub mod select;
pub mod steps;
pub mod tree;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::buckets::Grid;
use crate::error::SpannerError;
use crate::graph::{minimum_spanning_forest, EdgeId, WeightedGraph};
use crate::pm::{build_pm, local_dijkstra, DIAMETER_CHECK_MAX_N};
use crate::spanner::{BuildParams, BuildReport, ClusterReport, Spanner};

use cluster_graph::{build_cluster_graph, ClusterState, PotentialClusterGraph};
use select::select_level_edges;
use steps::{cluster_step, Clustering, NodeClass};
use tree::{level1_clusters, subdivide_mst, SubdividedMst};

/// Subgraph diameter budget factor.
pub const G_LIGHT: f64 = 42.0;

/// Internal epsilon of the light builder.
pub fn internal_eps(eps: f64, nominal: bool) -> f64 {
    if nominal {
        eps
    } else {
        eps / (10.0 * G_LIGHT + 1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightHeavySplit {
    pub w_bar: f64,
    pub light: Vec<EdgeId>,
    pub heavy: Vec<EdgeId>,
    /// Edges of weight at least `w(MST)`; the MST path already spans them.
    pub discarded: Vec<EdgeId>,
}

/// `light` holds edges of weight at most `w(MST)/(m eps)`, `heavy` the rest
/// below `w(MST)`.
pub fn split_light_heavy(g: &WeightedGraph, mst_weight: f64, eps: f64) -> LightHeavySplit {
    let w_bar = mst_weight / (g.m().max(1) as f64 * eps);
    let mut out = LightHeavySplit { w_bar, light: Vec::new(), heavy: Vec::new(), discarded: Vec::new() };
    for (id, e) in g.edges().iter().enumerate() {
        if e.w <= w_bar {
            out.light.push(id);
        } else if e.w < mst_weight {
            out.heavy.push(id);
        } else {
            out.discarded.push(id);
        }
    }
    out
}

/// Per-level statistics of the heavy-edge construction.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LightLevelRecord {
    pub sigma: usize,
    pub i: usize,
    /// Cluster graph nodes.
    pub nodes: usize,
    /// Level edges kept in the cluster graph.
    pub edges: usize,
    pub non_isolated: usize,
    pub non_virtual: usize,
    /// Total potential entering the level.
    pub phi: f64,
    /// Potential released by the level.
    pub delta: f64,
    /// Weight added at a degenerate level, 0 otherwise.
    pub a_i: f64,
    pub step_edge_counts: [usize; 3],
    pub degenerate: bool,
    pub subgraphs: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassPotential {
    pub sigma: usize,
    pub levels: usize,
    pub i_max: usize,
    pub phi_1: f64,
    pub phi_final: f64,
    pub delta_sum: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LightReport {
    pub g: f64,
    pub internal_eps: f64,
    pub w_bar: f64,
    pub mst_weight: f64,
    pub light_edges: usize,
    pub heavy_edges: usize,
    pub discarded_edges: usize,
    pub subdivided_vertices: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pm: Option<ClusterReport>,
    pub classes: Vec<ClassPotential>,
    pub levels: Vec<LightLevelRecord>,
    /// Soft bounds that missed, with counts.
    pub warnings: BTreeMap<String, usize>,
    pub violations: Vec<String>,
}

pub fn build_light(g: &WeightedGraph, params: &BuildParams) -> Result<Spanner, SpannerError> {
    params.validate()?;
    let eps = internal_eps(params.eps, params.nominal_eps);
    let mst = minimum_spanning_forest(g);
    let split = split_light_heavy(g, mst.total_weight, eps);
    let mut report = LightReport {
        g: G_LIGHT,
        internal_eps: eps,
        w_bar: split.w_bar,
        mst_weight: mst.total_weight,
        light_edges: split.light.len(),
        heavy_edges: split.heavy.len(),
        discarded_edges: split.discarded.len(),
        ..LightReport::default()
    };

    let mut edges = mst.edges.clone();
    let mut ops = 0;

    let mut light_ids: Vec<EdgeId> = split.light.iter().chain(&mst.edges).copied().collect();
    light_ids.sort_unstable();
    light_ids.dedup();
    let pm = build_pm(&g.subgraph(&light_ids), params)?;
    edges.extend(pm.edges.iter().map(|&i| light_ids[i]));
    ops += pm.ops;
    if let Some(BuildReport::Pm(r)) = pm.report {
        report.violations.extend(r.violations.iter().map(|v| format!("pm: {v}")));
        report.pm = Some(r);
    }

    let heavy: Vec<EdgeId> = split.heavy.iter().copied().filter(|&id| !mst.contains_edge(id)).collect();
    if !heavy.is_empty() {
        let t = subdivide_mst(g, &mst, split.w_bar);
        report.subdivided_vertices = t.n_total() - t.n_original;
        if params.check && t.n_total() > 2 * g.m() {
            report
                .violations
                .push(format!("subdivided tree has {} vertices for m={}", t.n_total(), g.m()));
        }
        let grid = Grid::new(eps, split.w_bar)?;
        let mut classes: BTreeMap<usize, BTreeMap<usize, Vec<EdgeId>>> = BTreeMap::new();
        for &id in &heavy {
            let (sigma, i) = grid.split(grid.index(g.edge(id).w));
            classes.entry(sigma).or_default().entry(i).or_default().push(id);
        }
        let ctx = HeavyContext { g, t: &t, grid, params, eps };
        let outputs: Vec<ClassOutput> = classes
            .par_iter()
            .map(|(&sigma, levels)| ctx.run_class(sigma, levels))
            .collect::<Result<_, _>>()?;
        for out in outputs {
            edges.extend(out.edges);
            ops += out.ops;
            report.levels.extend(out.levels);
            report.classes.push(out.potential);
            report.violations.extend(out.violations);
            for (k, v) in out.warnings {
                *report.warnings.entry(k).or_default() += v;
            }
        }
    }

    let mut s = Spanner::new("light", params, g.n(), edges);
    s.ops = ops;
    if params.instrument {
        s.report = Some(BuildReport::Light(Box::new(report)));
    }
    Ok(s)
}

struct HeavyContext<'a> {
    g: &'a WeightedGraph,
    t: &'a SubdividedMst,
    grid: Grid,
    params: &'a BuildParams,
    eps: f64,
}

#[derive(Default)]
struct ClassOutput {
    edges: Vec<EdgeId>,
    ops: u64,
    levels: Vec<LightLevelRecord>,
    potential: ClassPotential,
    violations: Vec<String>,
    warnings: BTreeMap<String, usize>,
}

const TOL: f64 = 1e-9;

impl HeavyContext<'_> {
    fn run_class(&self, sigma: usize, levels: &BTreeMap<usize, Vec<EdgeId>>) -> Result<ClassOutput, SpannerError> {
        let (t, grid) = (self.t, &self.grid);
        let mut out = ClassOutput::default();
        let first = *levels.keys().next().expect("class has a level");
        let l0 = grid.threshold(sigma as i64 + (first as i64 - 1) * grid.mu as i64);

        let lvl1 = level1_clusters(t, l0);
        let count = lvl1.diameter.len();
        let mut state = ClusterState {
            of: lvl1.of.clone(),
            phi: lvl1.diameter.clone(),
            virt: vec![true; count],
            span: vec![0.0; count],
            parent_w: vec![0.0; count],
        };
        for v in 0..t.n_total() {
            let c = state.of[v];
            if let Some(pe) = t.parent_edge(v) {
                state.parent_w[c] = state.parent_w[c].max(self.g.edge(pe).w);
            } else {
                state.virt[c] = false;
            }
        }
        for e in &t.edges {
            if state.of[e.a] == state.of[e.b] {
                state.span[state.of[e.a]] += e.w;
            }
        }
        for c in 0..count {
            if !state.virt[c] {
                state.parent_w[c] = 0.0;
            }
        }
        if self.params.check {
            for (c, &d) in lvl1.diameter.iter().enumerate() {
                if d > 14.0 * l0 * (1.0 + TOL) {
                    out.violations.push(format!("sigma={sigma}: level-1 cluster {c} has diameter {d} > 14*{l0}"));
                }
                if d < l0 && !lvl1.whole_component[c] {
                    *out.warnings.entry("level-1 cluster below the lower diameter bound".into()).or_default() += 1;
                }
            }
        }

        let phi_1 = state.total_potential();
        out.potential = ClassPotential { sigma, phi_1, ..ClassPotential::default() };
        if self.params.check && phi_1 > t.total_weight() * (1.0 + TOL) {
            out.violations.push(format!("sigma={sigma}: initial potential {phi_1} exceeds the MST weight"));
        }
        let limit = (2 * self.params.k - 1) as f64 * (1.0 + 6.0 * G_LIGHT * self.eps);
        let mut class_edges: Vec<EdgeId> = Vec::new();

        for (&lvl, bucket) in levels {
            let i = lvl - first + 1;
            let l = grid.level_scale(sigma, lvl as i64);
            let cg = build_cluster_graph(self.g, t, &state, bucket, limit);
            let last = lvl == *levels.keys().next_back().unwrap();
            if last && cg.edges.is_empty() && !self.params.instrument {
                // nothing to select and no later level to feed
                out.ops += (cg.n() + bucket.len()) as u64;
                out.potential.levels += 1;
                out.potential.i_max = i;
                break;
            }
            let clustering = cluster_step(&cg, l, G_LIGHT, self.eps);
            let sel = select_level_edges(&cg, &clustering, self.params.k)?;
            out.ops += (cg.n() + cg.tree.len() + bucket.len()) as u64;
            for note in &clustering.notes {
                *out.warnings.entry(note.clone()).or_default() += 1;
            }

            let (next, deltas) = next_state(&cg, &clustering, &state);
            let delta: f64 = deltas.iter().map(|d| d.0).sum();
            let a_i = if clustering.degenerate { sel.edges.iter().map(|&id| self.g.edge(id).w).sum() } else { 0.0 };
            let record = LightLevelRecord {
                sigma,
                i,
                nodes: cg.n(),
                edges: cg.edges.len(),
                non_isolated: (0..cg.n()).filter(|&x| cg.is_non_isolated(x)).count(),
                non_virtual: cg.virt.iter().filter(|v| !**v).count(),
                phi: state.total_potential(),
                delta,
                a_i,
                step_edge_counts: sel.step_counts,
                degenerate: clustering.degenerate,
                subgraphs: clustering.subgraphs.len(),
            };
            class_edges.extend(&sel.edges);
            if self.params.check {
                let ctx = LevelCheck { sigma, i, l, cg: &cg, clustering: &clustering, next: &next, record: &record };
                ctx.run(&deltas, &mut out.violations, &mut out.warnings, self.eps);
                if self.g.n() <= DIAMETER_CHECK_MAX_N {
                    self.check_cluster_diameters(&next, &class_edges, sigma, i, &mut out.violations);
                }
                self.check_cycle_property(&cg, sigma, i, &mut out.violations);
            }
            out.potential.delta_sum += delta;
            out.potential.levels += 1;
            out.potential.i_max = i;
            if self.params.instrument {
                out.levels.push(record);
            }
            state = next;
        }
        out.potential.phi_final = state.total_potential();
        if self.params.check {
            let p = &out.potential;
            let lhs = p.delta_sum;
            let rhs = p.phi_1 - p.phi_final;
            if (lhs - rhs).abs() > TOL * p.phi_1.max(1.0) {
                out.violations.push(format!("sigma={sigma}: released potential {lhs} differs from {rhs}"));
            }
            let bound = 4.0 * (self.g.n().max(2) as f64).log2() + 20.0;
            if p.i_max as f64 > bound {
                out.violations.push(format!("sigma={sigma}: {} levels exceed {bound}", p.i_max));
            }
        }
        out.edges = class_edges;
        Ok(out)
    }

    /// Every cluster's diameter in the tree plus the class's selected edges
    /// stays within its potential.
    fn check_cluster_diameters(&self, state: &ClusterState, class_edges: &[EdgeId], sigma: usize, i: usize, v: &mut Vec<String>) {
        let t = self.t;
        let members = state.members();
        let mut local = vec![usize::MAX; t.n_total()];
        for (c, mem) in members.iter().enumerate() {
            if mem.len() < 2 {
                continue;
            }
            for (k, &x) in mem.iter().enumerate() {
                local[x] = k;
            }
            let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); mem.len()];
            let mut add = |a: usize, b: usize, w: f64| {
                if state.of[a] == c && state.of[b] == c {
                    adj[local[a]].push((local[b], w));
                    adj[local[b]].push((local[a], w));
                }
            };
            for e in &t.edges {
                add(e.a, e.b, e.w);
            }
            for &id in class_edges {
                let e = self.g.edge(id);
                add(e.u, e.v, e.w);
            }
            let dm = (0..mem.len()).map(|s| local_dijkstra(&adj, s).into_iter().fold(0.0, f64::max)).fold(0.0, f64::max);
            if dm > state.phi[c] * (1.0 + TOL) + TOL {
                v.push(format!("sigma={sigma} i={i}: cluster {c} has diameter {dm} above its potential {}", state.phi[c]));
            }
        }
    }

    /// Along the tree path of every level edge, virtual nodes hang off MST
    /// edges no heavier than the level edge.
    fn check_cycle_property(&self, cg: &PotentialClusterGraph, sigma: usize, i: usize, v: &mut Vec<String>) {
        for e in &cg.edges {
            let Some(path) = cg.tree_path(e.a, e.b) else { continue };
            if let Some(&x) = path.iter().find(|&&x| cg.virt[x] && cg.parent_w[x] > e.w * (1.0 + TOL)) {
                v.push(format!(
                    "sigma={sigma} i={i}: virtual node {x} (parent edge {}) on the cycle of edge {} (w={})",
                    cg.parent_w[x], e.source, e.w
                ));
            }
        }
    }
}

/// Clusters after merging each subgraph, with `(delta, delta_plus)` per
/// subgraph.
fn next_state(cg: &PotentialClusterGraph, c: &Clustering, state: &ClusterState) -> (ClusterState, Vec<(f64, f64)>) {
    let mut node_to = vec![usize::MAX; cg.n()];
    let k = c.subgraphs.len();
    let mut next = ClusterState {
        of: Vec::new(),
        phi: vec![0.0; k],
        virt: vec![true; k],
        span: vec![0.0; k],
        parent_w: vec![0.0; k],
    };
    let mut deltas = Vec::with_capacity(k);
    for (xi, x) in c.subgraphs.iter().enumerate() {
        let adm = x.augmented_diameter(cg);
        let mut omega_sum = 0.0;
        for &node in &x.nodes {
            node_to[node] = xi;
            omega_sum += cg.omega[node];
            next.virt[xi] &= cg.virt[node];
            next.span[xi] += cg.span[node];
            next.parent_w[xi] = next.parent_w[xi].max(cg.parent_w[node]);
        }
        let tree_w: f64 = x.tree_edges.iter().map(|&e| cg.tree[e].w).sum();
        next.span[xi] += tree_w;
        if !next.virt[xi] {
            next.parent_w[xi] = 0.0;
        }
        next.phi[xi] = adm;
        deltas.push((omega_sum - adm, omega_sum - adm + tree_w));
    }
    next.of = state.of.iter().map(|&old| node_to[old]).collect();
    (next, deltas)
}

struct LevelCheck<'a> {
    sigma: usize,
    i: usize,
    l: f64,
    cg: &'a PotentialClusterGraph,
    clustering: &'a Clustering,
    next: &'a ClusterState,
    record: &'a LightLevelRecord,
}

impl LevelCheck<'_> {
    fn run(&self, deltas: &[(f64, f64)], v: &mut Vec<String>, warn: &mut BTreeMap<String, usize>, eps: f64) {
        let (cg, c, l) = (self.cg, self.clustering, self.l);
        let tag = format!("sigma={} i={}", self.sigma, self.i);

        let mut seen = vec![0usize; cg.n()];
        for x in &c.subgraphs {
            for &node in &x.nodes {
                seen[node] += 1;
            }
        }
        if let Some(node) = seen.iter().position(|&s| s != 1) {
            v.push(format!("{tag}: node {node} lies in {} subgraphs", seen[node]));
        }

        let comp = tree_components(cg);
        let mut comp_size: HashMap<usize, usize> = HashMap::new();
        for &r in &comp {
            *comp_size.entry(r).or_default() += 1;
        }
        for (xi, x) in c.subgraphs.iter().enumerate() {
            let adm = self.next.phi[xi];
            let whole = comp_size[&comp[x.nodes[0]]] == x.nodes.len();
            if adm > G_LIGHT * l * (1.0 + TOL) {
                v.push(format!("{tag}: subgraph {xi} ({:?}) has diameter {adm} > {G_LIGHT}L", x.kind));
            }
            if adm < l * (1.0 - TOL) && !whole {
                v.push(format!("{tag}: subgraph {xi} ({:?}) has diameter {adm} < L={l}", x.kind));
            }
            if (x.nodes.len() as f64) < 1.0 / (4.0 * eps) {
                *warn.entry("subgraph with fewer than 1/(4 eps) nodes".into()).or_default() += 1;
            }
            if deltas[xi].1 < -TOL * l {
                v.push(format!("{tag}: subgraph {xi} has negative released potential {}", deltas[xi].1));
            }
            let has_active = x.nodes.iter().any(|&n| cg.is_non_isolated(n));
            let non_virtual = x.nodes.iter().filter(|&&n| !cg.virt[n]).count();
            if has_active && non_virtual < 2 {
                v.push(format!("{tag}: subgraph {xi} ({:?}) has a non-isolated node but {non_virtual} non-virtual", x.kind));
            }
        }

        let after = self.next.virt.iter().filter(|x| !**x).count();
        let drop = self.record.non_virtual as f64 - after as f64;
        if drop < self.record.non_isolated as f64 / 2.0 {
            v.push(format!(
                "{tag}: non-virtual count fell by {drop}, below half of {} non-isolated",
                self.record.non_isolated
            ));
        }
        if !c.degenerate {
            for e in &cg.edges {
                let pair = (c.class[e.a], c.class[e.b]);
                if matches!(pair, (NodeClass::High, NodeClass::LowMinus) | (NodeClass::LowMinus, NodeClass::High)) {
                    v.push(format!("{tag}: edge {} joins a high node and a low- node", e.source));
                }
            }
        }
        for &d in &c.piece_diameters {
            if d < l * (1.0 - TOL) || d > 7.0 * l * (1.0 + TOL) {
                v.push(format!("{tag}: path piece of diameter {d} outside [L, 7L] with L={l}"));
            }
        }
        let sum: f64 = deltas.iter().map(|d| d.0).sum();
        let direct = self.record.phi - self.next.total_potential();
        if (sum - direct).abs() > TOL * self.record.phi.max(1.0) {
            v.push(format!("{tag}: subgraph releases sum to {sum}, potentials dropped by {direct}"));
        }
    }
}

fn tree_components(cg: &PotentialClusterGraph) -> Vec<usize> {
    let mut comp = vec![usize::MAX; cg.n()];
    for r in 0..cg.n() {
        if comp[r] != usize::MAX {
            continue;
        }
        comp[r] = r;
        let mut stack = vec![r];
        while let Some(x) = stack.pop() {
            for &(y, _) in &cg.tree_adj[x] {
                if comp[y] == usize::MAX {
                    comp[y] = r;
                    stack.push(y);
                }
            }
        }
    }
    comp
}
