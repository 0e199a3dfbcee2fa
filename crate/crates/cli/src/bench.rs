//! Grid sweeps over (algo, n, k, eps, seed), one CSV row per cell.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use spanner_core::generate::{generate, GeneratorSpec};
use spanner_core::oracle::{spanner_metrics, verify_edge_subset};
use spanner_core::registry::AlgorithmRegistry;
use spanner_core::{BuildParams, WeightedGraph};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub algo: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub eps: f64,
    pub edges: usize,
    pub sparsity: f64,
    pub lightness: f64,
    pub max_stretch: f64,
    pub ops: u64,
    pub seconds: f64,
}

pub struct BenchGrid {
    pub algos: Vec<String>,
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    pub eps: Vec<f64>,
    pub seeds: Vec<u64>,
    pub nominal_eps: bool,
    pub instance: Box<dyn Fn(usize) -> GeneratorSpec + Sync>,
}

pub fn run_bench(grid: &BenchGrid, registry: &AlgorithmRegistry, threads: Option<usize>) -> Result<Vec<BenchRow>, CliError> {
    for a in &grid.algos {
        registry.get(a).map_err(|e| CliError::Config(e.to_string()))?;
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder.build().map_err(|e| CliError::Config(e.to_string()))?;

    let instances: Vec<(usize, u64)> =
        grid.ns.iter().flat_map(|&n| grid.seeds.iter().map(move |&s| (n, s))).collect();
    let graphs: Vec<WeightedGraph> = pool.install(|| {
        instances
            .par_iter()
            .map(|&(n, seed)| generate(&(grid.instance)(n), seed).map_err(|e| CliError::Config(e.to_string())))
            .collect::<Result<_, _>>()
    })?;

    let mut cells = Vec::new();
    for (gi, _) in instances.iter().enumerate() {
        for algo in &grid.algos {
            for &k in &grid.ks {
                for &eps in &grid.eps {
                    cells.push((gi, algo.as_str(), k, eps));
                }
            }
        }
    }
    pool.install(|| {
        cells
            .par_iter()
            .map(|&(gi, algo, k, eps)| {
                let g = &graphs[gi];
                let params = BuildParams::new(k, eps).with_nominal_eps(grid.nominal_eps);
                let start = Instant::now();
                let s = registry.build(algo, g, &params).map_err(|e| CliError::Config(e.to_string()))?;
                let seconds = start.elapsed().as_secs_f64();
                let h = s.to_graph(g);
                let metrics = spanner_metrics(g, &h);
                let stretch = verify_edge_subset(g, &s.edges, params.target_stretch())
                    .map_err(|e| CliError::Verify(e.to_string()))?;
                Ok(BenchRow {
                    algo: algo.to_string(),
                    n: g.n(),
                    m: g.m(),
                    k,
                    eps,
                    edges: metrics.edges,
                    sparsity: metrics.sparsity,
                    lightness: metrics.lightness,
                    max_stretch: stretch.max_stretch,
                    ops: s.ops,
                    seconds,
                })
            })
            .collect()
    })
}

/// Reads `SPANNER_THREADS`; unset or unparsable means no cap.
pub fn thread_cap() -> Option<usize> {
    std::env::var("SPANNER_THREADS").ok().and_then(|v| v.trim().parse().ok())
}
