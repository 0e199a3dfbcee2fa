//! Seeded random instances.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::WeightedGraph;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightLaw {
    Unit,
    /// Uniform on `[1, max]`.
    Uniform { max: f64 },
    /// `exp` of a uniform sample on `[0, ln max]`.
    LogUniform { max: f64 },
    /// Integer powers of two up to `2^max_exp`.
    PowersOfTwo { max_exp: u32 },
}

impl WeightLaw {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            WeightLaw::Unit => 1.0,
            WeightLaw::Uniform { max } => rng.gen_range(1.0..=max),
            WeightLaw::LogUniform { max } => rng.gen_range(0.0..=max.ln()).exp(),
            WeightLaw::PowersOfTwo { max_exp } => (1u64 << rng.gen_range(0..=max_exp)) as f64,
        }
    }
}

impl FromStr for WeightLaw {
    type Err = String;

    /// `unit`, `uniform[:max]`, `log-uniform[:max]`, `pow2[:max_exp]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let num = |d: f64| -> Result<f64, String> {
            arg.map_or(Ok(d), |a| a.parse().map_err(|_| format!("bad weight-law argument {a:?}")))
        };
        match name {
            "unit" => Ok(WeightLaw::Unit),
            "uniform" => Ok(WeightLaw::Uniform { max: num(100.0)? }),
            "log-uniform" | "loguniform" => Ok(WeightLaw::LogUniform { max: num(1e4)? }),
            "pow2" => Ok(WeightLaw::PowersOfTwo { max_exp: num(10.0)? as u32 }),
            _ => Err(format!("unknown weight law {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// G(n, p); with `connected` a random spanning tree is added first.
    Gnp { n: usize, p: f64, law: WeightLaw, connected: bool },
    /// `rows x cols` grid with random weights.
    Grid { rows: usize, cols: usize, law: WeightLaw },
    /// Points in the unit square joined when closer than `radius`, weighted by
    /// distance; a nearest-neighbour chain keeps it connected.
    Geometric { n: usize, radius: f64 },
}

pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<WeightedGraph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *spec {
        GeneratorSpec::Gnp { n, p, law, connected } => {
            let mut edges = Vec::new();
            if connected && n > 1 {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut rng);
                for i in 1..n {
                    let j = rng.gen_range(0..i);
                    edges.push((order[i], order[j], law.sample(&mut rng)));
                }
            }
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p.clamp(0.0, 1.0)) {
                        edges.push((u, v, law.sample(&mut rng)));
                    }
                }
            }
            WeightedGraph::from_edges(n, edges)
        }
        GeneratorSpec::Grid { rows, cols, law } => {
            let id = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1), law.sample(&mut rng)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c), law.sample(&mut rng)));
                    }
                }
            }
            WeightedGraph::from_edges(rows * cols, edges)
        }
        GeneratorSpec::Geometric { n, radius } => {
            let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
            let dist = |a: usize, b: usize| {
                let (dx, dy) = (pts[a].0 - pts[b].0, pts[a].1 - pts[b].1);
                (dx * dx + dy * dy).sqrt().max(1e-9)
            };
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if dist(u, v) <= radius {
                        edges.push((u, v, dist(u, v)));
                    }
                }
            }
            for v in 1..n {
                let u = (0..v).min_by(|&a, &b| dist(a, v).total_cmp(&dist(b, v))).unwrap_or(0);
                edges.push((u, v, dist(u, v)));
            }
            WeightedGraph::from_edges(n, edges)
        }
    }
}
