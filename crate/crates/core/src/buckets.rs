//! Geometric weight grid and the (sigma, i) edge classes.
//!
//! Thresholds are `T_j = base * (1+eps)^j`; an edge of weight `w` sits at
//! the unique `j` with `w` in `(T_{j-1}, T_j]`, and belongs to class
//! `sigma = j mod mu` at level `i = j div mu`, where
//! `mu = ceil(log_{1+eps}(1/eps))`. Consecutive levels of one class are
//! therefore at least a factor `1/eps` apart.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::BucketError;
use crate::graph::{EdgeId, MstResult, WeightedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub eps: f64,
    pub base: f64,
    pub mu: usize,
}

impl Grid {
    pub fn new(eps: f64, base: f64) -> Result<Self, BucketError> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(BucketError::BadEps(eps));
        }
        let mu = ((1.0 / eps).ln() / (1.0 + eps).ln()).ceil().max(1.0) as usize;
        Ok(Grid { eps, base, mu })
    }

    /// `T_j`.
    pub fn threshold(&self, j: i64) -> f64 {
        self.base * (1.0 + self.eps).powf(j as f64)
    }

    /// Level scale `L_i` of class `sigma`; `L_{-1}` is 0.
    pub fn level_scale(&self, sigma: usize, i: i64) -> f64 {
        if i < 0 {
            0.0
        } else {
            self.threshold(sigma as i64 + i * self.mu as i64)
        }
    }

    /// The `j` with `w` in `(T_{j-1}, T_j]`; may be negative for weights
    /// below `base`.
    pub fn index(&self, w: f64) -> i64 {
        let mut j = ((w / self.base).ln() / (1.0 + self.eps).ln()).ceil() as i64;
        while w > self.threshold(j) {
            j += 1;
        }
        while w <= self.threshold(j - 1) {
            j -= 1;
        }
        j
    }

    pub fn split(&self, j: i64) -> (usize, usize) {
        let mu = self.mu as i64;
        ((j.rem_euclid(mu)) as usize, j.div_euclid(mu) as usize)
    }

    /// Level of weight index `j` inside class `sigma`: the smallest `i >= 0`
    /// with `j <= sigma + i*mu`.
    pub fn level_in_class(&self, j: i64, sigma: usize) -> usize {
        let d = j - sigma as i64;
        if d <= 0 {
            0
        } else {
            ((d + self.mu as i64 - 1) / self.mu as i64) as usize
        }
    }
}

/// (sigma, i) for weight `w`; fails for weights at or below `T_{-1}`.
pub fn bucket_index(w: f64, eps: f64, base: f64) -> Result<(usize, usize), BucketError> {
    let grid = Grid::new(eps, base)?;
    let j = grid.index(w);
    if j < 0 {
        return Err(BucketError::BelowRange { w, base });
    }
    Ok(grid.split(j))
}

/// Edges of one class, grouped by level in ascending order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassLevels {
    pub levels: Vec<(usize, Vec<EdgeId>)>,
}

impl ClassLevels {
    pub fn get(&self, i: usize) -> Option<&[EdgeId]> {
        self.levels
            .binary_search_by_key(&i, |(l, _)| *l)
            .ok()
            .map(|p| self.levels[p].1.as_slice())
    }

    pub fn edge_count(&self) -> usize {
        self.levels.iter().map(|(_, e)| e.len()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelBuckets {
    pub grid: Grid,
    /// Non-empty classes only, keyed by sigma.
    pub classes: BTreeMap<usize, ClassLevels>,
}

impl LevelBuckets {
    pub fn edge_count(&self) -> usize {
        self.classes.values().map(ClassLevels::edge_count).sum()
    }

    /// CSV dump `sigma,i,count,minw,maxw`.
    pub fn to_csv(&self, g: &WeightedGraph) -> String {
        let mut s = String::from("sigma,i,count,minw,maxw\n");
        for (sigma, class) in &self.classes {
            for (i, edges) in &class.levels {
                let ws = edges.iter().map(|&id| g.edge(id).w);
                let lo = ws.clone().fold(f64::INFINITY, f64::min);
                let hi = ws.fold(0.0, f64::max);
                let _ = writeln!(s, "{sigma},{i},{},{lo},{hi}", edges.len());
            }
        }
        s
    }
}

/// Buckets the listed edges on `grid`. Edge lists inside a level are in
/// ascending id order.
pub fn partition_edge_ids(g: &WeightedGraph, ids: &[EdgeId], grid: Grid) -> Result<LevelBuckets, BucketError> {
    let mut tagged: Vec<(usize, usize, EdgeId)> = Vec::with_capacity(ids.len());
    for &id in ids {
        let w = g.edge(id).w;
        let j = grid.index(w);
        if j < 0 {
            return Err(BucketError::BelowRange { w, base: grid.base });
        }
        let (sigma, i) = grid.split(j);
        tagged.push((sigma, i, id));
    }
    tagged.sort_unstable();
    let mut classes: BTreeMap<usize, ClassLevels> = BTreeMap::new();
    for (sigma, i, id) in tagged {
        let class = classes.entry(sigma).or_default();
        match class.levels.last_mut() {
            Some((l, edges)) if *l == i => edges.push(id),
            _ => class.levels.push((i, vec![id])),
        }
    }
    Ok(LevelBuckets { grid, classes })
}

/// Buckets all edges of a graph whose minimum weight is 1.
pub fn partition_edges(g: &WeightedGraph, eps: f64) -> Result<LevelBuckets, BucketError> {
    let grid = Grid::new(eps, 1.0)?;
    let ids: Vec<EdgeId> = (0..g.m()).collect();
    partition_edge_ids(g, &ids, grid)
}

/// For class `sigma`, the MST edges grouped into levels `B_i`: edge `e` is
/// in `B_i` iff `L_{i-1} < w(e) <= L_i`.
pub fn mst_edge_levels(g: &WeightedGraph, mst: &MstResult, grid: &Grid, sigma: usize) -> ClassLevels {
    let mut tagged: Vec<(usize, EdgeId)> = mst
        .edges
        .iter()
        .map(|&id| (grid.level_in_class(grid.index(g.edge(id).w), sigma), id))
        .collect();
    tagged.sort_unstable();
    let mut out = ClassLevels::default();
    for (i, id) in tagged {
        match out.levels.last_mut() {
            Some((l, edges)) if *l == i => edges.push(id),
            _ => out.levels.push((i, vec![id])),
        }
    }
    out
}
