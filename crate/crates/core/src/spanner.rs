//! Output and parameter types shared by every construction.

use serde::{Deserialize, Serialize};

use crate::error::SpannerError;
use crate::graph::{EdgeId, WeightedGraph};
use crate::light::LightReport;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildParams {
    pub k: usize,
    pub eps: f64,
    /// Use `eps` directly inside the construction instead of the scaled
    /// value that the stretch proof needs.
    pub nominal_eps: bool,
    /// Record per-level statistics.
    pub instrument: bool,
    /// Run the (slow) structural checkers at every level.
    pub check: bool,
}

impl BuildParams {
    pub fn new(k: usize, eps: f64) -> Self {
        BuildParams {
            k,
            eps,
            nominal_eps: false,
            instrument: false,
            check: false,
        }
    }

    pub fn instrumented(mut self) -> Self {
        self.instrument = true;
        self
    }

    pub fn checked(mut self) -> Self {
        self.instrument = true;
        self.check = true;
        self
    }

    pub fn with_nominal_eps(mut self, on: bool) -> Self {
        self.nominal_eps = on;
        self
    }

    pub fn validate(&self) -> Result<(), SpannerError> {
        if self.k == 0 {
            return Err(SpannerError::ZeroK);
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(SpannerError::BadEps(self.eps));
        }
        Ok(())
    }

    /// The stretch target `(2k-1)(1+eps)`.
    pub fn target_stretch(&self) -> f64 {
        (2 * self.k - 1) as f64 * (1.0 + self.eps)
    }
}

/// Per-level record of the clustered builders.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub sigma: usize,
    pub i: usize,
    pub bucket_edges: usize,
    pub rep_vertices: usize,
    pub selected_edges: usize,
    pub delta: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub links: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finds: Option<u64>,
}

/// Instrumentation of the pm and linear builders.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub g: f64,
    pub internal_eps: f64,
    pub levels: Vec<LevelRecord>,
    /// Structural checker failures; empty when every check held.
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BuildReport {
    Pm(ClusterReport),
    Linear(ClusterReport),
    Light(Box<LightReport>),
}

impl BuildReport {
    pub fn violations(&self) -> Vec<String> {
        match self {
            BuildReport::Pm(r) | BuildReport::Linear(r) => r.violations.clone(),
            BuildReport::Light(r) => r.violations.clone(),
        }
    }
}

/// An edge subset of the input graph plus provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spanner {
    pub algo: String,
    pub k: usize,
    pub eps: f64,
    pub n: usize,
    /// Edge ids of the input graph, ascending.
    pub edges: Vec<EdgeId>,
    pub ops: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<BuildReport>,
}

impl Spanner {
    pub fn new(algo: &str, params: &BuildParams, n: usize, mut edges: Vec<EdgeId>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Spanner {
            algo: algo.to_string(),
            k: params.k,
            eps: params.eps,
            n,
            edges,
            ops: 0,
            report: None,
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn weight(&self, g: &WeightedGraph) -> f64 {
        self.edges.iter().map(|&id| g.edge(id).w).sum()
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.edges.binary_search(&id).is_ok()
    }

    pub fn to_graph(&self, g: &WeightedGraph) -> WeightedGraph {
        g.subgraph(&self.edges)
    }
}
