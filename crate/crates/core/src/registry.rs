//! Named spanner constructions behind one trait, picked at runtime.

use std::collections::BTreeMap;

use crate::error::SpannerError;
use crate::graph::WeightedGraph;
use crate::hz::{hz_spanner, UnweightedGraph};
use crate::spanner::{BuildParams, Spanner};

pub trait SpannerAlgorithm: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn build(&self, g: &WeightedGraph, params: &BuildParams) -> Result<Spanner, SpannerError>;
}

pub struct Greedy;
pub struct Hz;
pub struct Pm;
pub struct Linear;
pub struct Light;

impl SpannerAlgorithm for Greedy {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn description(&self) -> &'static str {
        "greedy baseline at stretch (2k-1)(1+eps)"
    }

    fn build(&self, g: &WeightedGraph, params: &BuildParams) -> Result<Spanner, SpannerError> {
        params.validate()?;
        let edges = crate::oracle::greedy_spanner(g, params.target_stretch());
        Ok(Spanner::new(self.name(), params, g.n(), edges))
    }
}

impl SpannerAlgorithm for Hz {
    fn name(&self) -> &'static str {
        "hz"
    }

    fn description(&self) -> &'static str {
        "unweighted (2k-1)-spanner; ignores edge weights"
    }

    fn build(&self, g: &WeightedGraph, params: &BuildParams) -> Result<Spanner, SpannerError> {
        params.validate()?;
        let ug = UnweightedGraph::new(g.n(), g.edges().iter().map(|e| (e.u, e.v)).collect())?;
        let out = hz_spanner(&ug, params.k)?;
        let mut s = Spanner::new(self.name(), params, g.n(), out.edges);
        s.ops = out.ops;
        Ok(s)
    }
}

impl SpannerAlgorithm for Pm {
    fn name(&self) -> &'static str {
        "pm"
    }

    fn description(&self) -> &'static str {
        "level clustering with classic union-find"
    }

    fn build(&self, g: &WeightedGraph, params: &BuildParams) -> Result<Spanner, SpannerError> {
        crate::pm::build_pm(g, params)
    }
}

impl SpannerAlgorithm for Linear {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn description(&self) -> &'static str {
        "MST-subtree clustering with static-tree union-find"
    }

    fn build(&self, g: &WeightedGraph, params: &BuildParams) -> Result<Spanner, SpannerError> {
        crate::linear::build_linear(g, params)
    }
}

impl SpannerAlgorithm for Light {
    fn name(&self) -> &'static str {
        "light"
    }

    fn description(&self) -> &'static str {
        "sparse and light: pm on light edges plus potential clustering on heavy edges"
    }

    fn build(&self, g: &WeightedGraph, params: &BuildParams) -> Result<Spanner, SpannerError> {
        crate::light::build_light(g, params)
    }
}

#[derive(Default)]
pub struct AlgorithmRegistry {
    algos: BTreeMap<&'static str, Box<dyn SpannerAlgorithm>>,
}

impl AlgorithmRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// All built-in constructions.
    pub fn with_defaults() -> Self {
        let mut r = Self::new();
        r.register(Box::new(Greedy));
        r.register(Box::new(Hz));
        r.register(Box::new(Pm));
        r.register(Box::new(Linear));
        r.register(Box::new(Light));
        r
    }

    /// Adds or replaces the algorithm under its name.
    pub fn register(&mut self, algo: Box<dyn SpannerAlgorithm>) {
        self.algos.insert(algo.name(), algo);
    }

    pub fn get(&self, name: &str) -> Result<&dyn SpannerAlgorithm, SpannerError> {
        self.algos
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| SpannerError::UnknownAlgorithm(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.algos.keys().copied().collect()
    }

    pub fn build(&self, name: &str, g: &WeightedGraph, params: &BuildParams) -> Result<Spanner, SpannerError> {
        self.get(name)?.build(g, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        let r = AlgorithmRegistry::with_defaults();
        assert_eq!(r.names(), vec!["greedy", "hz", "light", "linear", "pm"]);
        assert!(matches!(r.get("dijkstra"), Err(SpannerError::UnknownAlgorithm(_))));
        let g = WeightedGraph::from_edges(3, vec![(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        for name in r.names() {
            let s = r.build(name, &g, &BuildParams::new(1, 0.5)).unwrap();
            assert_eq!(s.edges, vec![0, 1], "{name}");
            assert_eq!(s.algo, name);
        }
    }
}
