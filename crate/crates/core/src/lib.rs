//! Graph spanners: weighted graphs, union-find engines, level bucketing,
//! three clustered spanner constructions and a verification oracle.

#![forbid(unsafe_code)]

pub mod buckets;
pub mod cluster;
pub mod dsu;
pub mod error;
pub mod generate;
pub mod graph;
pub mod hz;
pub mod light;
pub mod linear;
pub mod oracle;
pub mod pm;
pub mod registry;
pub mod spanner;

pub use error::{BucketError, DsuError, GraphError, HzError, OracleError, SpannerError};
pub use graph::{Edge, EdgeId, VertexId, WeightedGraph};
pub use spanner::{BuildParams, BuildReport, Spanner};
