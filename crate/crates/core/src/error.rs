use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: nonpositive or non-finite weight {w}")]
    NonPositiveWeight { line: usize, w: f64 },
    #[error("line {line}: vertex id {id} out of range for n={n}")]
    VertexOutOfRange { line: usize, id: usize, n: usize },
    #[error("graph is disconnected: vertices {a} and {b} lie in different components")]
    Disconnected { a: usize, b: usize },
    #[error("graph has no edges")]
    EmptyEdgeSet,
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DsuError {
    #[error("element {id} out of range for n={n}")]
    OutOfRange { id: usize, n: usize },
    #[error("link on root vertex {0}")]
    LinkOnRoot(usize),
    #[error("vertex {0} linked twice")]
    DoubleLink(usize),
    #[error("parent array is not a rooted forest (cycle through {0})")]
    InvalidTree(usize),
    #[error("operation {op:?} not supported by this engine")]
    Unsupported { op: String },
    #[error("trace line {line}: {msg}")]
    Trace { line: usize, msg: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HzError {
    #[error("input graph has a self-loop at {0}")]
    SelfLoop(usize),
    #[error("input graph has parallel edges between {0} and {1}")]
    Parallel(usize, usize),
    #[error("vertex id {id} out of range for n={n}")]
    OutOfRange { id: usize, n: usize },
    #[error("k must be at least 1")]
    ZeroK,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BucketError {
    #[error("weight {w} lies below the grid base {base}")]
    BelowRange { w: f64, base: f64 },
    #[error("eps must lie in (0,1), got {0}")]
    BadEps(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpannerError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("eps must lie in (0,1), got {0}")]
    BadEps(f64),
    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dsu(#[from] DsuError),
    #[error(transparent)]
    Hz(#[from] HzError),
    #[error(transparent)]
    Bucket(#[from] BucketError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("spanner edge ({u},{v},{w}) is not an edge of the graph")]
    NotSubgraph { u: usize, v: usize, w: f64 },
    #[error("vertex count mismatch: graph has {graph}, spanner has {spanner}")]
    VertexCount { graph: usize, spanner: usize },
    #[error("edge id {0} is out of range")]
    UnknownEdge(usize),
}
