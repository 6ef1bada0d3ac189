use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("empty input")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("nonzero diagonal at node {0}")]
    NonzeroDiagonal(usize),
    #[error("asymmetric distances between {0} and {1}")]
    Asymmetric(String, String),
    #[error("non-positive distance between distinct nodes {0} and {1}")]
    NonPositive(String, String),
    #[error("triangle inequality violated: d({a},{c}) > d({a},{b}) + d({b},{c})")]
    Triangle { a: String, b: String, c: String },
    #[error("graph is disconnected: no path between {0} and {1}")]
    Disconnected(String, String),
    #[error("coordinate dimensions differ at point {0}")]
    Dimension(usize),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("numeric range exceeded while normalizing ({0})")]
    Overflow(&'static str),
    #[error("empty subset")]
    EmptySubset,
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("index {index} out of range for walk of {len} vertices")]
    OutOfRange { index: usize, len: usize },
    #[error("start position {0} after end position {1}")]
    Reversed(usize, usize),
    #[error("jump size {mu} outside [2, {len}]")]
    JumpSize { mu: usize, len: usize },
    #[error("walk too long for enumeration: {len} > {max}")]
    TooLong { len: usize, max: usize },
    #[error("segments overlap at position {0}")]
    Overlap(usize),
    #[error("empty walk")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("cluster with a single vertex cannot be partitioned")]
    Singleton,
    #[error("portal-edge count {count} exceeds bound {bound}; kappa' is too small for this instance")]
    PortalBound { count: usize, bound: String },
    #[error("bad parameter: {0}")]
    Parameter(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeDecompositionError {
    #[error("vertex {0} is in no bag")]
    MissingVertex(usize),
    #[error("edge ({0},{1}) is not inside any bag")]
    MissingEdge(usize, usize),
    #[error("bags containing vertex {0} are not connected in the tree")]
    Disconnected(usize),
    #[error("bag tree is not a tree: {0}")]
    NotATree(String),
    #[error("bag {0} references unknown vertex {1}")]
    UnknownVertex(usize, usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    TreeDecomposition(#[from] TreeDecompositionError),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("k = {k} exceeds the number of nodes {n}")]
    TargetTooLarge { k: usize, n: usize },
    #[error("instance too large for this solver: n = {n} > {max}")]
    TooLarge { n: usize, max: usize },
    #[error("non-integer {0}; use bicriteria mode")]
    NonInteger(&'static str),
    #[error("missing field: {0}")]
    Missing(&'static str),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("inconsistent pair endpoint {0}")]
    BadPair(usize),
}

impl SolveError {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, SolveError::Infeasible(_))
    }
}
