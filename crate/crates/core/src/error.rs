use thiserror::Error;

use crate::matroid::ElementId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("element {0} appears in more than one group")]
    OverlappingGroups(ElementId),
    #[error("group {group} has budget {budget} outside [1, {size}]")]
    BudgetOutOfRange {
        group: usize,
        budget: usize,
        size: usize,
    },
    #[error("group {0} is empty")]
    EmptyGroup(usize),
    #[error("{groups} groups but {budgets} budgets")]
    BudgetCountMismatch { groups: usize, budgets: usize },
    #[error("element ids must be dense in [0, n); {0} is missing")]
    SparseElementIds(ElementId),
    #[error("element {0} is not part of the ground set")]
    UnknownElement(ElementId),
    #[error("set violates the partition budgets")]
    InfeasibleInput,
    #[error("element {0} is already in the set")]
    ElementAlreadyInSet(ElementId),
    #[error("negative weight {weight} for element {element}")]
    NegativeWeight { element: ElementId, weight: f64 },
    #[error("candidate pool is empty")]
    EmptyCandidatePool,
    #[error("delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("parameter {name} = {value} outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("gamma is zero; the approximation ratio is unbounded")]
    GammaZero,
    #[error("instance too large: {what} = {size} exceeds cap {cap}")]
    InstanceTooLarge {
        what: &'static str,
        size: u128,
        cap: u128,
    },
    #[error("line {line}: malformed edge entry {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("edge {edge} has invalid probabilities p0 = {p0}, p1 = {p1}")]
    InvalidProbability { edge: usize, p0: f64, p1: f64 },
    #[error("node {node} is out of range for a graph with {nodes} nodes")]
    NodeOutOfRange { node: usize, nodes: usize },
    #[error("seed set is empty")]
    EmptySeedSet,
    #[error("non-finite feature value at frame {frame}, dimension {dim}")]
    NonFiniteFeature { frame: usize, dim: usize },
    #[error("feature matrix is empty")]
    EmptyFeatures,
    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("bandwidth must be positive, got {0}")]
    InvalidBandwidth(f64),
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("Cholesky factorization failed at pivot {0}; matrix is not positive definite")]
    FactorizationFailure(usize),
    #[error("Jacobi iteration did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("per-segment budget {budget} exceeds the smallest segment size {segment}")]
    BudgetExceedsSegment { budget: usize, segment: usize },
    #[error("cannot split {n} elements into {k} segments")]
    TooManySegments { n: usize, k: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
