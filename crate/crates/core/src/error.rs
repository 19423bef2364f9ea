use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("hyperedge {edge} references node {node}, but the hypergraph has {n_nodes} nodes")]
    IndexOutOfRange {
        edge: usize,
        node: usize,
        n_nodes: usize,
    },

    #[error("hyperedge {edge} is empty")]
    EmptyHyperedge { edge: usize },

    #[error("hyperedge {edge} lists node {node} more than once")]
    DuplicateNodeInEdge { edge: usize, node: usize },

    #[error("cannot split {nodes} nodes across {workers} workers")]
    TooManyWorkers { workers: usize, nodes: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("problem requires a graph, but hyperedge {edge} has {size} nodes")]
    NotAGraph { edge: usize, size: usize },

    #[error("clause {clause} is empty")]
    EmptyClause { clause: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("worker {worker} did not report a gradient for epoch {epoch}")]
    MissingContribution { epoch: usize, worker: usize },

    #[error("partition covers {partition_nodes} nodes, but the problem has {problem_nodes}")]
    StalePartition {
        partition_nodes: usize,
        problem_nodes: usize,
    },

    #[error("cannot generate instance: {0}")]
    InfeasibleSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported checkpoint version {0}")]
    UnsupportedVersion(u32),

    #[error("wire message: {0}")]
    Wire(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
