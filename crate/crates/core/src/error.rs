use thiserror::Error;

use crate::dag::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cycle detected: back edge {from} -> {to}")]
    CycleDetected { from: NodeId, to: NodeId },

    #[error("cycle detected at line {line}: back edge {from} -> {to}")]
    CycleAtLine {
        line: usize,
        from: String,
        to: String,
    },

    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),

    #[error("node id {id} out of range for a graph with {node_count} nodes")]
    NodeIdOutOfRange { id: u64, node_count: usize },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("requested {requested} edges but only {available} legal pairs exist")]
    BudgetInfeasible { requested: u64, available: u64 },

    #[error("profile infeasible: {0}")]
    ProfileInfeasible(String),

    #[error("walk count must be positive")]
    ZeroWalks,

    #[error("graph has {node_count} nodes, above the cap of {cap}")]
    CapExceeded { node_count: usize, cap: usize },

    #[error("target depth {depth} outside [2, {max_depth}]")]
    DepthOutOfRange { depth: u32, max_depth: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid report: {0}")]
    InvalidReport(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(#[from] serde_json::Error),
}
