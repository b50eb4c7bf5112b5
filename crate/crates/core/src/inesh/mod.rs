//! Trust-filtered shortest-path engine.
//!
//! A node that needs a next hop builds a [`Graph`] of what it knows, asks
//! [`inesh_search`] for the cheapest route over the nodes its own
//! [`TrustTable`] still admits, and rewards the forwarders it ends up using.
//! [`oracle_search`] answers the same question by exhaustive enumeration and
//! exists to check the search.

mod graph;
mod oracle;
mod search;
mod trust;

pub use graph::{build_graph, CostMode, Graph, Point};
pub use oracle::{oracle_search, MAX_ORACLE_NODES};
pub use search::{inesh_search, reward_path, PathResult};
pub use trust::{
    trust_filter, FilterDecision, Observation, ObservationKind, TrustOutcome, TrustParams,
    TrustTable,
};

use std::fmt;

/// Node identifier, 1-based. Within a graph of `n` nodes the valid ids are `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub(crate) fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub(crate) fn from_index(index: usize) -> Self {
        NodeId(index as u32 + 1)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IneshError {
    #[error("node {0} is not part of the graph")]
    UnknownNode(NodeId),
    #[error("node {0} appears more than once")]
    DuplicateNode(NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("edge cost {0} is not a finite non-negative number")]
    InvalidCost(f64),
    #[error("communication range {0} must be positive")]
    InvalidRange(f64),
    #[error("no node positions given")]
    EmptyPositions,
    #[error("oracle refuses graphs with {nodes} nodes (limit {limit})")]
    OracleTooLarge { nodes: usize, limit: usize },
}
