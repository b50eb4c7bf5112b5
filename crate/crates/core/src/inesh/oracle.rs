//! Exhaustive reference for [`inesh_search`](super::inesh_search).

use std::collections::BTreeSet;

use super::search::PathResult;
use super::trust::{trust_filter, FilterDecision, TrustTable};
use super::{Graph, IneshError, NodeId};

/// Largest graph the oracle will enumerate.
pub const MAX_ORACLE_NODES: usize = 14;

/// True when some hop leading to `node` offers an alternative the filter
/// prefers over it.
fn rejected_at_some_hop(
    graph: &Graph,
    table: &TrustTable,
    observer: NodeId,
    node: NodeId,
    threshold: f64,
) -> bool {
    graph.neighbors(node).iter().any(|&(hop, _)| {
        graph.neighbors(hop).iter().any(|&(alt, _)| {
            alt != node
                && alt != observer
                && trust_filter(node, alt, table, observer, threshold) == FilterDecision::Exclude
        })
    })
}

struct Enumeration<'a> {
    graph: &'a Graph,
    dest: NodeId,
    banned: Vec<bool>,
    on_path: Vec<bool>,
    stack: Vec<NodeId>,
    best: Option<(f64, Vec<NodeId>)>,
    reach: Vec<f64>,
}

impl Enumeration<'_> {
    fn walk(&mut self, node: NodeId, cost: f64) {
        if cost < self.reach[node.index()] {
            self.reach[node.index()] = cost;
        }
        if node == self.dest {
            // Paths are visited in lexicographic order, so only a strictly
            // cheaper one replaces the incumbent.
            if self.best.as_ref().map_or(true, |(c, _)| cost < *c) {
                self.best = Some((cost, self.stack.clone()));
            }
            return;
        }
        for &(next, edge) in self.graph.neighbors(node) {
            if self.on_path[next.index()] || self.banned[next.index()] {
                continue;
            }
            self.on_path[next.index()] = true;
            self.stack.push(next);
            self.walk(next, cost + edge);
            self.stack.pop();
            self.on_path[next.index()] = false;
        }
    }
}

/// Enumerates every simple path from `source` to `dest`, discards those
/// through a node the trust filter rejects, and returns the cheapest
/// survivor (first in lexicographic order on ties).
///
/// `distances` holds, per node, the cheapest admissible simple path reaching
/// it. Refuses graphs above [`MAX_ORACLE_NODES`].
pub fn oracle_search(
    graph: &Graph,
    table: &TrustTable,
    source: NodeId,
    dest: NodeId,
    threshold: f64,
) -> Result<PathResult, IneshError> {
    let n = graph.node_count();
    if n > MAX_ORACLE_NODES {
        return Err(IneshError::OracleTooLarge {
            nodes: n,
            limit: MAX_ORACLE_NODES,
        });
    }
    for id in [source, dest] {
        if !graph.contains(id) {
            return Err(IneshError::UnknownNode(id));
        }
    }

    let observer = source;
    let excluded: BTreeSet<NodeId> = graph
        .nodes()
        .filter(|&v| v != source && v != dest)
        .filter(|&v| rejected_at_some_hop(graph, table, observer, v, threshold))
        .collect();

    let mut search = Enumeration {
        graph,
        dest,
        banned: graph.nodes().map(|v| excluded.contains(&v)).collect(),
        on_path: vec![false; n],
        stack: vec![source],
        best: None,
        reach: vec![f64::INFINITY; n],
    };
    search.on_path[source.index()] = true;
    search.walk(source, 0.0);

    let Enumeration { best, reach, .. } = search;
    Ok(match best {
        Some((total_cost, path)) => PathResult {
            path,
            total_cost,
            distances: reach,
            excluded,
        },
        None => PathResult::unreachable(reach, excluded),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inesh::TrustParams;

    fn full_trust() -> TrustTable {
        TrustTable::new(TrustParams {
            initial: 1.0,
            ..TrustParams::default()
        })
    }

    #[test]
    fn chain_of_three() {
        let mut g = Graph::new(3);
        g.add_edge(NodeId(1), NodeId(2), 1.0).unwrap();
        g.add_edge(NodeId(2), NodeId(3), 1.0).unwrap();
        let r = oracle_search(&g, &full_trust(), NodeId(1), NodeId(3), 0.5).unwrap();
        assert_eq!(r.path, vec![NodeId(1), NodeId(2), NodeId(3)]);
        assert_eq!(r.total_cost, 2.0);
    }

    #[test]
    fn complete_graph_takes_direct_edge() {
        let mut g = Graph::new(4);
        for u in 1..=4 {
            for w in (u + 1)..=4 {
                g.add_edge(NodeId(u), NodeId(w), 1.0).unwrap();
            }
        }
        let r = oracle_search(&g, &full_trust(), NodeId(1), NodeId(4), 0.5).unwrap();
        assert_eq!(r.total_cost, 1.0);
        assert_eq!(r.path, vec![NodeId(1), NodeId(4)]);
    }

    #[test]
    fn refuses_large_graphs() {
        let g = Graph::new(MAX_ORACLE_NODES + 1);
        assert!(matches!(
            oracle_search(&g, &full_trust(), NodeId(1), NodeId(2), 0.5),
            Err(IneshError::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn lexicographic_tie_break() {
        let mut g = Graph::new(4);
        for (u, w) in [(1, 3), (3, 4), (1, 2), (2, 4)] {
            g.add_edge(NodeId(u), NodeId(w), 1.0).unwrap();
        }
        let r = oracle_search(&g, &full_trust(), NodeId(1), NodeId(4), 0.5).unwrap();
        assert_eq!(r.path, vec![NodeId(1), NodeId(2), NodeId(4)]);
    }
}
