use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;

use super::trust::{trust_filter, FilterDecision, TrustOutcome, TrustTable};
use super::{Graph, IneshError, NodeId};

/// Outcome of a route search.
#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    /// Source to destination inclusive; empty when unreachable.
    pub path: Vec<NodeId>,
    pub total_cost: f64,
    /// Tentative distance per node, indexed by `id - 1`.
    pub distances: Vec<f64>,
    /// Nodes the trust filter removed from consideration.
    pub excluded: BTreeSet<NodeId>,
}

impl PathResult {
    pub fn distance(&self, id: NodeId) -> f64 {
        self.distances
            .get(id.index())
            .copied()
            .unwrap_or(f64::INFINITY)
    }

    pub fn is_reachable(&self) -> bool {
        !self.path.is_empty()
    }

    /// Second node of the path, if the path has one.
    pub fn next_hop(&self) -> Option<NodeId> {
        self.path.get(1).copied()
    }

    pub(crate) fn unreachable(distances: Vec<f64>, excluded: BTreeSet<NodeId>) -> Self {
        PathResult {
            path: Vec::new(),
            total_cost: f64::INFINITY,
            distances,
            excluded,
        }
    }
}

fn join(ids: impl Iterator<Item = NodeId>) -> String {
    ids.map(|id| id.to_string()).collect::<Vec<_>>().join(",")
}

/// `path=1,2,4 cost=2 excluded=3`
impl fmt::Display for PathResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "path={} cost={} excluded={}",
            join(self.path.iter().copied()),
            self.total_cost,
            join(self.excluded.iter().copied())
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct QueueEntry {
    dist: f64,
    node: NodeId,
}

impl Eq for QueueEntry {}

// Reversed so that BinaryHeap pops the smallest distance, then the lowest id.
impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Nodes the observer refuses to route through.
///
/// A node's alternatives are the nodes that could stand in for it at any hop
/// leading to it: the neighbors of each of its neighbors. The best
/// alternative is the most trusted of those (lowest id on ties). Source,
/// destination and the observer itself are never screened.
pub(crate) fn screen(
    graph: &Graph,
    table: &TrustTable,
    observer: NodeId,
    source: NodeId,
    dest: NodeId,
    threshold: f64,
) -> BTreeSet<NodeId> {
    let mut excluded = BTreeSet::new();
    for candidate in graph.nodes() {
        if candidate == source || candidate == dest || candidate == observer {
            continue;
        }
        let mut best: Option<(f64, NodeId)> = None;
        for &(hop, _) in graph.neighbors(candidate) {
            for &(alt, _) in graph.neighbors(hop) {
                if alt == candidate || alt == observer {
                    continue;
                }
                let t = table.trust(observer, alt);
                let better = match best {
                    None => true,
                    Some((bt, bid)) => t > bt || (t == bt && alt < bid),
                };
                if better {
                    best = Some((t, alt));
                }
            }
        }
        if let Some((_, alt)) = best {
            if trust_filter(candidate, alt, table, observer, threshold) == FilterDecision::Exclude {
                excluded.insert(candidate);
            }
        }
    }
    excluded
}

/// Cheapest route from `source` to `dest` over the nodes `source`'s trust
/// table admits.
///
/// Distances start at zero for the source and infinity elsewhere; the queue is
/// drained completely, so every reachable admissible node ends up settled.
/// Equal-distance entries leave the queue lowest id first. An unreachable
/// destination is not an error: the result has an empty path and infinite
/// cost.
pub fn inesh_search(
    graph: &Graph,
    table: &TrustTable,
    source: NodeId,
    dest: NodeId,
    threshold: f64,
) -> Result<PathResult, IneshError> {
    for id in [source, dest] {
        if !graph.contains(id) {
            return Err(IneshError::UnknownNode(id));
        }
    }
    let n = graph.node_count();
    let excluded = screen(graph, table, source, source, dest, threshold);

    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<NodeId>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut queue = BinaryHeap::new();

    dist[source.index()] = 0.0;
    queue.push(QueueEntry {
        dist: 0.0,
        node: source,
    });

    while let Some(QueueEntry { dist: d, node: v }) = queue.pop() {
        if settled[v.index()] {
            continue;
        }
        settled[v.index()] = true;
        for &(w, cost) in graph.neighbors(v) {
            if settled[w.index()] || excluded.contains(&w) {
                continue;
            }
            let candidate = d + cost;
            if candidate < dist[w.index()] {
                dist[w.index()] = candidate;
                pred[w.index()] = Some(v);
                queue.push(QueueEntry {
                    dist: candidate,
                    node: w,
                });
            }
        }
    }

    if !settled[dest.index()] {
        return Ok(PathResult::unreachable(dist, excluded));
    }
    let mut path = vec![dest];
    let mut cursor = dest;
    while let Some(p) = pred[cursor.index()] {
        path.push(p);
        cursor = p;
    }
    path.reverse();
    Ok(PathResult {
        total_cost: dist[dest.index()],
        path,
        distances: dist,
        excluded,
    })
}

/// Rewards every intermediate forwarder on `result`'s path from the point of
/// view of `observer`.
pub fn reward_path(table: &mut TrustTable, observer: NodeId, result: &PathResult, sim_time: f64) {
    if result.path.len() < 3 {
        return;
    }
    for &hop in &result.path[1..result.path.len() - 1] {
        table.update(observer, hop, TrustOutcome::Reward, sim_time);
    }
}
