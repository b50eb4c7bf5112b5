use std::collections::BTreeSet;

use crate::inesh::{inesh_search, Graph, NodeId, TrustTable};

/// A next hop the protocol already knows a route through.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub hop: NodeId,
    /// Advertised cost from `hop` onward to the destination.
    pub remaining: f64,
}

impl Candidate {
    pub fn new(hop: NodeId, remaining: f64) -> Self {
        Candidate { hop, remaining }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Admission {
    pub next_hop: Option<NodeId>,
    pub excluded: BTreeSet<NodeId>,
}

/// Picks the next hop toward `dest` among `candidates` using the node's own
/// trust table.
///
/// The local graph links `me` to every radio neighbor (cost 1) and each
/// candidate to `dest` at its advertised remaining cost. The destination is
/// linked to `me` only when it is itself a candidate, so the search never
/// invents a route the protocol does not hold. Returns the second node of the
/// cheapest trust-admissible path, or `None` when every candidate is
/// filtered out.
pub fn inesh_admit_next_hop(
    me: NodeId,
    node_count: usize,
    neighbors: &[NodeId],
    candidates: &[Candidate],
    dest: NodeId,
    trust: &TrustTable,
    threshold: f64,
) -> Admission {
    let highest = neighbors
        .iter()
        .chain(candidates.iter().map(|c| &c.hop))
        .chain([&me, &dest])
        .map(|id| id.0 as usize)
        .max()
        .unwrap_or(0);
    let mut graph = Graph::new(node_count.max(highest));
    let mut link = |u: NodeId, w: NodeId, cost: f64| {
        if u != w {
            graph.add_edge(u, w, cost.max(0.0)).expect("ids fit the local graph");
        }
    };
    for &nb in neighbors {
        if nb != dest {
            link(me, nb, 1.0);
        }
    }
    for c in candidates {
        link(me, c.hop, 1.0);
        if c.hop != dest {
            link(c.hop, dest, c.remaining);
        }
    }
    match inesh_search(&graph, trust, me, dest, threshold) {
        Ok(result) => Admission {
            next_hop: result.next_hop(),
            excluded: result.excluded,
        },
        Err(_) => Admission {
            next_hop: None,
            excluded: BTreeSet::new(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inesh::{TrustOutcome, TrustParams};

    fn ids(v: &[u32]) -> Vec<NodeId> {
        v.iter().map(|&i| NodeId(i)).collect()
    }

    fn full_trust() -> TrustTable {
        TrustTable::new(TrustParams {
            initial: 1.0,
            ..TrustParams::default()
        })
    }

    #[test]
    fn full_trust_matches_plain_shortest_path() {
        let nbs = ids(&[2, 3, 4, 5]);
        let cands = [Candidate::new(NodeId(4), 3.0), Candidate::new(NodeId(3), 1.0)];
        let a = inesh_admit_next_hop(NodeId(1), 10, &nbs, &cands, NodeId(10), &full_trust(), 0.5);
        assert_eq!(a.next_hop, Some(NodeId(3)));
        assert!(a.excluded.is_empty());
    }

    #[test]
    fn equal_candidates_prefer_lower_id() {
        let nbs = ids(&[2, 3, 4]);
        let cands = [Candidate::new(NodeId(4), 2.0), Candidate::new(NodeId(3), 2.0)];
        let a = inesh_admit_next_hop(NodeId(1), 10, &nbs, &cands, NodeId(9), &full_trust(), 0.5);
        assert_eq!(a.next_hop, Some(NodeId(3)));
    }

    #[test]
    fn only_admissible_candidate_is_chosen() {
        let mut t = TrustTable::default();
        t.update(NodeId(1), NodeId(3), TrustOutcome::Penalize, 1.0);
        let nbs = ids(&[3, 7]);
        let cands = [Candidate::new(NodeId(3), 1.0), Candidate::new(NodeId(7), 4.0)];
        let a = inesh_admit_next_hop(NodeId(1), 10, &nbs, &cands, NodeId(9), &t, 0.5);
        assert_eq!(a.next_hop, Some(NodeId(7)));
        assert!(a.excluded.contains(&NodeId(3)));
    }

    #[test]
    fn every_candidate_excluded() {
        let mut t = TrustTable::default();
        t.update(NodeId(1), NodeId(3), TrustOutcome::Penalize, 1.0);
        let nbs = ids(&[2, 3]);
        let a = inesh_admit_next_hop(
            NodeId(1),
            10,
            &nbs,
            &[Candidate::new(NodeId(3), 1.0)],
            NodeId(9),
            &t,
            0.5,
        );
        assert_eq!(a.next_hop, None);
    }

    #[test]
    fn destination_neighbor_not_used_unless_offered() {
        let nbs = ids(&[2, 9]);
        let a = inesh_admit_next_hop(
            NodeId(1),
            10,
            &nbs,
            &[Candidate::new(NodeId(2), 1.0)],
            NodeId(9),
            &full_trust(),
            0.5,
        );
        assert_eq!(a.next_hop, Some(NodeId(2)));
        let a = inesh_admit_next_hop(
            NodeId(1),
            10,
            &nbs,
            &[Candidate::new(NodeId(2), 1.0), Candidate::new(NodeId(9), 0.0)],
            NodeId(9),
            &full_trust(),
            0.5,
        );
        assert_eq!(a.next_hop, Some(NodeId(9)));
    }
}
