use super::MobileNode;
use crate::inesh::{build_graph, CostMode, Graph, NodeId};

/// Unit-disk radio: two nodes hear each other iff they are at most `range`
/// meters apart. No interference, no loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioModel {
    pub range: f64,
    /// Time to push one packet across one hop, seconds.
    pub per_hop_delay: f64,
}

impl Default for RadioModel {
    fn default() -> Self {
        RadioModel {
            range: 150.0,
            per_hop_delay: 0.002,
        }
    }
}

pub fn in_range(a: &MobileNode, b: &MobileNode, radio: &RadioModel) -> bool {
    a.position.distance(&b.position) <= radio.range
}

/// Connectivity graph over the current positions. `nodes` must carry ids
/// `1..=nodes.len()`.
pub fn snapshot_graph(nodes: &[MobileNode], radio: &RadioModel, cost_mode: CostMode) -> Graph {
    let positions: Vec<_> = nodes.iter().map(|n| (n.id, n.position)).collect();
    build_graph(&positions, radio.range, cost_mode).expect("simulated nodes carry ids 1..=n")
}

/// Sorted radio neighbors of every node, indexed by `id - 1`.
pub fn neighbor_lists(nodes: &[MobileNode], radio: &RadioModel) -> Vec<Vec<NodeId>> {
    let mut lists = vec![Vec::new(); nodes.len()];
    for (i, a) in nodes.iter().enumerate() {
        for b in &nodes[i + 1..] {
            if in_range(a, b, radio) {
                lists[a.id.index()].push(b.id);
                lists[b.id.index()].push(a.id);
            }
        }
    }
    for list in &mut lists {
        list.sort_unstable();
    }
    lists
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inesh::Point;

    fn at(id: u32, x: f64) -> MobileNode {
        MobileNode::fixed(NodeId(id), Point::new(x, 0.0))
    }

    #[test]
    fn boundary_is_inclusive() {
        let r = RadioModel::default();
        assert!(in_range(&at(1, 0.0), &at(2, 150.0), &r));
        assert!(!in_range(&at(1, 0.0), &at(2, 150.0001), &r));
        assert!(in_range(&at(1, 7.0), &at(2, 7.0), &r));
    }

    #[test]
    fn snapshot_edges() {
        let r = RadioModel::default();
        let g = snapshot_graph(&[at(1, 0.0), at(2, 100.0)], &r, CostMode::Hop);
        assert_eq!(g.edge_count(), 1);
        let g = snapshot_graph(&[at(1, 0.0), at(2, 200.0)], &r, CostMode::Hop);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn neighbor_lists_match_graph() {
        let r = RadioModel::default();
        let nodes = [at(1, 0.0), at(2, 100.0), at(3, 200.0), at(4, 260.0)];
        let lists = neighbor_lists(&nodes, &r);
        let g = snapshot_graph(&nodes, &r, CostMode::Hop);
        for node in &nodes {
            let from_graph: Vec<NodeId> = g.neighbors(node.id).iter().map(|e| e.0).collect();
            assert_eq!(lists[node.id.index()], from_graph);
        }
    }
}
