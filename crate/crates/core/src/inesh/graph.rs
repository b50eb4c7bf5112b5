use super::{IneshError, NodeId};

/// A position on the terrain, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostMode {
    /// Every link costs 1.
    #[default]
    Hop,
    /// A link costs its length in meters.
    Euclidean,
}

/// Undirected graph over nodes `1..=n` with non-negative link costs.
///
/// Adjacency lists are kept sorted by neighbor id so that every traversal
/// visits neighbors in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: Vec<Vec<(NodeId, f64)>>,
}

impl Graph {
    pub fn new(node_count: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); node_count],
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.0 >= 1 && id.index() < self.adjacency.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.adjacency.len()).map(NodeId::from_index)
    }

    fn check(&self, id: NodeId) -> Result<(), IneshError> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(IneshError::UnknownNode(id))
        }
    }

    /// Adds (or re-costs) the undirected edge `u`–`w`.
    pub fn add_edge(&mut self, u: NodeId, w: NodeId, cost: f64) -> Result<(), IneshError> {
        self.check(u)?;
        self.check(w)?;
        if u == w {
            return Err(IneshError::SelfLoop(u));
        }
        if !(cost.is_finite() && cost >= 0.0) {
            return Err(IneshError::InvalidCost(cost));
        }
        insert_sorted(&mut self.adjacency[u.index()], w, cost);
        insert_sorted(&mut self.adjacency[w.index()], u, cost);
        Ok(())
    }

    /// Neighbors of `id` in ascending id order. Unknown ids have none.
    pub fn neighbors(&self, id: NodeId) -> &[(NodeId, f64)] {
        if self.contains(id) {
            &self.adjacency[id.index()]
        } else {
            &[]
        }
    }

    pub fn cost(&self, u: NodeId, w: NodeId) -> Option<f64> {
        let list = self.neighbors(u);
        list.binary_search_by_key(&w, |&(v, _)| v)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// One line per node: `<id>: <neighbor>,<neighbor>,...`.
    pub fn adjacency_dump(&self) -> String {
        let mut out = String::new();
        for id in self.nodes() {
            let list: Vec<String> = self.neighbors(id).iter().map(|(v, _)| v.to_string()).collect();
            out.push_str(&format!("{}: {}\n", id, list.join(",")));
        }
        out
    }
}

fn insert_sorted(list: &mut Vec<(NodeId, f64)>, node: NodeId, cost: f64) {
    match list.binary_search_by_key(&node, |&(v, _)| v) {
        Ok(i) => list[i].1 = cost,
        Err(i) => list.insert(i, (node, cost)),
    }
}

/// Unit-disk graph over the given positions: `u` and `w` are linked iff they
/// are at most `range` meters apart.
///
/// Ids must be exactly `1..=positions.len()` in any order. Co-located nodes are
/// fine; a repeated id is not.
pub fn build_graph(
    positions: &[(NodeId, Point)],
    range: f64,
    cost_mode: CostMode,
) -> Result<Graph, IneshError> {
    if positions.is_empty() {
        return Err(IneshError::EmptyPositions);
    }
    if !(range > 0.0) {
        return Err(IneshError::InvalidRange(range));
    }
    let n = positions.len();
    let mut slots: Vec<Option<Point>> = vec![None; n];
    for &(id, p) in positions {
        if id.0 == 0 || id.index() >= n {
            return Err(IneshError::UnknownNode(id));
        }
        if slots[id.index()].replace(p).is_some() {
            return Err(IneshError::DuplicateNode(id));
        }
    }
    let points: Vec<Point> = slots.into_iter().map(|p| p.expect("all slots filled")).collect();

    let mut graph = Graph::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = points[i].distance(&points[j]);
            if d <= range {
                let cost = match cost_mode {
                    CostMode::Hop => 1.0,
                    CostMode::Euclidean => d,
                };
                graph.add_edge(NodeId::from_index(i), NodeId::from_index(j), cost)?;
            }
        }
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(d: f64) -> Vec<(NodeId, Point)> {
        vec![(NodeId(1), Point::new(0.0, 0.0)), (NodeId(2), Point::new(d, 0.0))]
    }

    #[test]
    fn range_boundary() {
        let g = build_graph(&pair(149.9), 150.0, CostMode::Hop).unwrap();
        assert_eq!(g.cost(NodeId(1), NodeId(2)), Some(1.0));
        let g = build_graph(&pair(150.1), 150.0, CostMode::Hop).unwrap();
        assert_eq!(g.edge_count(), 0);
        let g = build_graph(&pair(150.0), 150.0, CostMode::Hop).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn euclidean_cost_is_distance() {
        let g = build_graph(&pair(120.0), 150.0, CostMode::Euclidean).unwrap();
        assert_eq!(g.cost(NodeId(2), NodeId(1)), Some(120.0));
    }

    #[test]
    fn single_node() {
        let g = build_graph(&[(NodeId(1), Point::new(3.0, 4.0))], 150.0, CostMode::Hop).unwrap();
        assert_eq!(g.node_count(), 1);
        assert!(g.neighbors(NodeId(1)).is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        let dup = vec![(NodeId(1), Point::default()), (NodeId(1), Point::new(5.0, 5.0))];
        assert_eq!(
            build_graph(&dup, 150.0, CostMode::Hop),
            Err(IneshError::DuplicateNode(NodeId(1)))
        );
        assert!(build_graph(&[], 150.0, CostMode::Hop).is_err());
        assert!(build_graph(&pair(1.0), 0.0, CostMode::Hop).is_err());
        assert!(build_graph(&[(NodeId(3), Point::default())], 1.0, CostMode::Hop).is_err());
    }

    #[test]
    fn colocated_nodes_are_linked() {
        let g = build_graph(&pair(0.0), 150.0, CostMode::Euclidean).unwrap();
        assert_eq!(g.cost(NodeId(1), NodeId(2)), Some(0.0));
    }

    #[test]
    fn add_edge_validation() {
        let mut g = Graph::new(3);
        assert_eq!(g.add_edge(NodeId(1), NodeId(1), 1.0), Err(IneshError::SelfLoop(NodeId(1))));
        assert!(g.add_edge(NodeId(1), NodeId(2), -1.0).is_err());
        assert!(g.add_edge(NodeId(1), NodeId(2), f64::NAN).is_err());
        assert!(g.add_edge(NodeId(1), NodeId(4), 1.0).is_err());
        g.add_edge(NodeId(3), NodeId(1), 2.0).unwrap();
        g.add_edge(NodeId(2), NodeId(1), 1.0).unwrap();
        let ids: Vec<NodeId> = g.neighbors(NodeId(1)).iter().map(|e| e.0).collect();
        assert_eq!(ids, vec![NodeId(2), NodeId(3)]);
        g.add_edge(NodeId(1), NodeId(3), 5.0).unwrap();
        assert_eq!(g.cost(NodeId(3), NodeId(1)), Some(5.0));
        assert_eq!(g.edge_count(), 2);
    }
}
