use proptest::prelude::*;

use inesh_sim::inesh::{
    inesh_search, oracle_search, trust_filter, FilterDecision, Graph, NodeId, Observation, ObservationKind,
    TrustTable,
};

const THRESHOLDS: [f64; 5] = [0.0, 0.3, 0.5, 0.8, 1.0];

#[derive(Debug, Clone)]
struct Instance {
    n: usize,
    edges: Vec<(u32, u32, f64)>,
    trust: Vec<Option<u8>>,
    obs: Vec<u8>,
    source: u32,
    dest: u32,
}

impl Instance {
    fn graph(&self) -> Graph {
        let mut g = Graph::new(self.n);
        for &(u, w, c) in &self.edges {
            g.add_edge(NodeId(u), NodeId(w), c).unwrap();
        }
        g
    }

    fn table(&self, with_obs: bool) -> TrustTable {
        let mut t = TrustTable::default();
        let observer = NodeId(self.source);
        for (i, v) in self.trust.iter().enumerate() {
            let subject = NodeId(i as u32 + 1);
            if let Some(v) = v {
                t.set_trust(observer, subject, f64::from(*v) / 10.0);
            }
            let kind = match self.obs[i] {
                1 => ObservationKind::Negative,
                2 => ObservationKind::Positive,
                _ => continue,
            };
            if with_obs {
                t.record(observer, subject, Observation { kind, sim_time: 0.0 });
            }
        }
        t
    }
}

fn instance() -> impl Strategy<Value = Instance> {
    (2usize..=9).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(proptest::option::weighted(0.5, 1u32..=5), pairs),
            proptest::collection::vec(proptest::option::of(0u8..=10), n),
            proptest::collection::vec(0u8..3, n),
            1..=n as u32,
            1..=n as u32,
        )
            .prop_map(move |(costs, trust, obs, source, dest)| {
                let mut edges = Vec::new();
                let mut k = 0;
                for u in 1..=n as u32 {
                    for w in u + 1..=n as u32 {
                        if let Some(c) = costs[k] {
                            edges.push((u, w, f64::from(c)));
                        }
                        k += 1;
                    }
                }
                Instance {
                    n,
                    edges,
                    trust,
                    obs,
                    source,
                    dest,
                }
            })
    })
}

/// All-pairs shortest paths, no filtering.
fn floyd_warshall(inst: &Instance) -> Vec<Vec<f64>> {
    let n = inst.n;
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, w, c) in &inst.edges {
        let (u, w) = (u as usize - 1, w as usize - 1);
        d[u][w] = d[u][w].min(c);
        d[w][u] = d[w][u].min(c);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn matches_oracle(inst in instance(), ti in 0usize..5) {
        let (g, t) = (inst.graph(), inst.table(true));
        let (s, d) = (NodeId(inst.source), NodeId(inst.dest));
        let fast = inesh_search(&g, &t, s, d, THRESHOLDS[ti]).unwrap();
        let slow = oracle_search(&g, &t, s, d, THRESHOLDS[ti]).unwrap();
        prop_assert_eq!(fast.total_cost, slow.total_cost);
        prop_assert_eq!(&fast.excluded, &slow.excluded);
    }

    #[test]
    fn path_is_consistent(inst in instance(), ti in 0usize..5) {
        let (g, t) = (inst.graph(), inst.table(true));
        let (s, d) = (NodeId(inst.source), NodeId(inst.dest));
        let r = inesh_search(&g, &t, s, d, THRESHOLDS[ti]).unwrap();
        if r.path.is_empty() {
            prop_assert!(r.total_cost.is_infinite());
        } else {
            prop_assert_eq!(r.path[0], s);
            prop_assert_eq!(*r.path.last().unwrap(), d);
            let mut sum = 0.0;
            for w in r.path.windows(2) {
                sum += g.cost(w[0], w[1]).expect("consecutive nodes are adjacent");
            }
            prop_assert_eq!(sum, r.total_cost);
            for v in &r.path {
                prop_assert!(!r.excluded.contains(v), "excluded node {} on path", v);
            }
        }
    }

    #[test]
    fn raising_threshold_never_shortens(inst in instance(), a in 0usize..5, b in 0usize..5) {
        let (lo, hi) = (THRESHOLDS[a.min(b)], THRESHOLDS[a.max(b)]);
        let (g, t) = (inst.graph(), inst.table(true));
        let (s, d) = (NodeId(inst.source), NodeId(inst.dest));
        let r_lo = inesh_search(&g, &t, s, d, lo).unwrap();
        let r_hi = inesh_search(&g, &t, s, d, hi).unwrap();
        prop_assert!(r_lo.total_cost <= r_hi.total_cost);
        prop_assert!(r_lo.excluded.is_subset(&r_hi.excluded));
    }

    #[test]
    fn without_observations_is_plain_shortest_path(inst in instance(), ti in 0usize..5) {
        let (g, t) = (inst.graph(), inst.table(false));
        let (s, d) = (NodeId(inst.source), NodeId(inst.dest));
        let r = inesh_search(&g, &t, s, d, THRESHOLDS[ti]).unwrap();
        let fw = floyd_warshall(&inst);
        prop_assert!(r.excluded.is_empty());
        prop_assert_eq!(r.total_cost, fw[s.0 as usize - 1][d.0 as usize - 1]);
    }

    #[test]
    fn filter_needs_all_three_conditions(tc in 0u8..=10, ta in 0u8..=10, neg in any::<bool>(), ti in 0usize..5) {
        let mut t = TrustTable::default();
        let (me, cand, alt) = (NodeId(1), NodeId(2), NodeId(3));
        t.set_trust(me, cand, f64::from(tc) / 10.0);
        t.set_trust(me, alt, f64::from(ta) / 10.0);
        let kind = if neg { ObservationKind::Negative } else { ObservationKind::Positive };
        t.record(me, cand, Observation { kind, sim_time: 1.0 });
        let th = THRESHOLDS[ti];
        let expect = tc < ta && neg && f64::from(tc) / 10.0 < th;
        let got = trust_filter(cand, alt, &t, me, th) == FilterDecision::Exclude;
        prop_assert_eq!(got, expect);
    }
}
