use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use inesh_sim::harness::config::ScenarioConfig;
use inesh_sim::harness::scenario::initial_positions;
use inesh_sim::inesh::{build_graph, CostMode, NodeId, Point};
use inesh_sim::kernel::{in_range, neighbor_lists, waypoint_advance, EventQueue, MobileNode, MobilityParams, RadioModel, Step};

const GOLDEN: &str = "tests/fixtures/adjacency_35_seed1.txt";

#[test]
fn golden_adjacency_35_nodes() {
    let cfg = ScenarioConfig::default();
    let positions: Vec<(NodeId, Point)> = initial_positions(&cfg)
        .into_iter()
        .enumerate()
        .map(|(i, p)| (NodeId(i as u32 + 1), p))
        .collect();
    let dump = build_graph(&positions, cfg.range_m, CostMode::Hop).unwrap().adjacency_dump();
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join(GOLDEN);
    if std::env::var_os("INESH_REGENERATE_GOLDEN").is_some() {
        std::fs::write(&path, &dump).unwrap();
    }
    let frozen = std::fs::read_to_string(&path).expect("golden file; set INESH_REGENERATE_GOLDEN=1 to create");
    assert_eq!(dump, frozen);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mobility_stays_in_terrain_and_under_speed_cap(seed in any::<u64>(), dt in 0.05f64..2.0) {
        let params = MobilityParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = params.terrain.sample(&mut rng);
        let mut node = MobileNode::spawn(NodeId(1), start, &params, &mut rng);
        let mut now = 0.0;
        for _ in 0..400 {
            let next = waypoint_advance(&node, now, dt, &params, &mut rng);
            prop_assert!(params.terrain.contains(next.position));
            prop_assert!(node.position.distance(&next.position) <= params.max_speed * dt + 1e-9);
            prop_assert!(next.speed > 0.0 && next.speed <= params.max_speed);
            node = next;
            now += dt;
        }
    }

    #[test]
    fn links_are_symmetric(seed in any::<u64>()) {
        let params = MobilityParams::default();
        let radio = RadioModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes: Vec<MobileNode> = (1..=20)
            .map(|i| MobileNode::fixed(NodeId(i), params.terrain.sample(&mut rng)))
            .collect();
        let lists = neighbor_lists(&nodes, &radio);
        for a in &nodes {
            for b in &nodes {
                if a.id != b.id {
                    prop_assert_eq!(in_range(a, b, &radio), in_range(b, a, &radio));
                    let listed = lists[a.id.0 as usize - 1].contains(&b.id);
                    prop_assert_eq!(listed, in_range(a, b, &radio));
                }
            }
        }
    }

    #[test]
    fn clock_never_runs_backwards(times in proptest::collection::vec(0u32..1000, 1..200)) {
        let mut q = EventQueue::new();
        for (i, t) in times.iter().enumerate() {
            q.schedule(f64::from(*t) / 10.0, i).unwrap();
        }
        let mut last = (f64::NEG_INFINITY, 0u64);
        let mut fired = 0;
        while let Step::Fired(e) = q.step() {
            prop_assert!((e.fire_at, e.seq) > last);
            prop_assert_eq!(q.now(), e.fire_at);
            last = (e.fire_at, e.seq);
            fired += 1;
        }
        prop_assert_eq!(fired, times.len());
    }
}
