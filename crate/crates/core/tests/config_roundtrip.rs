use proptest::prelude::*;

use inesh_sim::adversary::MaliciousKind;
use inesh_sim::harness::config::{parse_config, render_config, Protocol, ScenarioConfig};
use inesh_sim::harness::scenario::run_scenario;
use inesh_sim::inesh::NodeId;

fn config() -> impl Strategy<Value = ScenarioConfig> {
    (
        (2usize..60, 1.0f64..2000.0, 1.0f64..2000.0, 1.0f64..400.0, 0.0f64..40.0, 0.1f64..20.0),
        (1u32..4096, 1u32..1024, 0.001f64..1000.0, any::<u64>(), any::<bool>(), any::<bool>()),
        (0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0),
        (any::<bool>(), 0.0f64..=1.0, 0.0f64..=1.0, 0u8..3),
    )
        .prop_map(|(a, b, c, d)| {
            let (node_count, tx, ty, range, speed, rate) = a;
            let (payload, control, duration, seed, dsr, inesh) = b;
            let (threshold, init, reward, penalty, fraction) = c;
            let (dropper, p, suspicion, flow_mode) = d;
            let n = node_count as u32;
            let flows = match flow_mode {
                0 => None,
                1 => Some(Vec::new()),
                _ => Some(vec![(NodeId(1), NodeId(n)), (NodeId(n), NodeId(1))]),
            };
            let malicious_nodes = (flow_mode == 2 && n > 2).then(|| vec![NodeId(2)]);
            ScenarioConfig {
                node_count,
                terrain_x_m: tx,
                terrain_y_m: ty,
                range_m: range,
                max_speed_mps: speed,
                data_rate_pps: rate,
                payload_bytes: payload,
                control_bits: control,
                duration_s: duration,
                seed,
                protocol: if dsr { Protocol::Dsr } else { Protocol::Aodv },
                inesh_enabled: inesh,
                trust_threshold: threshold,
                trust_init: init,
                trust_reward: reward,
                trust_penalty: penalty,
                malicious_fraction: fraction,
                malicious_nodes,
                malicious_kind: if dropper { MaliciousKind::Dropper } else { MaliciousKind::Blackhole },
                drop_probability: p,
                false_suspicion_prob: suspicion,
                flows,
                ..ScenarioConfig::default()
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn render_then_parse_is_identity(cfg in config()) {
        prop_assert!(cfg.validate().is_ok());
        prop_assert_eq!(parse_config(&render_config(&cfg)).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_run_conserves_packets(cfg in config()) {
        let cfg = ScenarioConfig {
            node_count: cfg.node_count.min(30),
            duration_s: cfg.duration_s.min(40.0),
            data_rate_pps: cfg.data_rate_pps.min(8.0),
            flows: None,
            malicious_nodes: None,
            ..cfg
        };
        let r = run_scenario(&cfg).unwrap().report;
        prop_assert!(r.conserved());
        prop_assert!((0.0..=1.0).contains(&r.pdr));
        if r.sent > 0 {
            prop_assert_eq!(r.pdr, r.delivered as f64 / r.sent as f64);
        }
        prop_assert!(r.throughput_series.iter().all(|p| p.bits_per_s >= 0.0));
        for w in r.throughput_series.windows(2) {
            prop_assert!(w[1].cumulative_bits >= w[0].cumulative_bits);
        }
    }
}
