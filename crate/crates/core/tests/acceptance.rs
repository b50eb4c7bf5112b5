//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use inesh_sim::harness::campaign::{parse_campaign, run_campaign};
use inesh_sim::harness::config::{Protocol, ScenarioConfig};
use inesh_sim::harness::scenario::run_scenario;
use inesh_sim::inesh::{
    inesh_search, oracle_search, Graph, NodeId, Observation, ObservationKind, TrustOutcome, TrustParams,
    TrustTable,
};
use inesh_sim::MetricsReport;

const ORACLE_INSTANCES: usize = 1_000;
const ORACLE_MAX_NODES: usize = 12;
const ORACLE_DENSITY: (f64, f64) = (0.2, 0.8);
const ORACLE_THRESHOLDS: [f64; 5] = [0.0, 0.3, 0.5, 0.8, 1.0];
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(30);
const TRUST_OPERATIONS: usize = 10_000;
const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const BLACKHOLE_FRACTION: f64 = 0.1;
const CAMPAIGN_RUNS: usize = 40;
const RUNTIME_LIMIT: Duration = Duration::from_secs(60);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn run(cfg: &ScenarioConfig) -> MetricsReport {
    run_scenario(cfg).expect("scenario runs").report
}

fn standard(node_count: usize, protocol: Protocol, inesh: bool, fraction: f64, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        node_count,
        protocol,
        inesh_enabled: inesh,
        malicious_fraction: fraction,
        seed,
        ..ScenarioConfig::default()
    }
}

fn random_instance(rng: &mut ChaCha8Rng) -> (Graph, TrustTable, NodeId, NodeId, f64) {
    let n = rng.gen_range(2..=ORACLE_MAX_NODES);
    let density = rng.gen_range(ORACLE_DENSITY.0..=ORACLE_DENSITY.1);
    let mut g = Graph::new(n);
    for u in 1..=n as u32 {
        for w in u + 1..=n as u32 {
            if rng.gen_bool(density) {
                let cost = f64::from(rng.gen_range(1u32..=5));
                g.add_edge(NodeId(u), NodeId(w), cost).unwrap();
            }
        }
    }
    let source = NodeId(rng.gen_range(1..=n as u32));
    let dest = NodeId(rng.gen_range(1..=n as u32));
    let mut table = TrustTable::default();
    for s in 1..=n as u32 {
        // Coarse values so ties are common.
        if rng.gen_bool(0.7) {
            table.set_trust(source, NodeId(s), f64::from(rng.gen_range(0u32..=10)) / 10.0);
        }
        match rng.gen_range(0..3) {
            0 => {}
            k => table.record(
                source,
                NodeId(s),
                Observation {
                    kind: if k == 1 {
                        ObservationKind::Negative
                    } else {
                        ObservationKind::Positive
                    },
                    sim_time: 0.0,
                },
            ),
        }
    }
    let threshold = ORACLE_THRESHOLDS[rng.gen_range(0..ORACLE_THRESHOLDS.len())];
    (g, table, source, dest, threshold)
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1E5);
    let mut mismatches = 0;
    let mut excluding = 0;
    for _ in 0..ORACLE_INSTANCES {
        let (g, t, s, d, th) = random_instance(&mut rng);
        let fast = inesh_search(&g, &t, s, d, th).unwrap();
        let slow = oracle_search(&g, &t, s, d, th).unwrap();
        if fast.total_cost != slow.total_cost {
            mismatches += 1;
        }
        if !fast.excluded.is_empty() {
            excluding += 1;
        }
    }
    let elapsed = started.elapsed();
    outcome(
        mismatches == 0 && elapsed < ORACLE_TIME_LIMIT,
        format!(
            "{ORACLE_INSTANCES} instances, {mismatches} cost mismatches, {excluding} with exclusions, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn trust_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7257);
    let params = TrustParams {
        initial: rng.gen(),
        reward: rng.gen(),
        penalty: rng.gen(),
    };
    let mut table = TrustTable::new(params);
    let mut out_of_range = 0;
    for i in 0..TRUST_OPERATIONS {
        let observer = NodeId(rng.gen_range(1..=6));
        let subject = NodeId(rng.gen_range(1..=6));
        let outcome = if rng.gen_bool(0.5) {
            TrustOutcome::Reward
        } else {
            TrustOutcome::Penalize
        };
        let v = table.update(observer, subject, outcome, i as f64);
        if !(0.0..=1.0).contains(&v) || !(0.0..=1.0).contains(&table.trust(observer, subject)) {
            out_of_range += 1;
        }
    }
    out_of_range += table.scores().filter(|(_, v)| !(0.0..=1.0).contains(v)).count();
    outcome(
        out_of_range == 0,
        format!("{TRUST_OPERATIONS} updates, {out_of_range} values outside [0, 1]"),
    )
}

fn filter_no_op() -> Outcome {
    let mut differing = Vec::new();
    let mut deliveries = 0;
    for seed in SEEDS {
        let base = ScenarioConfig {
            trust_init: 1.0,
            ..standard(35, Protocol::Aodv, false, 0.0, seed)
        };
        let with = ScenarioConfig {
            inesh_enabled: true,
            ..base.clone()
        };
        let a = run_scenario(&base).unwrap();
        let b = run_scenario(&with).unwrap();
        deliveries += a.report.delivered;
        if a.delivery_trace != b.delivery_trace || a.delivery_trace.is_empty() {
            differing.push(seed);
        }
    }
    outcome(
        differing.is_empty(),
        format!("seeds {SEEDS:?}, differing {differing:?}, {deliveries} deliveries compared"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("scenario.cfg");
    std::fs::write(&cfg_path, "[scenario]\nnode_count = 35\nseed = 11\n").unwrap();
    let bin = env!("CARGO_BIN_EXE_inesh-sim");
    let simulate = |out: &Path| {
        Command::new(bin)
            .args(["simulate", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap()
            .status
            .success()
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    if !simulate(&a) || !simulate(&b) {
        return outcome(false, "simulate exited with an error");
    }
    let same = ["summary.csv", "throughput.csv"].iter().all(|f| {
        let x = std::fs::read(a.join(f)).unwrap();
        let y = std::fs::read(b.join(f)).unwrap();
        !x.is_empty() && x == y
    });
    outcome(same, "two CLI runs, summary.csv and throughput.csv compared byte for byte")
}

fn conservation() -> Outcome {
    let spec = parse_campaign(
        "[sweep]\nnode_count = 35, 40, 45, 50\nprotocol = aodv, dsr\nseed = 1, 2, 3, 4, 5\n",
    )
    .unwrap();
    let records = run_campaign(&spec).unwrap();
    let broken = records.iter().filter(|r| !r.report.conserved()).count();
    outcome(
        records.len() == CAMPAIGN_RUNS && broken == 0,
        format!("{} runs, {broken} violating sent == delivered + dropped + in_flight", records.len()),
    )
}

fn median_pdr(node_count: usize, protocol: Protocol, inesh: bool, fraction: f64) -> f64 {
    median(
        SEEDS
            .iter()
            .map(|&s| run(&standard(node_count, protocol, inesh, fraction, s)).pdr)
            .collect(),
    )
}

fn blackhole_efficacy() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for protocol in [Protocol::Aodv, Protocol::Dsr] {
        let clean = median_pdr(50, protocol, false, 0.0);
        let attacked = median_pdr(50, protocol, false, BLACKHOLE_FRACTION);
        pass &= attacked < clean;
        detail.push(format!("{protocol}: attacked {attacked:.4} vs clean {clean:.4}"));
    }
    outcome(pass, detail.join("; "))
}

fn inesh_benefit() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for protocol in [Protocol::Aodv, Protocol::Dsr] {
        let baseline = median_pdr(50, protocol, false, BLACKHOLE_FRACTION);
        let inesh = median_pdr(50, protocol, true, BLACKHOLE_FRACTION);
        pass &= inesh > baseline;
        detail.push(format!("{protocol}: inesh {inesh:.4} vs baseline {baseline:.4}"));
    }
    outcome(pass, detail.join("; "))
}

fn throughput_trends() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for protocol in [Protocol::Aodv, Protocol::Dsr] {
        let mut finals = Vec::new();
        for n in [35, 50] {
            let mut bits = Vec::new();
            for seed in SEEDS {
                let r = run(&standard(n, protocol, false, BLACKHOLE_FRACTION, seed));
                let monotone = r
                    .throughput_series
                    .windows(2)
                    .all(|w| w[1].cumulative_bits >= w[0].cumulative_bits);
                if !monotone {
                    pass = false;
                    detail.push(format!("{protocol} n={n} seed={seed}: cumulative throughput decreased"));
                }
                bits.push(r.final_cumulative_bits() as f64);
            }
            finals.push(median(bits));
        }
        pass &= finals[1] >= finals[0];
        detail.push(format!(
            "{protocol}: median cumulative bits n=50 {} vs n=35 {}",
            finals[1], finals[0]
        ));
    }
    outcome(pass, detail.join("; "))
}

fn runtime() -> Outcome {
    let started = Instant::now();
    let r = run(&standard(50, Protocol::Aodv, false, BLACKHOLE_FRACTION, 1));
    let elapsed = started.elapsed();
    outcome(
        elapsed < RUNTIME_LIMIT && r.sent > 0,
        format!("300 s simulated, 50 nodes, {:.3}s wall clock", elapsed.as_secs_f64()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("trust bounds", trust_bounds),
        ("filter no-op reduction", filter_no_op),
        ("determinism", determinism),
        ("packet conservation", conservation),
        ("blackhole efficacy", blackhole_efficacy),
        ("inesh benefit", inesh_benefit),
        ("throughput trends", throughput_trends),
        ("desk-scale runtime", runtime),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} {}: {} ({})",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
