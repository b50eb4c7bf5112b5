//! Byte-stable CSV emission.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use super::config::ScenarioConfig;
use super::metrics::MetricsReport;
use crate::protocols::DropReason;

pub const SCHEMA_VERSION: u32 = 1;

/// One finished run, as it appears in the result tables.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub run_id: usize,
    pub config: ScenarioConfig,
    pub malicious_count: usize,
    pub report: MetricsReport,
}

pub fn summary_header() -> String {
    let mut cols: Vec<String> = [
        "schema_version",
        "run_id",
        "protocol",
        "inesh_enabled",
        "node_count",
        "seed",
        "duration_s",
        "malicious_fraction",
        "malicious_count",
        "sent",
        "delivered",
        "dropped",
        "in_flight",
        "pdr",
        "mean_delay_s",
        "routing_overhead",
        "control_tx",
        "data_tx",
        "delivered_bits",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cols.extend(DropReason::ALL.iter().map(|r| format!("drops_{r}")));
    cols.join(",")
}

pub fn summary_csv(records: &[RunRecord]) -> String {
    let mut out = summary_header();
    out.push('\n');
    for rec in records {
        let c = &rec.config;
        let r = &rec.report;
        let _ = write!(
            out,
            "{},{},{},{},{},{},{:.6},{:.6},{},{},{},{},{},{:.6},{:.6},{:.6},{},{},{}",
            SCHEMA_VERSION,
            rec.run_id,
            c.protocol,
            c.inesh_enabled,
            c.node_count,
            c.seed,
            c.duration_s,
            c.malicious_fraction,
            rec.malicious_count,
            r.sent,
            r.delivered,
            r.dropped,
            r.in_flight,
            r.pdr,
            r.mean_end_to_end_delay,
            r.routing_overhead,
            r.control_transmissions,
            r.data_transmissions,
            r.delivered_bits,
        );
        for n in r.drops_by_reason {
            let _ = write!(out, ",{n}");
        }
        out.push('\n');
    }
    out
}

pub fn throughput_csv(records: &[RunRecord]) -> String {
    let mut out = String::from("run_id,window_end_s,bits_per_s,cumulative_bits\n");
    for rec in records {
        for p in &rec.report.throughput_series {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{}",
                rec.run_id, p.window_end, p.bits_per_s, p.cumulative_bits
            );
        }
    }
    out
}

/// Writes `summary.csv` and `throughput.csv` into `dir`, creating it.
pub fn write_tables(dir: &Path, records: &[RunRecord]) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("summary.csv"), summary_csv(records))?;
    std::fs::write(dir.join("throughput.csv"), throughput_csv(records))?;
    Ok(())
}
