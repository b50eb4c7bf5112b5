use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use inesh_sim::harness::campaign::{parse_campaign, run_campaign};
use inesh_sim::harness::config::{parse_config, Protocol, ScenarioConfig};
use inesh_sim::harness::output::{write_tables, RunRecord};
use inesh_sim::harness::scenario::{run_scenario_with, RunOptions, ScenarioError};

#[derive(Parser)]
#[command(name = "inesh-sim", version, about = "Deterministic MANET simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = parse_protocol)]
        protocol: Option<Protocol>,
        /// Enable trust-filtered next-hop selection.
        #[arg(long)]
        inesh: bool,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also write trace.log and drops.log.
        #[arg(long)]
        trace: bool,
    },
    /// Run every configuration of a sweep.
    Campaign {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    s.parse()
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) => m,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn write_err(e: std::io::Error) -> Failure {
    Failure::Runtime(format!("writing output: {e}"))
}

fn scenario_failure(e: ScenarioError) -> Failure {
    match e {
        ScenarioError::Config(c) => Failure::Config(c.to_string()),
        other => Failure::Runtime(other.to_string()),
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    config: &Path,
    seed: Option<u64>,
    protocol: Option<Protocol>,
    inesh: bool,
    duration: Option<f64>,
    out: &Path,
    trace: bool,
) -> Result<(), Failure> {
    let text = read(config)?;
    let mut cfg: ScenarioConfig =
        parse_config(&text).map_err(|e| Failure::Config(format!("{}: {e}", config.display())))?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(protocol) = protocol {
        cfg.protocol = protocol;
    }
    if inesh {
        cfg.inesh_enabled = true;
    }
    if let Some(d) = duration {
        cfg.duration_s = d;
    }
    cfg.validate().map_err(|e| Failure::Config(e.to_string()))?;

    let opts = RunOptions {
        trace,
        ..RunOptions::default()
    };
    let run = run_scenario_with(&cfg, &opts).map_err(scenario_failure)?;
    let r = &run.report;
    let record = RunRecord {
        run_id: 0,
        malicious_count: run.malicious.len(),
        config: cfg.clone(),
        report: r.clone(),
    };
    write_tables(out, &[record]).map_err(write_err)?;
    if trace {
        std::fs::write(out.join("trace.log"), &run.trace_log).map_err(write_err)?;
        std::fs::write(out.join("drops.log"), &run.drops_log).map_err(write_err)?;
    }
    println!(
        "{} inesh={} nodes={} seed={}: sent={} delivered={} pdr={:.4} delay={:.6}s overhead={:.3}",
        cfg.protocol,
        cfg.inesh_enabled,
        cfg.node_count,
        cfg.seed,
        r.sent,
        r.delivered,
        r.pdr,
        r.mean_end_to_end_delay,
        r.routing_overhead
    );
    Ok(())
}

fn campaign(spec: &Path, out: &Path) -> Result<(), Failure> {
    let text = read(spec)?;
    let spec_parsed =
        parse_campaign(&text).map_err(|e| Failure::Config(format!("{}: {e}", spec.display())))?;
    let records = run_campaign(&spec_parsed).map_err(|e| match e.source {
        ScenarioError::Config(_) => Failure::Config(e.to_string()),
        _ => Failure::Runtime(e.to_string()),
    })?;
    write_tables(out, &records).map_err(write_err)?;
    println!("{} runs written to {}", records.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Simulate {
            config,
            seed,
            protocol,
            inesh,
            duration,
            out,
            trace,
        } => simulate(config, *seed, *protocol, *inesh, *duration, out, *trace),
        Command::Campaign { spec, out } => campaign(spec, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
