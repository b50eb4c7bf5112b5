//! Deterministic discrete-event simulator for mobile ad hoc networks.
//!
//! The crate is organized bottom-up:
//!
//! - [`inesh`]: the trust-filtered shortest-path engine (graph, trust table,
//!   priority-queue search and a brute-force oracle used by the tests).
//! - [`kernel`]: event queue, random-waypoint mobility and unit-disk radio.
//! - [`protocols`]: simplified AODV and DSR state machines, each optionally
//!   consulting the path engine for next-hop admission.
//! - [`adversary`]: blackhole and dropper behavior profiles.
//! - [`harness`]: scenario configuration, the simulation driver, metrics,
//!   campaigns and CSV output.

pub mod adversary;
pub mod harness;
pub mod inesh;
pub mod kernel;
pub mod protocols;

pub use harness::config::{ScenarioConfig, Protocol};
pub use harness::metrics::MetricsReport;
pub use harness::scenario::{run_scenario, RunOutput};
pub use inesh::{Graph, NodeId, PathResult, TrustTable};
