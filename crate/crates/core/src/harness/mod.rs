//! Scenario configuration, the simulation driver, metrics, campaigns and CSV
//! output.

pub mod campaign;
pub mod config;
pub mod metrics;
pub mod output;
pub mod scenario;
