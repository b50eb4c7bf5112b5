//! Discrete-event kernel: a seeded, single-threaded event queue plus the
//! mobility and radio models the simulated nodes live in.

mod mobility;
mod queue;
mod radio;
mod trace;

pub use mobility::{waypoint_advance, MobileNode, MobilityParams, Terrain};
pub use queue::{Event, EventQueue, Step};
pub use radio::{in_range, neighbor_lists, snapshot_graph, RadioModel};
pub use trace::TraceLog;

/// Simulated time in seconds.
pub type SimTime = f64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("cannot schedule at t={at} when the clock reads t={now}")]
    InPast { at: SimTime, now: SimTime },
    #[error("event time {0} is not finite")]
    NotFinite(SimTime),
}
