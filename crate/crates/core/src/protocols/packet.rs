use std::fmt;

use crate::inesh::NodeId;
use crate::kernel::SimTime;

/// Size of every control message on the air.
pub const CONTROL_BITS: u32 = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ControlKind {
    Rreq,
    Rrep,
    Rerr,
}

impl fmt::Display for ControlKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ControlKind::Rreq => "RREQ",
            ControlKind::Rrep => "RREP",
            ControlKind::Rerr => "RERR",
        })
    }
}

/// Route discovery and maintenance message shared by AODV and DSR; each
/// protocol uses the subset of fields it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlMessage {
    pub kind: ControlKind,
    /// RREQ: the requester. RREP: the node the reply travels back to.
    /// RERR (DSR): the node that detected the failure.
    pub origin: NodeId,
    /// RREQ/RREP: the destination being sought. RERR (DSR): the source the
    /// error travels back to.
    pub dest: NodeId,
    pub request_id: u32,
    pub hop_count: u32,
    pub dest_seq: u32,
    pub origin_seq: u32,
    /// DSR: accumulated route (RREQ), full route (RREP), or the return path
    /// toward the source (RERR).
    pub route: Vec<NodeId>,
    /// AODV RERR: destinations that became unreachable, with their sequence numbers.
    pub unreachable: Vec<(NodeId, u32)>,
    /// DSR RERR: the failed link.
    pub broken_link: Option<(NodeId, NodeId)>,
    pub size_bits: u32,
}

impl ControlMessage {
    pub fn new(kind: ControlKind, origin: NodeId, dest: NodeId) -> Self {
        ControlMessage {
            kind,
            origin,
            dest,
            request_id: 0,
            hop_count: 0,
            dest_seq: 0,
            origin_seq: 0,
            route: Vec::new(),
            unreachable: Vec::new(),
            broken_link: None,
            size_bits: CONTROL_BITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataPacket {
    /// Unique across the whole run.
    pub uid: u64,
    pub src: NodeId,
    pub dest: NodeId,
    /// Per-flow sequence number.
    pub seq: u32,
    pub payload_bytes: u32,
    pub sent_at: SimTime,
    /// DSR source route; empty under AODV.
    pub route: Vec<NodeId>,
    /// Set once a DSR intermediate node has rerouted the packet.
    pub salvaged: bool,
}

impl DataPacket {
    pub fn bits(&self) -> u64 {
        self.payload_bytes as u64 * 8
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Packet {
    Control(ControlMessage),
    Data(DataPacket),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DropReason {
    Blackhole,
    Dropper,
    NoRoute,
    LinkBreak,
}

impl DropReason {
    pub const ALL: [DropReason; 4] = [
        DropReason::Blackhole,
        DropReason::Dropper,
        DropReason::NoRoute,
        DropReason::LinkBreak,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::Blackhole => "blackhole",
            DropReason::Dropper => "dropper",
            DropReason::NoRoute => "noroute",
            DropReason::LinkBreak => "linkbreak",
        }
    }
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
