//! Simplified AODV and DSR.
//!
//! Each simulated node owns one [`RoutingState`]. Handlers never touch the
//! network directly: they read what the node can observe through a
//! [`NodeCtx`] and answer with a list of [`Action`]s that the driver carries
//! out. Every handler has a baseline behavior; when [`NodeCtx::inesh`] is set,
//! next hops additionally go through [`inesh_admit_next_hop`].

mod admission;
mod aodv;
mod dsr;
mod packet;

pub use admission::{inesh_admit_next_hop, Admission, Candidate};
pub use aodv::{AodvNode, AodvRouteEntry};
pub use dsr::{CachedRoute, DsrNode, DsrRouteCache};
pub use packet::{ControlKind, ControlMessage, DataPacket, DropReason, Packet, CONTROL_BITS};

use crate::inesh::{NodeId, TrustOutcome, TrustTable};
use crate::kernel::SimTime;

/// Timers a protocol can ask for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timer {
    /// Fires when a route discovery attempt has waited long enough.
    DiscoveryTimeout {
        dest: NodeId,
        request_id: u32,
        attempt: u32,
    },
}

/// What a handler wants done.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Broadcast(ControlMessage),
    Unicast { to: NodeId, msg: ControlMessage },
    Forward { to: NodeId, pkt: DataPacket },
    Deliver(DataPacket),
    Drop { pkt: DataPacket, reason: DropReason },
    SetTimer { after: SimTime, timer: Timer },
    /// Adjust this node's trust in `subject`.
    Trust { subject: NodeId, outcome: TrustOutcome },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RewardPolicy {
    /// Reward a forwarder once it has been seen passing a packet on.
    #[default]
    OnConfirmedDelivery,
    /// Also reward a next hop as soon as it is chosen.
    OnSelection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IneshParams {
    pub threshold: f64,
    pub reward_policy: RewardPolicy,
}

impl Default for IneshParams {
    fn default() -> Self {
        IneshParams {
            threshold: 0.5,
            reward_policy: RewardPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// AODV route lifetime and DSR cache entry lifetime.
    pub route_lifetime: SimTime,
    /// Wait before the first discovery retry; doubles with each attempt.
    pub discovery_wait: SimTime,
    /// Discovery attempts before buffered packets are given up.
    pub discovery_attempts: u32,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            route_lifetime: 10.0,
            discovery_wait: 0.5,
            discovery_attempts: 3,
        }
    }
}

/// A node's view of the world for the duration of one handler call.
pub struct NodeCtx<'a> {
    pub now: SimTime,
    pub me: NodeId,
    pub node_count: usize,
    /// Current radio neighbors, sorted.
    pub neighbors: &'a [NodeId],
    pub trust: &'a TrustTable,
    /// `Some` when the trust-filtered variant is enabled.
    pub inesh: Option<IneshParams>,
    pub params: ProtocolParams,
    actions: Vec<Action>,
}

impl<'a> NodeCtx<'a> {
    pub fn new(
        now: SimTime,
        me: NodeId,
        node_count: usize,
        neighbors: &'a [NodeId],
        trust: &'a TrustTable,
        inesh: Option<IneshParams>,
        params: ProtocolParams,
    ) -> Self {
        NodeCtx {
            now,
            me,
            node_count,
            neighbors,
            trust,
            inesh,
            params,
            actions: Vec::new(),
        }
    }

    pub fn is_neighbor(&self, id: NodeId) -> bool {
        self.neighbors.binary_search(&id).is_ok()
    }

    pub fn push(&mut self, action: Action) {
        self.actions.push(action);
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn take_actions(&mut self) -> Vec<Action> {
        std::mem::take(&mut self.actions)
    }

    /// Runs next-hop admission over `candidates` when the trust filter is on.
    /// The baseline variant picks the first candidate.
    pub(crate) fn admit(&mut self, candidates: &[Candidate], dest: NodeId) -> Option<NodeId> {
        let Some(inesh) = self.inesh else {
            return candidates.first().map(|c| c.hop);
        };
        let admission = inesh_admit_next_hop(
            self.me,
            self.node_count,
            self.neighbors,
            candidates,
            dest,
            self.trust,
            inesh.threshold,
        );
        if let (Some(hop), RewardPolicy::OnSelection) = (admission.next_hop, inesh.reward_policy) {
            if hop != dest {
                self.push(Action::Trust {
                    subject: hop,
                    outcome: TrustOutcome::Reward,
                });
            }
        }
        admission.next_hop
    }

    /// Whether the trust filter currently rejects `subject` as a next hop.
    pub(crate) fn distrusts(&self, subject: NodeId) -> bool {
        let Some(inesh) = self.inesh else {
            return false;
        };
        // Probe through a virtual destination one past the last real node,
        // reachable only via `subject`.
        let probe = NodeId(self.node_count as u32 + 1);
        let admission = inesh_admit_next_hop(
            self.me,
            self.node_count + 1,
            self.neighbors,
            &[Candidate::new(subject, 0.0)],
            probe,
            self.trust,
            inesh.threshold,
        );
        admission.excluded.contains(&subject) || admission.next_hop.is_none()
    }
}

/// Routing state of one node.
#[derive(Debug, Clone)]
pub enum RoutingState {
    Aodv(AodvNode),
    Dsr(DsrNode),
}

impl RoutingState {
    /// A new packet generated at this node.
    pub fn originate(&mut self, ctx: &mut NodeCtx, pkt: DataPacket) {
        match self {
            RoutingState::Aodv(s) => s.originate(ctx, pkt),
            RoutingState::Dsr(s) => s.originate(ctx, pkt),
        }
    }

    pub fn handle_control(&mut self, ctx: &mut NodeCtx, from: NodeId, msg: ControlMessage) {
        match self {
            RoutingState::Aodv(s) => s.handle_control(ctx, from, msg),
            RoutingState::Dsr(s) => s.handle_control(ctx, from, msg),
        }
    }

    pub fn handle_data(&mut self, ctx: &mut NodeCtx, from: NodeId, pkt: DataPacket) {
        match self {
            RoutingState::Aodv(s) => s.handle_data(ctx, from, pkt),
            RoutingState::Dsr(s) => s.handle_data(ctx, from, pkt),
        }
    }

    pub fn handle_timer(&mut self, ctx: &mut NodeCtx, timer: Timer) {
        match self {
            RoutingState::Aodv(s) => s.handle_timer(ctx, timer),
            RoutingState::Dsr(s) => s.handle_timer(ctx, timer),
        }
    }

    /// Called after this node penalized `subject` for dropping `pkt`.
    pub fn on_trust_drop(&mut self, ctx: &mut NodeCtx, subject: NodeId, pkt: &DataPacket) {
        match self {
            RoutingState::Aodv(s) => s.on_trust_drop(ctx, subject),
            RoutingState::Dsr(s) => s.on_trust_drop(ctx, subject, pkt),
        }
    }

    /// Packets waiting for a route.
    pub fn buffered(&self) -> usize {
        match self {
            RoutingState::Aodv(s) => s.buffered(),
            RoutingState::Dsr(s) => s.buffered(),
        }
    }

    /// Line-oriented dump of the routing table or route cache.
    pub fn dump(&self, now: SimTime) -> String {
        match self {
            RoutingState::Aodv(s) => s.dump(now),
            RoutingState::Dsr(s) => s.dump(now),
        }
    }
}
