//! Malicious node profiles: blackholes that forge route replies and swallow
//! data, and droppers that lose a fraction of the data they should forward.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;

use crate::inesh::NodeId;
use crate::protocols::{ControlKind, ControlMessage, DropReason};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MaliciousKind {
    Blackhole,
    Dropper,
}

impl MaliciousKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MaliciousKind::Blackhole => "blackhole",
            MaliciousKind::Dropper => "dropper",
        }
    }
}

impl fmt::Display for MaliciousKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaliciousProfile {
    pub kind: MaliciousKind,
    /// Only used by droppers.
    pub drop_probability: f64,
    /// Added to the requested destination sequence number in forged replies.
    pub seq_inflation: u32,
    /// Hop count claimed in forged replies.
    pub hop_claim: u32,
}

impl MaliciousProfile {
    pub fn blackhole() -> Self {
        MaliciousProfile {
            kind: MaliciousKind::Blackhole,
            drop_probability: 1.0,
            seq_inflation: 100,
            hop_claim: 1,
        }
    }

    pub fn dropper(drop_probability: f64) -> Self {
        MaliciousProfile {
            kind: MaliciousKind::Dropper,
            drop_probability,
            ..Self::blackhole()
        }
    }

    pub fn is_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.drop_probability) && self.seq_inflation >= 1
    }
}

/// Which routing protocol a forged reply has to fool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplyForm {
    /// Hop-by-hop: inflated sequence number and a short hop count.
    Aodv,
    /// Source-routed: the accumulated route plus `[self, dest]`.
    Dsr,
}

/// Forges the reply a blackhole sends for `rreq`. `None` when `msg` is not a
/// request, the profile is not a blackhole, or the request names `me`.
pub fn blackhole_on_rreq(
    profile: &MaliciousProfile,
    me: NodeId,
    msg: &ControlMessage,
    form: ReplyForm,
) -> Option<ControlMessage> {
    if profile.kind != MaliciousKind::Blackhole || msg.kind != ControlKind::Rreq {
        return None;
    }
    if msg.dest == me || msg.origin == me {
        return None;
    }
    let mut reply = ControlMessage::new(ControlKind::Rrep, msg.origin, msg.dest);
    reply.request_id = msg.request_id;
    reply.hop_count = profile.hop_claim;
    match form {
        ReplyForm::Aodv => {
            reply.dest_seq = msg.dest_seq.saturating_add(profile.seq_inflation);
        }
        ReplyForm::Dsr => {
            if msg.route.contains(&me) || msg.route.contains(&msg.dest) {
                return None;
            }
            reply.route = msg.route.clone();
            reply.route.push(me);
            reply.route.push(msg.dest);
        }
    }
    Some(reply)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Forward,
    Drop(DropReason),
}

/// Decides the fate of a data packet transiting a malicious node. Only
/// droppers with `0 < p < 1` consume randomness.
pub fn maybe_drop<R: Rng + ?Sized>(profile: &MaliciousProfile, rng: &mut R) -> Verdict {
    match profile.kind {
        MaliciousKind::Blackhole => Verdict::Drop(DropReason::Blackhole),
        MaliciousKind::Dropper => {
            let p = profile.drop_probability;
            let dropped = if p <= 0.0 {
                false
            } else if p >= 1.0 {
                true
            } else {
                rng.gen::<f64>() < p
            };
            if dropped {
                Verdict::Drop(DropReason::Dropper)
            } else {
                Verdict::Forward
            }
        }
    }
}

/// Which nodes misbehave, and how.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdversaryAssignment {
    nodes: BTreeMap<NodeId, MaliciousProfile>,
}

impl AdversaryAssignment {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn explicit(ids: impl IntoIterator<Item = NodeId>, profile: MaliciousProfile) -> Self {
        AdversaryAssignment {
            nodes: ids.into_iter().map(|id| (id, profile)).collect(),
        }
    }

    /// Picks `round(fraction * node_count)` nodes among `1..=node_count`,
    /// skipping `protected`. Fewer are picked if not enough are eligible.
    pub fn draw<R: Rng + ?Sized>(
        node_count: usize,
        fraction: f64,
        protected: &BTreeSet<NodeId>,
        profile: MaliciousProfile,
        rng: &mut R,
    ) -> Self {
        let eligible: Vec<NodeId> = (1..=node_count as u32)
            .map(NodeId)
            .filter(|id| !protected.contains(id))
            .collect();
        let wanted = (fraction.clamp(0.0, 1.0) * node_count as f64).round() as usize;
        let count = wanted.min(eligible.len());
        if count == 0 {
            return Self::none();
        }
        let picked = rand::seq::index::sample(rng, eligible.len(), count);
        Self::explicit(picked.into_iter().map(|i| eligible[i]), profile)
    }

    pub fn profile(&self, id: NodeId) -> Option<&MaliciousProfile> {
        self.nodes.get(&id)
    }

    pub fn is_malicious(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Assigned ids in ascending order.
    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }
}
