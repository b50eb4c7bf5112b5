//! Teaching-grade AODV: on-demand discovery with destination sequence
//! numbers, reverse-path RREPs and precursor-based RERRs. No HELLOs, no
//! gratuitous RREPs, no expanding-ring search.

use std::collections::{BTreeMap, BTreeSet};

use super::{Action, Candidate, ControlKind, ControlMessage, DataPacket, DropReason, NodeCtx, Timer};
use crate::inesh::NodeId;
use crate::kernel::SimTime;

#[derive(Debug, Clone, PartialEq)]
pub struct AodvRouteEntry {
    pub dest: NodeId,
    pub next_hop: NodeId,
    pub hop_count: u32,
    pub dest_seq: u32,
    pub lifetime: SimTime,
    pub valid: bool,
    /// Neighbors that forward through this entry and must hear about breaks.
    pub precursors: BTreeSet<NodeId>,
}

impl AodvRouteEntry {
    pub fn is_live(&self, now: SimTime) -> bool {
        self.valid && now <= self.lifetime
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Discovery {
    request_id: u32,
    attempt: u32,
}

#[derive(Debug, Clone)]
pub struct AodvNode {
    me: NodeId,
    own_seq: u32,
    next_request_id: u32,
    table: BTreeMap<NodeId, AodvRouteEntry>,
    seen: BTreeSet<(NodeId, u32)>,
    buffer: BTreeMap<NodeId, Vec<DataPacket>>,
    discovery: BTreeMap<NodeId, Discovery>,
    /// Destinations this node originates traffic for.
    active: BTreeSet<NodeId>,
}

impl AodvNode {
    pub fn new(me: NodeId) -> Self {
        AodvNode {
            me,
            own_seq: 0,
            next_request_id: 0,
            table: BTreeMap::new(),
            seen: BTreeSet::new(),
            buffer: BTreeMap::new(),
            discovery: BTreeMap::new(),
            active: BTreeSet::new(),
        }
    }

    pub fn own_seq(&self) -> u32 {
        self.own_seq
    }

    pub fn route(&self, dest: NodeId) -> Option<&AodvRouteEntry> {
        self.table.get(&dest)
    }

    pub fn live_route(&self, dest: NodeId, now: SimTime) -> Option<&AodvRouteEntry> {
        self.table.get(&dest).filter(|e| e.is_live(now))
    }

    pub fn buffered(&self) -> usize {
        self.buffer.values().map(Vec::len).sum()
    }

    pub fn is_discovering(&self, dest: NodeId) -> bool {
        self.discovery.contains_key(&dest)
    }

    /// Installs or refreshes a route if it is new, fresher, or as fresh and
    /// shorter than what the table holds. Returns whether it was taken.
    pub fn offer_route(
        &mut self,
        dest: NodeId,
        next_hop: NodeId,
        hop_count: u32,
        dest_seq: u32,
        lifetime: SimTime,
        now: SimTime,
    ) -> bool {
        let accept = match self.table.get(&dest) {
            None => true,
            Some(e) => {
                !e.is_live(now)
                    || dest_seq > e.dest_seq
                    || (dest_seq == e.dest_seq && hop_count < e.hop_count)
                    || (dest_seq == e.dest_seq && hop_count == e.hop_count && next_hop == e.next_hop)
            }
        };
        if accept {
            let precursors = self
                .table
                .remove(&dest)
                .filter(|e| e.next_hop == next_hop)
                .map(|e| e.precursors)
                .unwrap_or_default();
            self.table.insert(
                dest,
                AodvRouteEntry {
                    dest,
                    next_hop,
                    hop_count,
                    dest_seq,
                    lifetime,
                    valid: true,
                    precursors,
                },
            );
        }
        accept
    }

    pub fn originate(&mut self, ctx: &mut NodeCtx, pkt: DataPacket) {
        self.active.insert(pkt.dest);
        if pkt.dest == self.me {
            ctx.push(Action::Deliver(pkt));
            return;
        }
        self.forward_data(ctx, pkt, None);
    }

    /// Floods a fresh RREQ for `dest` unless a live route exists.
    pub fn originate_rreq(&mut self, ctx: &mut NodeCtx, dest: NodeId) {
        if self.live_route(dest, ctx.now).is_some() {
            return;
        }
        self.send_rreq(ctx, dest, 1);
    }

    fn send_rreq(&mut self, ctx: &mut NodeCtx, dest: NodeId, attempt: u32) {
        self.own_seq += 1;
        self.next_request_id += 1;
        let request_id = self.next_request_id;
        self.seen.insert((self.me, request_id));
        self.discovery.insert(dest, Discovery { request_id, attempt });

        let mut msg = ControlMessage::new(ControlKind::Rreq, self.me, dest);
        msg.request_id = request_id;
        msg.dest_seq = self.table.get(&dest).map_or(0, |e| e.dest_seq);
        msg.origin_seq = self.own_seq;
        ctx.push(Action::Broadcast(msg));
        let wait = ctx.params.discovery_wait * f64::from(1u32 << (attempt - 1).min(16));
        ctx.push(Action::SetTimer {
            after: wait,
            timer: Timer::DiscoveryTimeout {
                dest,
                request_id,
                attempt,
            },
        });
    }

    fn ensure_discovery(&mut self, ctx: &mut NodeCtx, dest: NodeId) {
        if !self.discovery.contains_key(&dest) {
            self.originate_rreq(ctx, dest);
        }
    }

    pub fn handle_timer(&mut self, ctx: &mut NodeCtx, timer: Timer) {
        let Timer::DiscoveryTimeout {
            dest,
            request_id,
            attempt,
        } = timer;
        match self.discovery.get(&dest) {
            Some(d) if d.request_id == request_id => {}
            _ => return,
        }
        if self.live_route(dest, ctx.now).is_some() {
            self.discovery.remove(&dest);
            self.flush(ctx, dest);
            return;
        }
        if attempt < ctx.params.discovery_attempts {
            self.send_rreq(ctx, dest, attempt + 1);
        } else {
            self.discovery.remove(&dest);
            for pkt in self.buffer.remove(&dest).unwrap_or_default() {
                ctx.push(Action::Drop {
                    pkt,
                    reason: DropReason::NoRoute,
                });
            }
        }
    }

    pub fn handle_control(&mut self, ctx: &mut NodeCtx, from: NodeId, msg: ControlMessage) {
        match msg.kind {
            ControlKind::Rreq => self.handle_rreq(ctx, from, msg),
            ControlKind::Rrep => self.handle_rrep(ctx, from, msg),
            ControlKind::Rerr => self.handle_rerr(ctx, from, msg),
        }
    }

    /// Duplicate requests are discarded. Otherwise the reverse route is
    /// installed and the node either answers (it is the destination, or it
    /// holds a fresh enough route) or rebroadcasts with one more hop.
    pub fn handle_rreq(&mut self, ctx: &mut NodeCtx, from: NodeId, msg: ControlMessage) {
        if msg.origin == self.me || !self.seen.insert((msg.origin, msg.request_id)) {
            return;
        }
        let lifetime = ctx.now + ctx.params.route_lifetime;
        self.offer_route(msg.origin, from, msg.hop_count + 1, msg.origin_seq, lifetime, ctx.now);

        if msg.dest == self.me {
            self.own_seq = self.own_seq.max(msg.dest_seq);
            let mut reply = ControlMessage::new(ControlKind::Rrep, msg.origin, self.me);
            reply.dest_seq = self.own_seq;
            reply.hop_count = 0;
            self.send_control(ctx, from, reply);
            return;
        }

        let usable = self
            .live_route(msg.dest, ctx.now)
            .filter(|e| e.dest_seq >= msg.dest_seq && e.next_hop != from)
            .map(|e| (e.next_hop, e.hop_count, e.dest_seq));
        if let Some((next_hop, hop_count, dest_seq)) = usable {
            let admitted = ctx.admit(
                &[Candidate::new(next_hop, f64::from(hop_count.saturating_sub(1)))],
                msg.dest,
            );
            if admitted == Some(next_hop) {
                if let Some(e) = self.table.get_mut(&msg.dest) {
                    e.precursors.insert(from);
                }
                let mut reply = ControlMessage::new(ControlKind::Rrep, msg.origin, msg.dest);
                reply.dest_seq = dest_seq;
                reply.hop_count = hop_count;
                self.send_control(ctx, from, reply);
                return;
            }
        }

        let mut relay = msg;
        relay.hop_count += 1;
        ctx.push(Action::Broadcast(relay));
    }

    pub fn handle_rrep(&mut self, ctx: &mut NodeCtx, from: NodeId, msg: ControlMessage) {
        if ctx.inesh.is_some() {
            let offered = Candidate::new(from, f64::from(msg.hop_count));
            if ctx.admit(&[offered], msg.dest) != Some(from) {
                return;
            }
        }
        let hop_count = msg.hop_count + 1;
        let lifetime = ctx.now + ctx.params.route_lifetime;
        let taken = self.offer_route(msg.dest, from, hop_count, msg.dest_seq, lifetime, ctx.now);

        if msg.origin == self.me {
            if self.live_route(msg.dest, ctx.now).is_some() {
                self.discovery.remove(&msg.dest);
                self.flush(ctx, msg.dest);
            }
            return;
        }
        if !taken {
            return;
        }
        let Some(back) = self.live_route(msg.origin, ctx.now).map(|e| e.next_hop) else {
            return;
        };
        if let Some(e) = self.table.get_mut(&msg.dest) {
            e.precursors.insert(back);
        }
        if let Some(e) = self.table.get_mut(&msg.origin) {
            e.precursors.insert(from);
        }
        let mut relay = msg;
        relay.hop_count = hop_count;
        self.send_control(ctx, back, relay);
    }

    pub fn handle_rerr(&mut self, ctx: &mut NodeCtx, from: NodeId, msg: ControlMessage) {
        let mut lost = Vec::new();
        for &(dest, seq) in &msg.unreachable {
            if let Some(e) = self.table.get_mut(&dest) {
                if e.valid && e.next_hop == from {
                    e.valid = false;
                    e.dest_seq = e.dest_seq.max(seq);
                    lost.push((dest, e.dest_seq, !e.precursors.is_empty()));
                }
            }
        }
        self.after_invalidation(ctx, lost);
    }

    /// Invalidates every route through `broken_next_hop`, tells precursors,
    /// and restarts discovery for destinations this node sources traffic to.
    /// Returns how many routes were invalidated.
    pub fn handle_link_break(&mut self, ctx: &mut NodeCtx, broken_next_hop: NodeId) -> usize {
        let mut lost = Vec::new();
        for e in self.table.values_mut() {
            if e.valid && e.next_hop == broken_next_hop {
                e.valid = false;
                e.dest_seq += 1;
                lost.push((e.dest, e.dest_seq, true));
            }
        }
        let count = lost.len();
        self.after_invalidation(ctx, lost);
        count
    }

    fn after_invalidation(&mut self, ctx: &mut NodeCtx, lost: Vec<(NodeId, u32, bool)>) {
        if lost.is_empty() {
            return;
        }
        let unreachable: Vec<(NodeId, u32)> = lost
            .iter()
            .filter(|&&(_, _, notify)| notify)
            .map(|&(d, s, _)| (d, s))
            .collect();
        if !unreachable.is_empty() {
            let mut rerr = ControlMessage::new(ControlKind::Rerr, self.me, self.me);
            rerr.unreachable = unreachable;
            ctx.push(Action::Broadcast(rerr));
        }
        for (dest, _, _) in lost {
            if self.active.contains(&dest) {
                self.ensure_discovery(ctx, dest);
            }
        }
    }

    pub fn handle_data(&mut self, ctx: &mut NodeCtx, from: NodeId, pkt: DataPacket) {
        if pkt.dest == self.me {
            ctx.push(Action::Deliver(pkt));
            return;
        }
        self.forward_data(ctx, pkt, Some(from));
    }

    /// Hop-by-hop forwarding. `from` is `None` at the source, which buffers
    /// and discovers instead of dropping.
    pub fn forward_data(&mut self, ctx: &mut NodeCtx, pkt: DataPacket, from: Option<NodeId>) {
        let Some(entry) = self.live_route(pkt.dest, ctx.now) else {
            self.no_route(ctx, pkt, from, DropReason::NoRoute);
            return;
        };
        let next = entry.next_hop;
        let remaining = f64::from(entry.hop_count.saturating_sub(1));

        if ctx.admit(&[Candidate::new(next, remaining)], pkt.dest) != Some(next) {
            self.handle_link_break(ctx, next);
            self.no_route(ctx, pkt, from, DropReason::NoRoute);
            return;
        }
        if !ctx.is_neighbor(next) {
            self.handle_link_break(ctx, next);
            self.no_route(ctx, pkt, from, DropReason::LinkBreak);
            return;
        }

        let lifetime = ctx.now + ctx.params.route_lifetime;
        if let Some(e) = self.table.get_mut(&pkt.dest) {
            e.lifetime = e.lifetime.max(lifetime);
            if let Some(prev) = from {
                e.precursors.insert(prev);
            }
        }
        if from.is_some() {
            if let Some(e) = self.table.get_mut(&pkt.src).filter(|e| e.valid) {
                e.lifetime = e.lifetime.max(lifetime);
                e.precursors.insert(next);
            }
        }
        ctx.push(Action::Forward { to: next, pkt });
    }

    fn no_route(&mut self, ctx: &mut NodeCtx, pkt: DataPacket, from: Option<NodeId>, reason: DropReason) {
        match from {
            None => {
                let dest = pkt.dest;
                self.buffer.entry(dest).or_default().push(pkt);
                self.ensure_discovery(ctx, dest);
            }
            Some(prev) => {
                let seq = self.table.get(&pkt.dest).map_or(0, |e| e.dest_seq);
                let mut rerr = ControlMessage::new(ControlKind::Rerr, self.me, self.me);
                rerr.unreachable = vec![(pkt.dest, seq)];
                self.send_control(ctx, prev, rerr);
                ctx.push(Action::Drop { pkt, reason });
            }
        }
    }

    fn flush(&mut self, ctx: &mut NodeCtx, dest: NodeId) {
        for pkt in self.buffer.remove(&dest).unwrap_or_default() {
            self.forward_data(ctx, pkt, None);
        }
    }

    fn send_control(&self, ctx: &mut NodeCtx, to: NodeId, msg: ControlMessage) {
        ctx.push(Action::Unicast { to, msg });
    }

    /// Drops routes through a neighbor the trust filter now rejects.
    pub fn on_trust_drop(&mut self, ctx: &mut NodeCtx, subject: NodeId) {
        if ctx.distrusts(subject) {
            self.handle_link_break(ctx, subject);
        }
    }

    pub fn dump(&self, now: SimTime) -> String {
        let mut out = String::new();
        for e in self.table.values() {
            out.push_str(&format!(
                "t={:.6} node={} dest={} next={} hops={} seq={} lifetime={:.6} valid={}\n",
                now,
                self.me,
                e.dest,
                e.next_hop,
                e.hop_count,
                e.dest_seq,
                e.lifetime,
                u8::from(e.is_live(now)),
            ));
        }
        out
    }
}
