//! Teaching-grade DSR: flooded route requests that accumulate the path,
//! replies carrying the full source route, a per-node route cache, and
//! route errors sent back along the traversed path. Salvaging is limited to
//! one reroute per packet.

use std::collections::{BTreeMap, BTreeSet};

use super::{Action, Candidate, ControlKind, ControlMessage, DataPacket, DropReason, NodeCtx, Timer};
use crate::inesh::NodeId;
use crate::kernel::SimTime;

#[derive(Debug, Clone, PartialEq)]
pub struct CachedRoute {
    /// Starts at the cache owner; no repeated nodes.
    pub route: Vec<NodeId>,
    pub inserted: SimTime,
}

fn has_repeats(route: &[NodeId]) -> bool {
    let mut seen = BTreeSet::new();
    !route.iter().all(|id| seen.insert(*id))
}

fn uses_link(route: &[NodeId], a: NodeId, b: NodeId) -> bool {
    route
        .windows(2)
        .any(|w| (w[0] == a && w[1] == b) || (w[0] == b && w[1] == a))
}

/// Source routes learned by one node.
#[derive(Debug, Clone, PartialEq)]
pub struct DsrRouteCache {
    owner: NodeId,
    routes: Vec<CachedRoute>,
}

impl DsrRouteCache {
    pub fn new(owner: NodeId) -> Self {
        DsrRouteCache {
            owner,
            routes: Vec::new(),
        }
    }

    pub fn routes(&self) -> &[CachedRoute] {
        &self.routes
    }

    /// Stores `route` (or refreshes an identical one). Routes that do not start
    /// at the owner, are shorter than one hop, or repeat a node are refused.
    pub fn insert(&mut self, route: Vec<NodeId>, now: SimTime) -> bool {
        if route.len() < 2 || route[0] != self.owner || has_repeats(&route) {
            return false;
        }
        match self.routes.iter_mut().find(|r| r.route == route) {
            Some(existing) => existing.inserted = now,
            None => self.routes.push(CachedRoute { route, inserted: now }),
        }
        true
    }

    pub fn expire(&mut self, now: SimTime, lifetime: SimTime) {
        self.routes.retain(|r| r.inserted + lifetime >= now);
    }

    pub fn purge_link(&mut self, a: NodeId, b: NodeId) {
        self.routes.retain(|r| !uses_link(&r.route, a, b));
    }

    pub fn purge_node(&mut self, node: NodeId) {
        self.routes.retain(|r| !r.route[1..].contains(&node));
    }

    /// Every cached route reaching `dest`, truncated there, in cache order.
    fn prefixes_to(&self, dest: NodeId) -> impl Iterator<Item = (usize, &[NodeId])> {
        self.routes.iter().enumerate().filter_map(move |(i, r)| {
            r.route[1..]
                .iter()
                .position(|&id| id == dest)
                .map(|p| (i, &r.route[..p + 2]))
        })
    }

    pub fn has_route(&self, dest: NodeId) -> bool {
        self.prefixes_to(dest).next().is_some()
    }

    /// One candidate per distinct first hop, cheapest first, then by id.
    pub fn candidates(&self, dest: NodeId) -> Vec<Candidate> {
        let mut best: BTreeMap<NodeId, usize> = BTreeMap::new();
        for (_, r) in self.prefixes_to(dest) {
            let hops = r.len() - 1;
            best.entry(r[1])
                .and_modify(|h| *h = (*h).min(hops))
                .or_insert(hops);
        }
        let mut out: Vec<Candidate> = best
            .into_iter()
            .map(|(hop, hops)| Candidate::new(hop, (hops - 1) as f64))
            .collect();
        out.sort_by(|a, b| a.remaining.total_cmp(&b.remaining).then(a.hop.cmp(&b.hop)));
        out
    }

    /// Shortest route to `dest` whose first hop is `first_hop`; earliest
    /// cached wins ties. Refreshes the entry it came from.
    pub fn take_via(&mut self, dest: NodeId, first_hop: NodeId, now: SimTime) -> Option<Vec<NodeId>> {
        let (index, route) = self
            .prefixes_to(dest)
            .filter(|(_, r)| r[1] == first_hop)
            .min_by_key(|(i, r)| (r.len(), *i))
            .map(|(i, r)| (i, r.to_vec()))?;
        self.routes[index].inserted = now;
        Some(route)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Discovery {
    request_id: u32,
    attempt: u32,
}

#[derive(Debug, Clone)]
pub struct DsrNode {
    me: NodeId,
    next_request_id: u32,
    cache: DsrRouteCache,
    seen: BTreeSet<(NodeId, u32)>,
    buffer: BTreeMap<NodeId, Vec<DataPacket>>,
    discovery: BTreeMap<NodeId, Discovery>,
}

impl DsrNode {
    pub fn new(me: NodeId) -> Self {
        DsrNode {
            me,
            next_request_id: 0,
            cache: DsrRouteCache::new(me),
            seen: BTreeSet::new(),
            buffer: BTreeMap::new(),
            discovery: BTreeMap::new(),
        }
    }

    pub fn cache(&self) -> &DsrRouteCache {
        &self.cache
    }

    pub fn cache_mut(&mut self) -> &mut DsrRouteCache {
        &mut self.cache
    }

    pub fn buffered(&self) -> usize {
        self.buffer.values().map(Vec::len).sum()
    }

    pub fn originate(&mut self, ctx: &mut NodeCtx, pkt: DataPacket) {
        if pkt.dest == self.me {
            ctx.push(Action::Deliver(pkt));
            return;
        }
        self.send_from_source(ctx, pkt);
    }

    fn send_from_source(&mut self, ctx: &mut NodeCtx, mut pkt: DataPacket) {
        let dest = pkt.dest;
        self.cache.expire(ctx.now, ctx.params.route_lifetime);
        loop {
            let candidates = self.cache.candidates(dest);
            if candidates.is_empty() {
                break;
            }
            let Some(hop) = ctx.admit(&candidates, dest) else {
                for c in &candidates {
                    if ctx.distrusts(c.hop) {
                        self.cache.purge_node(c.hop);
                    }
                }
                break;
            };
            if !ctx.is_neighbor(hop) {
                self.cache.purge_link(self.me, hop);
                continue;
            }
            pkt.route = self.cache.take_via(dest, hop, ctx.now).expect("candidate has a route");
            ctx.push(Action::Forward { to: hop, pkt });
            return;
        }
        self.buffer.entry(dest).or_default().push(pkt);
        if !self.discovery.contains_key(&dest) {
            self.dsr_discover(ctx, dest);
        }
    }

    /// Floods an RREQ carrying `[self]` unless the cache already reaches `dest`.
    pub fn dsr_discover(&mut self, ctx: &mut NodeCtx, dest: NodeId) {
        if self.cache.has_route(dest) {
            return;
        }
        self.send_rreq(ctx, dest, 1);
    }

    fn send_rreq(&mut self, ctx: &mut NodeCtx, dest: NodeId, attempt: u32) {
        self.next_request_id += 1;
        let request_id = self.next_request_id;
        self.seen.insert((self.me, request_id));
        self.discovery.insert(dest, Discovery { request_id, attempt });
        let mut msg = ControlMessage::new(ControlKind::Rreq, self.me, dest);
        msg.request_id = request_id;
        msg.route = vec![self.me];
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
        self.cache.expire(ctx.now, ctx.params.route_lifetime);
        if self.cache.has_route(dest) {
            self.discovery.remove(&dest);
            self.flush(ctx, dest);
        } else if attempt < ctx.params.discovery_attempts {
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

    fn flush(&mut self, ctx: &mut NodeCtx, dest: NodeId) {
        for pkt in self.buffer.remove(&dest).unwrap_or_default() {
            self.send_from_source(ctx, pkt);
        }
    }

    pub fn handle_control(&mut self, ctx: &mut NodeCtx, from: NodeId, msg: ControlMessage) {
        match msg.kind {
            ControlKind::Rreq => self.handle_rreq(ctx, from, msg),
            ControlKind::Rrep => self.handle_rrep(ctx, from, msg),
            ControlKind::Rerr => self.handle_rerr(ctx, msg),
        }
    }

    pub fn handle_rreq(&mut self, ctx: &mut NodeCtx, from: NodeId, msg: ControlMessage) {
        if msg.route.contains(&self.me) {
            return;
        }
        if msg.dest == self.me {
            let mut full = msg.route.clone();
            full.push(self.me);
            let mut reply = ControlMessage::new(ControlKind::Rrep, msg.origin, self.me);
            reply.request_id = msg.request_id;
            reply.hop_count = (full.len() - 1) as u32;
            reply.route = full;
            ctx.push(Action::Unicast { to: from, msg: reply });
            return;
        }
        if !self.seen.insert((msg.origin, msg.request_id)) {
            return;
        }
        let mut relay = msg;
        relay.route.push(self.me);
        relay.hop_count += 1;
        ctx.push(Action::Broadcast(relay));
    }

    pub fn handle_rrep(&mut self, ctx: &mut NodeCtx, from: NodeId, msg: ControlMessage) {
        let Some(i) = msg.route.iter().position(|&id| id == self.me) else {
            return;
        };
        if ctx.inesh.is_some() {
            let remaining = msg.route.len().saturating_sub(i + 2) as f64;
            if ctx.admit(&[Candidate::new(from, remaining)], msg.dest) != Some(from) {
                return;
            }
        }
        self.cache.insert(msg.route[i..].to_vec(), ctx.now);
        if i == 0 {
            self.discovery.remove(&msg.dest);
            self.flush(ctx, msg.dest);
        } else {
            ctx.push(Action::Unicast {
                to: msg.route[i - 1],
                msg,
            });
        }
    }

    pub fn handle_rerr(&mut self, ctx: &mut NodeCtx, msg: ControlMessage) {
        if let Some((a, b)) = msg.broken_link {
            self.cache.purge_link(a, b);
        }
        if msg.dest == self.me {
            return;
        }
        let Some(i) = msg.route.iter().position(|&id| id == self.me) else {
            return;
        };
        if let Some(&next) = msg.route.get(i + 1) {
            ctx.push(Action::Unicast { to: next, msg });
        }
    }

    pub fn handle_data(&mut self, ctx: &mut NodeCtx, _from: NodeId, pkt: DataPacket) {
        if pkt.dest == self.me {
            ctx.push(Action::Deliver(pkt));
            return;
        }
        self.forward_data(ctx, pkt);
    }

    /// Pops the next hop off the source route.
    pub fn forward_data(&mut self, ctx: &mut NodeCtx, pkt: DataPacket) {
        let position = pkt.route.iter().position(|&id| id == self.me);
        let Some(i) = position.filter(|&i| i + 1 < pkt.route.len()) else {
            ctx.push(Action::Drop {
                pkt,
                reason: DropReason::NoRoute,
            });
            return;
        };
        let next = pkt.route[i + 1];
        let remaining = (pkt.route.len() - i - 2) as f64;
        if ctx.admit(&[Candidate::new(next, remaining)], pkt.dest) != Some(next) {
            self.route_failed(ctx, pkt, i, next, DropReason::NoRoute);
        } else if !ctx.is_neighbor(next) {
            self.route_failed(ctx, pkt, i, next, DropReason::LinkBreak);
        } else {
            ctx.push(Action::Forward { to: next, pkt });
        }
    }

    /// Reports the unusable link back to the source, then tries one salvage.
    fn route_failed(
        &mut self,
        ctx: &mut NodeCtx,
        mut pkt: DataPacket,
        i: usize,
        next: NodeId,
        reason: DropReason,
    ) {
        self.cache.purge_link(self.me, next);
        self.send_rerr(ctx, &pkt.route[..=i], pkt.src, next);

        if !pkt.salvaged {
            self.cache.expire(ctx.now, ctx.params.route_lifetime);
            let candidates: Vec<Candidate> = self
                .cache
                .candidates(pkt.dest)
                .into_iter()
                .filter(|c| ctx.is_neighbor(c.hop) && !pkt.route[..i].contains(&c.hop))
                .collect();
            if let Some(hop) = ctx.admit(&candidates, pkt.dest) {
                if let Some(tail) = self.cache.take_via(pkt.dest, hop, ctx.now) {
                    let mut route = pkt.route[..i].to_vec();
                    route.extend(tail);
                    if !has_repeats(&route) {
                        pkt.route = route;
                        pkt.salvaged = true;
                        ctx.push(Action::Forward { to: hop, pkt });
                        return;
                    }
                }
            }
        }
        ctx.push(Action::Drop { pkt, reason });
    }

    /// `traversed` runs from the source to this node.
    fn send_rerr(&self, ctx: &mut NodeCtx, traversed: &[NodeId], src: NodeId, next: NodeId) {
        if traversed.len() < 2 {
            return;
        }
        let mut back: Vec<NodeId> = traversed.to_vec();
        back.reverse();
        let mut rerr = ControlMessage::new(ControlKind::Rerr, self.me, src);
        rerr.broken_link = Some((self.me, next));
        let to = back[1];
        rerr.route = back;
        ctx.push(Action::Unicast { to, msg: rerr });
    }

    /// Forgets routes through a neighbor the trust filter now rejects and, if
    /// the dropped packet came from elsewhere, tells its source.
    pub fn on_trust_drop(&mut self, ctx: &mut NodeCtx, subject: NodeId, pkt: &DataPacket) {
        if !ctx.distrusts(subject) {
            return;
        }
        self.cache.purge_node(subject);
        if let Some(i) = pkt.route.iter().position(|&id| id == self.me) {
            self.send_rerr(ctx, &pkt.route[..=i], pkt.src, subject);
        }
    }

    pub fn dump(&self, now: SimTime) -> String {
        let mut out = String::new();
        for r in &self.cache.routes {
            let route: Vec<String> = r.route.iter().map(|id| id.to_string()).collect();
            out.push_str(&format!(
                "t={:.6} node={} route={} inserted={:.6}\n",
                now,
                self.me,
                route.join(","),
                r.inserted
            ));
        }
        out
    }
}
