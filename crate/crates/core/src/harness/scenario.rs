//! The simulation driver: places nodes, wires protocols, adversaries and the
//! watchdog together and runs the event loop to the horizon.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::config::{ConfigError, Placement, Protocol, ScenarioConfig};
use super::metrics::{compute_throughput, pdr, MetricsReport};
use crate::adversary::{blackhole_on_rreq, maybe_drop, AdversaryAssignment, ReplyForm, Verdict};
use crate::inesh::{NodeId, Point, TrustOutcome, TrustTable};
use crate::kernel::{
    neighbor_lists, waypoint_advance, EventQueue, KernelError, MobileNode, SimTime, Step, TraceLog,
};
use crate::protocols::{
    Action, AodvNode, ControlKind, ControlMessage, DataPacket, DropReason, DsrNode, IneshParams, NodeCtx,
    Packet, ProtocolParams, RoutingState, Timer,
};

// One random stream per concern, so enabling one never shifts another's draws.
const STREAM_PLACEMENT: u64 = 0;
const STREAM_MOBILITY: u64 = 1;
const STREAM_ADVERSARY: u64 = 3;
const STREAM_WATCHDOG: u64 = 4;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("simulation failed: {0}")]
    Kernel(#[from] KernelError),
}

/// Extra artifacts to collect while running.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Collect the event trace.
    pub trace: bool,
    /// Simulated times at which every node's routing state is dumped.
    pub dump_times: Vec<SimTime>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: MetricsReport,
    /// One line per delivered packet, in delivery order.
    pub delivery_trace: String,
    /// Empty unless [`RunOptions::trace`] was set.
    pub trace_log: String,
    pub drops_log: String,
    pub route_dumps: String,
    pub malicious: Vec<NodeId>,
    pub trust: TrustTable,
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput, ScenarioError> {
    run_scenario_with(cfg, &RunOptions::default())
}

pub fn run_scenario_with(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutput, ScenarioError> {
    cfg.validate()?;
    let mut net = Network::new(cfg, opts)?;
    net.run()?;
    Ok(net.finish())
}

/// Where nodes `1..=n` start, in id order.
pub fn initial_positions(cfg: &ScenarioConfig) -> Vec<Point> {
    match &cfg.placement {
        Placement::Uniform => {
            let mut rng = stream(cfg.seed, STREAM_PLACEMENT);
            let terrain = cfg.terrain();
            (0..cfg.node_count).map(|_| terrain.sample(&mut rng)).collect()
        }
        Placement::Fixed(points) => points.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    InFlight,
    Delivered,
    Dropped,
}

#[derive(Debug)]
enum Ev {
    Tick(u64),
    Generate { flow: usize, k: u64 },
    Arrive { from: NodeId, to: NodeId, packet: Packet },
    Timer { node: NodeId, timer: Timer },
    WatchTimeout(u64),
    Dump,
}

/// An observer waiting to overhear `subject` pass `pkt` on.
#[derive(Debug)]
struct Watch {
    observer: NodeId,
    subject: NodeId,
    pkt: DataPacket,
}

struct Network<'c> {
    cfg: &'c ScenarioConfig,
    queue: EventQueue<Ev>,
    nodes: Vec<MobileNode>,
    mobile: bool,
    neighbors: Vec<Vec<NodeId>>,
    routing: Vec<RoutingState>,
    trust: TrustTable,
    inesh: Option<IneshParams>,
    params: ProtocolParams,
    adversary: AdversaryAssignment,
    reply_form: ReplyForm,
    answered: BTreeSet<(NodeId, NodeId, u32)>,
    rng_mobility: ChaCha8Rng,
    rng_adversary: ChaCha8Rng,
    rng_watchdog: ChaCha8Rng,
    flows: Vec<(NodeId, NodeId)>,

    status: Vec<Status>,
    delivered: u64,
    dropped: u64,
    drops_by_reason: [u64; 4],
    control_tx: u64,
    data_tx: u64,
    delay_sum: f64,
    deliveries: Vec<(SimTime, u64)>,

    watches: BTreeMap<u64, Watch>,
    watch_index: BTreeMap<(NodeId, u64), Vec<u64>>,
    next_watch: u64,

    trace: TraceLog,
    delivery_trace: String,
    drops_log: String,
    route_dumps: String,
}

impl<'c> Network<'c> {
    fn new(cfg: &'c ScenarioConfig, opts: &RunOptions) -> Result<Self, ScenarioError> {
        let n = cfg.node_count;
        let mobility = cfg.mobility();
        let mut rng_mobility = stream(cfg.seed, STREAM_MOBILITY);
        let mut rng_adversary = stream(cfg.seed, STREAM_ADVERSARY);

        let nodes: Vec<MobileNode> = initial_positions(cfg)
            .into_iter()
            .enumerate()
            .map(|(i, p)| MobileNode::spawn(NodeId::from_index(i), p, &mobility, &mut rng_mobility))
            .collect();
        let mobile = cfg.max_speed_mps > 0.0;
        let neighbors = neighbor_lists(&nodes, &cfg.radio());

        let flows = cfg.flow_list();
        let profile = cfg.malicious_profile();
        let adversary = match &cfg.malicious_nodes {
            Some(ids) => AdversaryAssignment::explicit(ids.iter().copied(), profile),
            None => {
                let protected: BTreeSet<NodeId> = flows.iter().flat_map(|&(s, d)| [s, d]).collect();
                AdversaryAssignment::draw(n, cfg.malicious_fraction, &protected, profile, &mut rng_adversary)
            }
        };

        let routing = (0..n)
            .map(|i| {
                let id = NodeId::from_index(i);
                match cfg.protocol {
                    Protocol::Aodv => RoutingState::Aodv(AodvNode::new(id)),
                    Protocol::Dsr => RoutingState::Dsr(DsrNode::new(id)),
                }
            })
            .collect();
        let reply_form = match cfg.protocol {
            Protocol::Aodv => ReplyForm::Aodv,
            Protocol::Dsr => ReplyForm::Dsr,
        };

        let mut queue = EventQueue::with_horizon(cfg.duration_s);
        for flow in 0..flows.len() {
            queue.schedule(0.0, Ev::Generate { flow, k: 0 })?;
        }
        if mobile {
            queue.schedule(cfg.tuning.mobility_tick_s, Ev::Tick(1))?;
        }
        let mut dump_times = opts.dump_times.clone();
        dump_times.sort_by(f64::total_cmp);
        for t in dump_times {
            queue.schedule(t, Ev::Dump)?;
        }

        Ok(Network {
            cfg,
            queue,
            nodes,
            mobile,
            neighbors,
            routing,
            trust: TrustTable::new(cfg.trust_params()),
            inesh: cfg.inesh_params(),
            params: cfg.tuning.protocol,
            adversary,
            reply_form,
            answered: BTreeSet::new(),
            rng_mobility,
            rng_adversary,
            rng_watchdog: stream(cfg.seed, STREAM_WATCHDOG),
            flows,
            status: Vec::new(),
            delivered: 0,
            dropped: 0,
            drops_by_reason: [0; 4],
            control_tx: 0,
            data_tx: 0,
            delay_sum: 0.0,
            deliveries: Vec::new(),
            watches: BTreeMap::new(),
            watch_index: BTreeMap::new(),
            next_watch: 0,
            trace: TraceLog::new(opts.trace),
            delivery_trace: String::new(),
            drops_log: String::new(),
            route_dumps: String::new(),
        })
    }

    fn now(&self) -> SimTime {
        self.queue.now()
    }

    fn is_neighbor(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors[a.index()].binary_search(&b).is_ok()
    }

    fn run(&mut self) -> Result<(), ScenarioError> {
        while let Step::Fired(event) = self.queue.step() {
            match event.payload {
                Ev::Tick(j) => self.tick(j)?,
                Ev::Generate { flow, k } => self.generate(flow, k)?,
                Ev::Arrive { from, to, packet } => self.arrive(from, to, packet)?,
                Ev::Timer { node, timer } => {
                    self.with_node(node, |r, ctx| r.handle_timer(ctx, timer))?;
                }
                Ev::WatchTimeout(id) => self.watch_expired(id)?,
                Ev::Dump => {
                    let now = self.now();
                    for r in &self.routing {
                        self.route_dumps.push_str(&r.dump(now));
                    }
                }
            }
        }
        Ok(())
    }

    fn tick(&mut self, j: u64) -> Result<(), ScenarioError> {
        let now = self.now();
        let dt = self.cfg.tuning.mobility_tick_s;
        let params = self.cfg.mobility();
        // Positions over [now - dt, now).
        for node in &mut self.nodes {
            *node = waypoint_advance(node, now - dt, dt, &params, &mut self.rng_mobility);
        }
        self.neighbors = neighbor_lists(&self.nodes, &self.cfg.radio());
        if self.mobile {
            self.queue.schedule((j + 1) as f64 * dt, Ev::Tick(j + 1))?;
        }
        Ok(())
    }

    fn generate(&mut self, flow: usize, k: u64) -> Result<(), ScenarioError> {
        let (src, dest) = self.flows[flow];
        let now = self.now();
        let uid = self.status.len() as u64;
        self.status.push(Status::InFlight);
        let pkt = DataPacket {
            uid,
            src,
            dest,
            seq: k as u32,
            payload_bytes: self.cfg.payload_bytes,
            sent_at: now,
            route: Vec::new(),
            salvaged: false,
        };
        self.trace
            .record(|| format!("t={now:.6} ev=gen node={src} uid={uid} dest={dest}"));
        self.with_node(src, |r, ctx| r.originate(ctx, pkt))?;
        let next = (k + 1) as f64 / self.cfg.data_rate_pps;
        self.queue.schedule(next, Ev::Generate { flow, k: k + 1 })?;
        Ok(())
    }

    fn arrive(&mut self, from: NodeId, to: NodeId, packet: Packet) -> Result<(), ScenarioError> {
        match packet {
            Packet::Control(msg) => {
                if msg.kind == ControlKind::Rreq {
                    if let Some(profile) = self.adversary.profile(to).copied() {
                        if let Some(reply) = blackhole_on_rreq(&profile, to, &msg, self.reply_form) {
                            if self.answered.insert((to, msg.origin, msg.request_id)) {
                                let now = self.now();
                                self.trace.record(|| {
                                    format!(
                                        "t={now:.6} ev=forge node={to} to={from} origin={} dest={}",
                                        msg.origin, msg.dest
                                    )
                                });
                                self.apply(to, vec![Action::Unicast { to: from, msg: reply }])?;
                            }
                            return Ok(());
                        }
                    }
                }
                self.with_node(to, |r, ctx| r.handle_control(ctx, from, msg))
            }
            Packet::Data(pkt) => {
                if pkt.dest != to {
                    if let Some(profile) = self.adversary.profile(to).copied() {
                        if let Verdict::Drop(reason) = maybe_drop(&profile, &mut self.rng_adversary) {
                            self.record_drop(to, pkt.uid, reason);
                            return Ok(());
                        }
                    }
                }
                self.with_node(to, |r, ctx| r.handle_data(ctx, from, pkt))
            }
        }
    }

    fn with_node(
        &mut self,
        node: NodeId,
        f: impl FnOnce(&mut RoutingState, &mut NodeCtx),
    ) -> Result<(), ScenarioError> {
        let actions = {
            let mut ctx = NodeCtx::new(
                self.queue.now(),
                node,
                self.cfg.node_count,
                &self.neighbors[node.index()],
                &self.trust,
                self.inesh,
                self.params,
            );
            f(&mut self.routing[node.index()], &mut ctx);
            ctx.take_actions()
        };
        self.apply(node, actions)
    }

    fn apply(&mut self, node: NodeId, actions: Vec<Action>) -> Result<(), ScenarioError> {
        let now = self.now();
        let delay = self.cfg.tuning.per_hop_delay_s;
        for action in actions {
            match action {
                Action::Broadcast(msg) => {
                    self.control_tx += 1;
                    self.trace_control(node, None, &msg);
                    for i in 0..self.neighbors[node.index()].len() {
                        let to = self.neighbors[node.index()][i];
                        let packet = Packet::Control(msg.clone());
                        self.queue.schedule(now + delay, Ev::Arrive { from: node, to, packet })?;
                    }
                }
                Action::Unicast { to, msg } => {
                    self.control_tx += 1;
                    self.trace_control(node, Some(to), &msg);
                    if self.is_neighbor(node, to) {
                        let packet = Packet::Control(msg);
                        self.queue.schedule(now + delay, Ev::Arrive { from: node, to, packet })?;
                    }
                }
                Action::Forward { to, pkt } => self.transmit_data(node, to, pkt)?,
                Action::Deliver(pkt) => self.deliver(node, pkt),
                Action::Drop { pkt, reason } => {
                    // An announced drop is not misbehavior.
                    self.watch_index.remove(&(node, pkt.uid)).into_iter().flatten().for_each(|id| {
                        self.watches.remove(&id);
                    });
                    self.record_drop(node, pkt.uid, reason);
                }
                Action::SetTimer { after, timer } => {
                    self.queue.schedule(now + after, Ev::Timer { node, timer })?;
                }
                Action::Trust { subject, outcome } => self.update_trust(node, subject, outcome),
            }
        }
        Ok(())
    }

    fn trace_control(&mut self, node: NodeId, to: Option<NodeId>, msg: &ControlMessage) {
        let now = self.now();
        self.trace.record(|| {
            let to = to.map_or_else(|| "*".to_string(), |t| t.to_string());
            format!(
                "t={now:.6} ev=tx node={node} kind={} to={to} origin={} dest={} req={} hops={}",
                msg.kind, msg.origin, msg.dest, msg.request_id, msg.hop_count
            )
        });
    }

    fn transmit_data(&mut self, node: NodeId, to: NodeId, pkt: DataPacket) -> Result<(), ScenarioError> {
        let now = self.now();
        self.data_tx += 1;
        self.trace
            .record(|| format!("t={now:.6} ev=fwd node={node} to={to} uid={}", pkt.uid));
        self.overheard(node, pkt.uid)?;
        if !self.is_neighbor(node, to) {
            self.record_drop(node, pkt.uid, DropReason::LinkBreak);
            return Ok(());
        }
        if to != pkt.dest {
            let id = self.next_watch;
            self.next_watch += 1;
            self.watch_index.entry((to, pkt.uid)).or_default().push(id);
            self.watches.insert(
                id,
                Watch {
                    observer: node,
                    subject: to,
                    pkt: pkt.clone(),
                },
            );
            self.queue
                .schedule(now + self.cfg.tuning.watchdog_timeout_s, Ev::WatchTimeout(id))?;
        }
        let packet = Packet::Data(pkt);
        self.queue.schedule(
            now + self.cfg.tuning.per_hop_delay_s,
            Ev::Arrive { from: node, to, packet },
        )?;
        Ok(())
    }

    /// `subject` just passed `uid` on; observers in range see it.
    fn overheard(&mut self, subject: NodeId, uid: u64) -> Result<(), ScenarioError> {
        let Some(ids) = self.watch_index.remove(&(subject, uid)) else {
            return Ok(());
        };
        let mut unseen = Vec::new();
        for id in ids {
            let observer = self.watches[&id].observer;
            if !self.is_neighbor(observer, subject) {
                unseen.push(id);
                continue;
            }
            let watch = self.watches.remove(&id).expect("indexed");
            let p = self.cfg.false_suspicion_prob;
            if p > 0.0 && self.rng_watchdog.gen::<f64>() < p {
                self.penalize(watch)?;
            } else {
                self.update_trust(observer, subject, TrustOutcome::Reward);
            }
        }
        if !unseen.is_empty() {
            self.watch_index.insert((subject, uid), unseen);
        }
        Ok(())
    }

    fn watch_expired(&mut self, id: u64) -> Result<(), ScenarioError> {
        let Some(watch) = self.watches.remove(&id) else {
            return Ok(());
        };
        if let Some(ids) = self.watch_index.get_mut(&(watch.subject, watch.pkt.uid)) {
            ids.retain(|&other| other != id);
            if ids.is_empty() {
                self.watch_index.remove(&(watch.subject, watch.pkt.uid));
            }
        }
        self.penalize(watch)
    }

    fn penalize(&mut self, watch: Watch) -> Result<(), ScenarioError> {
        let Watch {
            observer,
            subject,
            pkt,
        } = watch;
        self.update_trust(observer, subject, TrustOutcome::Penalize);
        if self.inesh.is_some() {
            self.with_node(observer, |r, ctx| r.on_trust_drop(ctx, subject, &pkt))?;
        }
        Ok(())
    }

    fn update_trust(&mut self, observer: NodeId, subject: NodeId, outcome: TrustOutcome) {
        let now = self.now();
        let value = self.trust.update(observer, subject, outcome, now);
        self.trace.record(|| {
            let outcome = match outcome {
                TrustOutcome::Reward => "reward",
                TrustOutcome::Penalize => "penalize",
            };
            format!("t={now:.6} ev=trust node={observer} subject={subject} outcome={outcome} value={value:.6}")
        });
    }

    fn deliver(&mut self, node: NodeId, pkt: DataPacket) {
        let now = self.now();
        let slot = &mut self.status[pkt.uid as usize];
        if *slot != Status::InFlight {
            return;
        }
        *slot = Status::Delivered;
        self.delivered += 1;
        let delay = now - pkt.sent_at;
        self.delay_sum += delay;
        self.deliveries.push((now, pkt.bits()));
        let _ = writeln!(
            self.delivery_trace,
            "t={now:.6} uid={} src={} dest={} seq={} delay={delay:.6}",
            pkt.uid, pkt.src, pkt.dest, pkt.seq
        );
        self.trace.record(|| {
            format!("t={now:.6} ev=deliver node={node} uid={} delay={delay:.6}", pkt.uid)
        });
    }

    fn record_drop(&mut self, node: NodeId, uid: u64, reason: DropReason) {
        let now = self.now();
        let slot = &mut self.status[uid as usize];
        if *slot != Status::InFlight {
            return;
        }
        *slot = Status::Dropped;
        self.dropped += 1;
        let i = DropReason::ALL.iter().position(|r| *r == reason).expect("listed");
        self.drops_by_reason[i] += 1;
        let _ = writeln!(self.drops_log, "t={now:.6} drop node={node} reason={reason}");
        self.trace
            .record(|| format!("t={now:.6} ev=drop node={node} uid={uid} reason={reason}"));
    }

    fn finish(self) -> RunOutput {
        let sent = self.status.len() as u64;
        let in_flight = self.status.iter().filter(|s| **s == Status::InFlight).count() as u64;
        let throughput_series = compute_throughput(
            &self.deliveries,
            self.cfg.tuning.throughput_window_s,
            self.cfg.duration_s,
        );
        let report = MetricsReport {
            sent,
            delivered: self.delivered,
            dropped: self.dropped,
            in_flight,
            pdr: pdr(self.delivered, sent),
            mean_end_to_end_delay: if self.delivered == 0 {
                0.0
            } else {
                self.delay_sum / self.delivered as f64
            },
            routing_overhead: self.control_tx as f64 / self.delivered.max(1) as f64,
            control_transmissions: self.control_tx,
            data_transmissions: self.data_tx,
            delivered_bits: self.deliveries.iter().map(|d| d.1).sum(),
            drops_by_reason: self.drops_by_reason,
            throughput_series,
        };
        RunOutput {
            report,
            delivery_trace: self.delivery_trace,
            trace_log: self.trace.into_string(),
            drops_log: self.drops_log,
            route_dumps: self.route_dumps,
            malicious: self.adversary.ids().collect(),
            trust: self.trust,
        }
    }
}
