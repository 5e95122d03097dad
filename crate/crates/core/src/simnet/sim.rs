//! The event loop: AODV-lite discovery and forwarding, watchdog observation,
//! energy accounting and trust updates.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::anfis::AnfisModel;
use crate::trust::{
    AuditLog, InteractionLedger, NodeId, Outcome, Staleness, TrustEngine, TrustParams, TrustState,
};

use super::config::{Role, ScenarioConfig};
use super::log::{EventLog, LogEntry};
use super::packet::{EventKind, EventQueue, Packet, PacketKind, Timer, RREP_SIZE, RREQ_SIZE};
use super::topology::{
    build_topology, hop_matrix, is_connected, mobility_tick, update_neighbors, NodeState,
    RouteEntry,
};
use super::SimError;

const STREAM_TOPOLOGY: u64 = 1;
const STREAM_MOBILITY: u64 = 2;
const STREAM_TRAFFIC: u64 = 3;
const STREAM_PROTOCOL: u64 = 4;
const STREAM_SENSOR: u64 = 5;
const STREAM_TRUST: u64 = 6;

pub fn micros(secs: f64) -> u64 {
    (secs * 1e6).round().max(0.0) as u64
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

#[derive(Debug, Clone, Copy)]
struct Seen {
    prev: NodeId,
    rebroadcast: bool,
}

#[derive(Debug, Clone, Copy)]
struct Discovery {
    id: u64,
    attempt: u32,
}

#[derive(Debug, Clone)]
struct DataWatch {
    watched: NodeId,
    watchers: Vec<NodeId>,
    stamp: u64,
}

/// Everything a finished run leaves behind.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub log: EventLog,
    pub audit: AuditLog,
    pub nodes: Vec<NodeState>,
    pub ledger: InteractionLedger,
    /// Final trust states when trust was enabled.
    pub trust: Option<Vec<TrustState>>,
}

pub struct Simulator<'m> {
    cfg: ScenarioConfig,
    model: Option<&'m AnfisModel>,
    nodes: Vec<NodeState>,
    engine: TrustEngine,
    hops: Vec<u32>,
    queue: EventQueue,
    now: u64,
    end: u64,
    warmup: u64,
    log: EventLog,
    audit: Option<AuditLog>,
    flows: Vec<(NodeId, NodeId)>,
    flow_seq: Vec<u64>,
    next_uid: u64,
    rng_mobility: ChaCha8Rng,
    rng_protocol: ChaCha8Rng,
    rng_sensor: ChaCha8Rng,
    sensor_base: Vec<f64>,
    noise: Normal<f64>,
    seen: Vec<HashMap<(NodeId, u64), Seen>>,
    next_rreq: Vec<u64>,
    pending: HashMap<(NodeId, NodeId), Discovery>,
    buffers: Vec<Vec<Packet>>,
    watches: HashMap<u64, DataWatch>,
    next_stamp: u64,
    /// Data packets alive, keyed by uid: (current holder, flow).
    live: BTreeMap<u64, (NodeId, usize)>,
    /// Periodic cadence: assessees touched since the last sweep, with the latest outcome.
    dirty: Vec<BTreeMap<NodeId, Outcome>>,
    finished: bool,
}

impl<'m> Simulator<'m> {
    /// `model` drives behavioral trust and is required when trust is enabled.
    pub fn new(cfg: &ScenarioConfig, model: Option<&'m AnfisModel>) -> Result<Self, SimError> {
        cfg.validate()?;
        if cfg.trust_enabled && model.is_none() {
            return Err(SimError::InvalidConfig(
                "trust_enabled requires a behavioral model".into(),
            ));
        }
        let n = cfg.node_count;
        let mut rng_topology = stream(cfg.seed, STREAM_TOPOLOGY);
        let mut rng_traffic = stream(cfg.seed, STREAM_TRAFFIC);
        let mut rng_trust = stream(cfg.seed, STREAM_TRUST);
        let mut rng_sensor = stream(cfg.seed, STREAM_SENSOR);
        let nodes = build_topology(cfg, &mut rng_topology)?;

        let params = TrustParams {
            intimacy_mode: cfg.intimacy_mode,
            staleness: Staleness::Linear {
                horizon: cfg.staleness_horizon,
            },
            threshold: cfg.trust_threshold,
            t_max: cfg.t_max,
            history_horizon: cfg.history_horizon,
            window_len: cfg.trust_window,
            ..TrustParams::default()
        };
        let initial: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let (lo, hi) = (cfg.init_trust_low, cfg.init_trust_high);
                (
                    lo + (hi - lo) * rng_trust.random::<f64>(),
                    lo + (hi - lo) * rng_trust.random::<f64>(),
                )
            })
            .collect();
        let engine = TrustEngine::new(params, &initial)?;
        let sensor_base = (0..n)
            .map(|_| 20.0 + 10.0 * rng_sensor.random::<f64>())
            .collect();
        let noise = Normal::new(0.0, cfg.sensor_noise)
            .map_err(|e| SimError::InvalidConfig(format!("sensor_noise: {e}")))?;

        let flows = match &cfg.flows {
            Some(f) => f.clone(),
            None => pick_flows(&nodes, cfg.max_connections, &mut rng_traffic),
        };
        let end = micros(cfg.sim_duration);
        let mut sim = Self {
            hops: if cfg.trust_enabled {
                hop_matrix(&nodes)
            } else {
                Vec::new()
            },
            nodes,
            engine,
            model,
            queue: EventQueue::default(),
            now: 0,
            end,
            warmup: micros(cfg.warmup),
            log: EventLog::new(n, end),
            audit: None,
            flow_seq: vec![0; flows.len()],
            flows,
            next_uid: 0,
            rng_mobility: stream(cfg.seed, STREAM_MOBILITY),
            rng_protocol: stream(cfg.seed, STREAM_PROTOCOL),
            rng_sensor,
            sensor_base,
            noise,
            seen: vec![HashMap::new(); n],
            next_rreq: vec![0; n],
            pending: HashMap::new(),
            buffers: vec![Vec::new(); n],
            watches: HashMap::new(),
            next_stamp: 0,
            live: BTreeMap::new(),
            dirty: vec![BTreeMap::new(); n],
            finished: false,
            cfg: cfg.clone(),
        };
        if end == 0 {
            return Ok(sim);
        }
        for node in &sim.nodes {
            sim.log.push(LogEntry::Role {
                node: node.id,
                role: node.role,
            });
        }
        for (flow, &(src, dst)) in sim.flows.iter().enumerate() {
            sim.log.push(LogEntry::Flow { flow, src, dst });
        }
        if !is_connected(&sim.nodes) {
            sim.log.push(LogEntry::Warn {
                time: 0,
                message: "initial topology is not connected".into(),
            });
        }
        let period = 1.0 / cfg.cbr_rate;
        for flow in 0..sim.flows.len() {
            let offset = micros(period * rng_traffic.random::<f64>());
            sim.queue
                .push(offset, EventKind::Timer(Timer::Generate { flow }));
        }
        sim.queue
            .push(micros(cfg.mobility_interval), EventKind::MobilityTick);
        if let (true, Some(p)) = (cfg.trust_enabled, cfg.trust_update_period) {
            sim.queue.push(micros(p), EventKind::TrustUpdate);
        }
        Ok(sim)
    }

    /// Keeps every trust evaluation's full inputs.
    pub fn record_audit(&mut self) {
        self.audit.get_or_insert_with(AuditLog::default);
    }

    pub fn now(&self) -> f64 {
        self.now as f64 / 1e6
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn ledger(&self) -> &InteractionLedger {
        self.engine.ledger()
    }

    pub fn engine(&self) -> &TrustEngine {
        &self.engine
    }

    pub fn flows(&self) -> &[(NodeId, NodeId)] {
        &self.flows
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    fn filter_active(&self) -> bool {
        self.cfg.trust_enabled && self.now >= self.warmup
    }

    /// Processes every event strictly before `until` seconds (capped at the
    /// run's end).
    pub fn run_until(&mut self, until: f64) -> Result<(), SimError> {
        let limit = micros(until).min(self.end);
        while let Some(t) = self.queue.peek_time() {
            if t >= limit {
                break;
            }
            let ev = self.queue.pop().expect("peeked");
            debug_assert!(ev.time >= self.now, "event out of order");
            self.now = ev.time;
            self.handle(ev.kind)?;
        }
        self.now = self.now.max(limit);
        Ok(())
    }

    pub fn finish(mut self) -> Result<RunOutput, SimError> {
        self.run_until(self.end as f64 / 1e6)?;
        if self.end > 0 && !self.finished {
            self.finished = true;
            let end = self.end;
            for (&uid, &(node, flow)) in &self.live {
                self.log.push(LogEntry::Inflight {
                    time: end,
                    node,
                    uid,
                    flow,
                });
            }
            if self.cfg.trust_enabled {
                for node in 0..self.nodes.len() {
                    let class = self.engine.classification(node);
                    self.log.push(LogEntry::Class {
                        time: end,
                        node,
                        class,
                    });
                }
            }
        }
        let trust = self
            .cfg
            .trust_enabled
            .then(|| self.engine.states().to_vec());
        Ok(RunOutput {
            log: self.log,
            audit: self.audit.unwrap_or_default(),
            nodes: self.nodes,
            ledger: self.engine.ledger().clone(),
            trust,
        })
    }

    fn handle(&mut self, kind: EventKind) -> Result<(), SimError> {
        match kind {
            EventKind::MobilityTick => self.mobility(),
            EventKind::TrustUpdate => self.periodic_update()?,
            EventKind::Send { node, to, packet } => match to {
                None => {
                    if let Some(s) = self.seen[node].get_mut(&(packet.src, packet.seq)) {
                        s.rebroadcast = true;
                    }
                    self.broadcast_rreq(node, packet);
                }
                Some(to) => self.unicast_control(node, to, packet),
            },
            EventKind::Receive { node, from, packet } => {
                self.nodes[node].energy.rec += self.cfg.e_rec;
                self.log.push(LogEntry::Rx {
                    time: self.now,
                    node,
                    peer: from,
                    kind: packet.kind,
                    uid: packet.uid,
                    energy: self.cfg.e_rec,
                });
                match packet.kind {
                    PacketKind::Rreq => self.on_rreq(node, from, packet),
                    PacketKind::Rrep => self.on_rrep(node, from, packet)?,
                    PacketKind::Data => self.on_data(node, packet)?,
                    PacketKind::TrustRec => {}
                }
            }
            EventKind::Timer(t) => match t {
                Timer::Generate { flow } => self.generate(flow)?,
                Timer::SendReply { node, origin, id } => self.send_reply(node, origin, id),
                Timer::DiscoveryTimeout { node, dst, id } => self.discovery_timeout(node, dst, id),
                Timer::DataWatch { uid, stamp } => {
                    if self.watches.get(&uid).is_some_and(|w| w.stamp == stamp) {
                        let w = self.watches.remove(&uid).expect("checked");
                        for watcher in w.watchers {
                            self.interaction(watcher, w.watched, Outcome::Failure, 0.0)?;
                        }
                    }
                }
                Timer::RreqWatch {
                    watcher,
                    watched,
                    origin,
                    id,
                    dst,
                } => {
                    let seen = self.seen[watched].get(&(origin, id));
                    let cooperated = match seen {
                        Some(s) => s.rebroadcast || watched == dst,
                        None => false,
                    };
                    let (outcome, duration) = if cooperated {
                        (Outcome::Success, self.airtime(RREQ_SIZE))
                    } else {
                        (Outcome::Failure, 0.0)
                    };
                    self.interaction(watcher, watched, outcome, duration)?;
                }
            },
        }
        Ok(())
    }

    fn airtime(&self, size: u32) -> f64 {
        f64::from(size) * 8.0 / self.cfg.bitrate
    }

    fn send_energy(&self, size: u32) -> f64 {
        self.cfg.e_send * f64::from(size) / f64::from(self.cfg.packet_size)
    }

    fn uid(&mut self) -> u64 {
        self.next_uid += 1;
        self.next_uid
    }

    fn mobility(&mut self) {
        if self.cfg.speed > 0.0 {
            for node in &mut self.nodes {
                mobility_tick(
                    node,
                    self.cfg.mobility_interval,
                    self.cfg.speed,
                    self.cfg.area,
                    &mut self.rng_mobility,
                );
            }
            update_neighbors(&mut self.nodes, self.cfg.tx_range);
            if self.cfg.trust_enabled {
                self.hops = hop_matrix(&self.nodes);
            }
        }
        let next = self.now + micros(self.cfg.mobility_interval);
        if next < self.end {
            self.queue.push(next, EventKind::MobilityTick);
        }
    }

    fn generate(&mut self, flow: usize) -> Result<(), SimError> {
        let (src, dst) = self.flows[flow];
        let uid = self.uid();
        let seq = self.flow_seq[flow];
        self.flow_seq[flow] += 1;
        let packet = Packet {
            uid,
            kind: PacketKind::Data,
            src,
            dst,
            flow: Some(flow),
            seq,
            trace: vec![src],
            size: self.cfg.packet_size,
            created_at: self.now,
        };
        self.log.push(LogEntry::Gen {
            time: self.now,
            node: src,
            dst,
            uid,
            flow,
        });
        self.live.insert(uid, (src, flow));
        let next = self.now + micros(1.0 / self.cfg.cbr_rate);
        if next < self.end {
            self.queue
                .push(next, EventKind::Timer(Timer::Generate { flow }));
        }
        self.route_data(src, packet)
    }

    /// Usable next hop toward `dst`, invalidating entries that broke.
    fn next_hop(&mut self, node: NodeId, dst: NodeId) -> Option<NodeId> {
        let route = self.nodes[node].route(dst, self.now)?;
        let nh = route.next_hop;
        let reachable = self.nodes[node].neighbors.contains(&nh);
        let allowed = nh == dst || !self.filter_active() || self.engine.is_trusted(nh);
        if reachable && allowed {
            Some(nh)
        } else {
            self.nodes[node].routes[dst] = None;
            None
        }
    }

    fn install_route(&mut self, node: NodeId, dst: NodeId, next_hop: NodeId, hops: u32, seq: u32) {
        let expires = self.now + micros(self.cfg.route_lifetime);
        let slot = &mut self.nodes[node].routes[dst];
        let replace = match slot {
            Some(r) => r.expires <= self.now || seq > r.seq || (seq == r.seq && hops <= r.hops),
            None => true,
        };
        if replace {
            *slot = Some(RouteEntry {
                next_hop,
                hops,
                seq,
                expires,
            });
        }
    }

    fn on_data(&mut self, node: NodeId, packet: Packet) -> Result<(), SimError> {
        let mut packet = packet;
        packet.trace.push(node);
        if node == packet.dst {
            return self.deliver(node, packet);
        }
        if self.nodes[node].role == Role::Drop
            && self.rng_protocol.random::<f64>() < self.cfg.drop_probability
        {
            // The pending watch on this node expires into a failure.
            self.drop_data(node, packet, "malicious");
            return Ok(());
        }
        self.route_data(node, packet)
    }

    fn route_data(&mut self, node: NodeId, packet: Packet) -> Result<(), SimError> {
        let dst = packet.dst;
        match self.next_hop(node, dst) {
            Some(nh) if packet.trace.contains(&nh) => {
                self.nodes[node].routes[dst] = None;
                self.drop_data(node, packet, "loop");
                Ok(())
            }
            Some(nh) => self.transmit_data(node, nh, packet),
            None => {
                if self.buffers[node].len() >= self.cfg.buffer_capacity {
                    self.drop_data(node, packet, "buffer_full");
                } else {
                    self.live
                        .insert(packet.uid, (node, packet.flow.unwrap_or(0)));
                    self.buffers[node].push(packet);
                    self.start_discovery(node, dst);
                }
                Ok(())
            }
        }
    }

    fn transmit_data(&mut self, node: NodeId, nh: NodeId, packet: Packet) -> Result<(), SimError> {
        self.resolve_watch(packet.uid, node)?;
        let energy = self.send_energy(packet.size);
        self.nodes[node].energy.send += energy;
        self.log.push(LogEntry::Tx {
            time: self.now,
            node,
            peer: Some(nh),
            kind: PacketKind::Data,
            uid: packet.uid,
            energy,
        });
        if let Some(r) = self.nodes[node].routes[packet.dst].as_mut() {
            r.expires = self.now + micros(self.cfg.route_lifetime);
        }
        let mut watchers = vec![node];
        if self.cfg.overhear {
            let near = &self.nodes[nh].neighbors;
            watchers.extend(
                self.nodes[node]
                    .neighbors
                    .iter()
                    .filter(|&&w| w != nh && near.contains(&w)),
            );
        }
        let stamp = self.next_stamp;
        self.next_stamp += 1;
        self.watches.insert(
            packet.uid,
            DataWatch {
                watched: nh,
                watchers,
                stamp,
            },
        );
        self.queue.push(
            self.now + micros(self.cfg.watchdog_timeout),
            EventKind::Timer(Timer::DataWatch {
                uid: packet.uid,
                stamp,
            }),
        );
        self.live.insert(packet.uid, (nh, packet.flow.unwrap_or(0)));
        if !self.lost() {
            self.queue.push(
                self.now + micros(self.cfg.hop_latency),
                EventKind::Receive {
                    node: nh,
                    from: node,
                    packet,
                },
            );
        } else {
            let flow = packet.flow;
            self.live.remove(&packet.uid);
            self.log.push(LogEntry::Drop {
                time: self.now,
                node,
                kind: PacketKind::Data,
                uid: packet.uid,
                flow,
                reason: "link_loss".into(),
                trace: packet.trace,
            });
        }
        Ok(())
    }

    fn lost(&mut self) -> bool {
        self.cfg.link_loss > 0.0 && self.rng_protocol.random::<f64>() < self.cfg.link_loss
    }

    /// `node` handled the packet it was watched for: every watcher records a success.
    fn resolve_watch(&mut self, uid: u64, node: NodeId) -> Result<(), SimError> {
        if self.watches.get(&uid).is_some_and(|w| w.watched == node) {
            let w = self.watches.remove(&uid).expect("checked");
            let airtime = self.airtime(self.cfg.packet_size);
            for watcher in w.watchers {
                self.interaction(watcher, node, Outcome::Success, airtime)?;
            }
        }
        Ok(())
    }

    fn deliver(&mut self, node: NodeId, packet: Packet) -> Result<(), SimError> {
        self.live.remove(&packet.uid);
        self.log.push(LogEntry::Deliver {
            time: self.now,
            node,
            uid: packet.uid,
            flow: packet.flow.unwrap_or(0),
            trace: packet.trace.clone(),
        });
        self.resolve_watch(packet.uid, node)
    }

    fn drop_data(&mut self, node: NodeId, packet: Packet, reason: &str) {
        self.live.remove(&packet.uid);
        self.log.push(LogEntry::Drop {
            time: self.now,
            node,
            kind: PacketKind::Data,
            uid: packet.uid,
            flow: packet.flow,
            reason: reason.into(),
            trace: packet.trace,
        });
    }

    fn start_discovery(&mut self, node: NodeId, dst: NodeId) {
        if self.pending.contains_key(&(node, dst)) {
            return;
        }
        self.launch_rreq(node, dst, 0);
    }

    fn launch_rreq(&mut self, node: NodeId, dst: NodeId, attempt: u32) {
        let id = self.next_rreq[node];
        self.next_rreq[node] += 1;
        self.pending.insert((node, dst), Discovery { id, attempt });
        self.seen[node].insert(
            (node, id),
            Seen {
                prev: node,
                rebroadcast: true,
            },
        );
        let packet = Packet {
            uid: self.uid(),
            kind: PacketKind::Rreq,
            src: node,
            dst,
            flow: None,
            seq: id,
            trace: vec![node],
            size: RREQ_SIZE,
            created_at: self.now,
        };
        self.broadcast_rreq(node, packet);
        self.queue.push(
            self.now + micros(self.cfg.discovery_timeout),
            EventKind::Timer(Timer::DiscoveryTimeout { node, dst, id }),
        );
    }

    fn broadcast_rreq(&mut self, node: NodeId, packet: Packet) {
        let energy = self.send_energy(packet.size);
        self.nodes[node].energy.send += energy;
        self.log.push(LogEntry::Tx {
            time: self.now,
            node,
            peer: None,
            kind: PacketKind::Rreq,
            uid: packet.uid,
            energy,
        });
        let arrive = self.now + micros(self.cfg.hop_latency);
        let watch = self.now + micros(self.cfg.rreq_watch_timeout);
        let neighbors = self.nodes[node].neighbors.clone();
        for v in neighbors {
            if v != packet.src {
                self.queue.push(
                    watch,
                    EventKind::Timer(Timer::RreqWatch {
                        watcher: node,
                        watched: v,
                        origin: packet.src,
                        id: packet.seq,
                        dst: packet.dst,
                    }),
                );
            }
            if !self.lost() {
                self.queue.push(
                    arrive,
                    EventKind::Receive {
                        node: v,
                        from: node,
                        packet: packet.clone(),
                    },
                );
            }
        }
    }

    fn on_rreq(&mut self, node: NodeId, from: NodeId, packet: Packet) {
        let (origin, id) = (packet.src, packet.seq);
        if node == origin {
            return;
        }
        if self.filter_active() && from != origin && !self.engine.is_trusted(from) {
            return;
        }
        if self.seen[node].contains_key(&(origin, id)) {
            return;
        }
        self.seen[node].insert(
            (origin, id),
            Seen {
                prev: from,
                rebroadcast: false,
            },
        );
        let hops = packet.trace.len() as u32;
        self.install_route(node, origin, from, hops, 0);
        if node == packet.dst {
            self.queue.push(
                self.now + micros(self.cfg.reply_delay),
                EventKind::Timer(Timer::SendReply { node, origin, id }),
            );
        } else if self.nodes[node].role != Role::Hide {
            let mut fwd = packet;
            fwd.trace.push(node);
            let jitter = micros(self.cfg.rreq_jitter * self.rng_protocol.random::<f64>());
            self.queue.push(
                self.now + jitter,
                EventKind::Send {
                    node,
                    to: None,
                    packet: fwd,
                },
            );
        }
    }

    fn send_reply(&mut self, node: NodeId, origin: NodeId, id: u64) {
        let Some(prev) = self.seen[node].get(&(origin, id)).map(|s| s.prev) else {
            return;
        };
        let packet = Packet {
            uid: self.uid(),
            kind: PacketKind::Rrep,
            src: node,
            dst: origin,
            flow: None,
            seq: id,
            trace: vec![node],
            size: RREP_SIZE,
            created_at: self.now,
        };
        self.unicast_control(node, prev, packet);
    }

    fn unicast_control(&mut self, node: NodeId, to: NodeId, packet: Packet) {
        if !self.nodes[node].neighbors.contains(&to) {
            self.log.push(LogEntry::Drop {
                time: self.now,
                node,
                kind: packet.kind,
                uid: packet.uid,
                flow: None,
                reason: "break".into(),
                trace: packet.trace,
            });
            return;
        }
        let energy = self.send_energy(packet.size);
        self.nodes[node].energy.send += energy;
        self.log.push(LogEntry::Tx {
            time: self.now,
            node,
            peer: Some(to),
            kind: packet.kind,
            uid: packet.uid,
            energy,
        });
        if !self.lost() {
            self.queue.push(
                self.now + micros(self.cfg.hop_latency),
                EventKind::Receive {
                    node: to,
                    from: node,
                    packet,
                },
            );
        }
    }

    fn on_rrep(&mut self, node: NodeId, from: NodeId, packet: Packet) -> Result<(), SimError> {
        let target = packet.src;
        let (origin, id) = (packet.dst, packet.seq);
        let hops = packet.trace.len() as u32;
        self.install_route(node, target, from, hops, 0);
        if node == origin {
            if self
                .pending
                .get(&(node, target))
                .is_some_and(|d| d.id == id)
            {
                self.pending.remove(&(node, target));
            }
            return self.flush(node, target);
        }
        let Some(prev) = self.seen[node].get(&(origin, id)).map(|s| s.prev) else {
            return Ok(());
        };
        let mut fwd = packet;
        fwd.trace.push(node);
        self.unicast_control(node, prev, fwd);
        Ok(())
    }

    fn flush(&mut self, node: NodeId, dst: NodeId) -> Result<(), SimError> {
        let (ready, keep): (Vec<Packet>, Vec<Packet>) = std::mem::take(&mut self.buffers[node])
            .into_iter()
            .partition(|p| p.dst == dst);
        self.buffers[node] = keep;
        for p in ready {
            self.route_data(node, p)?;
        }
        Ok(())
    }

    fn discovery_timeout(&mut self, node: NodeId, dst: NodeId, id: u64) {
        let Some(d) = self.pending.get(&(node, dst)).copied() else {
            return;
        };
        if d.id != id {
            return;
        }
        if d.attempt < self.cfg.discovery_retries {
            self.launch_rreq(node, dst, d.attempt + 1);
            return;
        }
        self.pending.remove(&(node, dst));
        self.log.push(LogEntry::NoRoute {
            time: self.now,
            node,
            dst,
        });
        let (stale, keep): (Vec<Packet>, Vec<Packet>) = std::mem::take(&mut self.buffers[node])
            .into_iter()
            .partition(|p| p.dst == dst);
        self.buffers[node] = keep;
        for p in stale {
            self.drop_data(node, p, "no_route");
        }
    }

    fn hop_lookup(hops: &[u32], n: usize, from: NodeId) -> impl Fn(NodeId) -> Option<u32> + '_ {
        move |k| {
            let h = hops[from * n + k];
            (h != u32::MAX && h > 0).then_some(h)
        }
    }

    /// A completed interaction: recorded, and evaluated when trust is on.
    /// Malicious nodes keep no trust records and spend nothing on evaluation.
    fn interaction(
        &mut self,
        assessor: NodeId,
        assessee: NodeId,
        outcome: Outcome,
        duration: f64,
    ) -> Result<(), SimError> {
        if self.nodes[assessor].role.is_malicious() {
            return Ok(());
        }
        let t = self.now as f64 / 1e6;
        let Some(model) = self.model.filter(|_| self.cfg.trust_enabled) else {
            self.engine
                .observe(assessor, assessee, outcome, duration, None, t);
            return Ok(());
        };
        let reading = self.sensor_base[assessee] + self.noise.sample(&mut self.rng_sensor);
        if self.cfg.trust_update_period.is_some() {
            self.engine
                .observe(assessor, assessee, outcome, duration, Some(reading), t);
            self.dirty[assessor].insert(assessee, outcome);
            return Ok(());
        }
        let n = self.nodes.len();
        // Before warmup ends, initial trust is noise: every assessment counts.
        self.engine.set_gated(self.filter_active());
        let rec = self.engine.interact(
            model,
            assessor,
            assessee,
            outcome,
            duration,
            reading,
            t,
            Self::hop_lookup(&self.hops, n, assessor),
        )?;
        self.charge_evaluation(rec, outcome);
        Ok(())
    }

    fn charge_evaluation(&mut self, rec: crate::trust::AuditRecord, outcome: Outcome) {
        self.nodes[rec.assessor].energy.te += self.cfg.e_te;
        self.log.push(LogEntry::Eval {
            time: self.now,
            assessor: rec.assessor,
            assessee: rec.assessee,
            outcome,
            energy: self.cfg.e_te,
            total: rec.total,
            class: rec.classification,
            applied: rec.applied,
        });
        if let Some(a) = self.audit.as_mut() {
            a.push(rec);
        }
    }

    fn periodic_update(&mut self) -> Result<(), SimError> {
        let model = self.model.expect("trust enabled implies a model");
        let t = self.now as f64 / 1e6;
        let n = self.nodes.len();
        self.engine.set_gated(self.filter_active());
        for assessor in 0..n {
            let targets = std::mem::take(&mut self.dirty[assessor]);
            for (assessee, outcome) in targets {
                if let Some(rec) = self.engine.reevaluate(
                    model,
                    assessor,
                    assessee,
                    t,
                    Self::hop_lookup(&self.hops, n, assessor),
                )? {
                    self.charge_evaluation(rec, outcome);
                }
            }
        }
        if let Some(p) = self.cfg.trust_update_period {
            let next = self.now + micros(p);
            if next < self.end {
                self.queue.push(next, EventKind::TrustUpdate);
            }
        }
        Ok(())
    }
}

fn pick_flows(nodes: &[NodeState], max: usize, rng: &mut impl Rng) -> Vec<(NodeId, NodeId)> {
    let legit: Vec<NodeId> = nodes
        .iter()
        .filter(|n| n.role == Role::Legitimate)
        .map(|n| n.id)
        .collect();
    let l = legit.len();
    if l < 2 {
        return Vec::new();
    }
    let want = max.min(l * (l - 1));
    let mut flows = Vec::with_capacity(want);
    while flows.len() < want {
        let s = legit[rng.random_range(0..l)];
        let d = legit[rng.random_range(0..l)];
        if s != d && !flows.contains(&(s, d)) {
            flows.push((s, d));
        }
    }
    flows
}

/// Runs a scenario to completion and returns its event log.
pub fn run(cfg: &ScenarioConfig, model: Option<&AnfisModel>) -> Result<EventLog, SimError> {
    Ok(Simulator::new(cfg, model)?.finish()?.log)
}

/// Like [`run`], but also returns final node, ledger and trust state.
pub fn run_full(cfg: &ScenarioConfig, model: Option<&AnfisModel>) -> Result<RunOutput, SimError> {
    Simulator::new(cfg, model)?.finish()
}
