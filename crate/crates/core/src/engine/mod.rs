//! Discrete-event execution of a circuit on the mesh.
//!
//! Layers run under barrier semantics: layer `k + 1` is issued when every gate of
//! layer `k`, including its communication, has finished. Inside a layer each
//! inter-core gate becomes a request whose hop chains (one for hop-by-hop, up to
//! two concurrent ones for two-way) are driven by a time-ordered event queue.
//! A hop holds its BSM link and one communication qubit on each endpoint core
//! for its whole duration; waiting hops are granted in FIFO order of
//! `(ready time, gate id, chain, hop)`.

mod audit;
mod report;
mod resources;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub use audit::{audit, AuditReport};
pub use report::{reduction, ChainSide, Comparison, HopRecord, RequestRecord, SimReport};
pub use resources::ResourceState;

use resources::HopNeed;

use crate::circuit::{Circuit, Gate, GateKind, QubitId};
use crate::error::{Error, Result};
use crate::placement::initial_mapping;
use crate::protocol::{draw_attempts, request_stream, TimingConfig};
use crate::strategy::{plan, Strategy};
use crate::time::Time;
use crate::topology::{CoreId, MeshTopology};

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    pub topology: MeshTopology,
    /// Computation qubits per core.
    pub n_per_core: usize,
    /// Communication qubits per core.
    pub m_per_core: usize,
    pub timing: TimingConfig<T>,
    pub strategy: Strategy,
    pub seed: u64,
    /// Let entanglement generation for the next hop overlap the tail of the
    /// current one, so the pair is ready when the data qubit arrives.
    pub pipelining: bool,
}

impl<T: Time> Default for SimConfig<T> {
    fn default() -> Self {
        Self {
            topology: MeshTopology::default(),
            n_per_core: 2,
            m_per_core: 2,
            timing: TimingConfig::default(),
            strategy: Strategy::TwoWay,
            seed: 0,
            pipelining: false,
        }
    }
}

impl<T: Time> SimConfig<T> {
    pub fn with_strategy(&self, strategy: Strategy) -> Self {
        Self {
            strategy,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_per_core == 0 {
            return Err(Error::Config("n_per_core must be at least 1".into()));
        }
        if self.m_per_core == 0 {
            return Err(Error::Config(
                "m_per_core must be at least 1 for teleportation".into(),
            ));
        }
        self.timing.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EventKind {
    HopReady,
    HopFinish,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct HopRef {
    req: usize,
    side: ChainSide,
    hop: usize,
}

#[derive(Debug)]
struct Scheduled<T> {
    time: T,
    seq: u64,
    kind: EventKind,
    hop: HopRef,
}

impl<T: Time> PartialEq for Scheduled<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Time> Eq for Scheduled<T> {}

impl<T: Time> PartialOrd for Scheduled<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Time> Ord for Scheduled<T> {
    // Reversed: BinaryHeap is a max-heap and we want the earliest event first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Debug)]
struct Chain {
    qubit: QubitId,
    /// Starting core followed by every hop.
    path: Vec<CoreId>,
    attempts: Vec<u32>,
    needs: Vec<HopNeed>,
}

impl Chain {
    fn hops(&self) -> usize {
        self.path.len() - 1
    }
}

#[derive(Debug)]
struct Request<T> {
    gate: Gate,
    issue: T,
    src: CoreId,
    dst: CoreId,
    exec_core: CoreId,
    radius: usize,
    rounds: usize,
    source: Chain,
    destination: Chain,
    remaining: usize,
}

impl<T> Request<T> {
    fn chain(&self, side: ChainSide) -> &Chain {
        match side {
            ChainSide::Source => &self.source,
            ChainSide::Destination => &self.destination,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pending<T> {
    ready: T,
    gate_id: usize,
    hop: HopRef,
}

/// Expanded-circuit entry; sorted by (layer, time, teleports first, gate, chain, hop).
#[derive(Debug, Clone, Copy)]
struct Emitted<T> {
    layer: usize,
    time: T,
    rank: u8,
    gate_id: usize,
    side: ChainSide,
    hop: usize,
    kind: GateKind,
    operands: [QubitId; 2],
}

struct Run<'a, T> {
    cfg: &'a SimConfig<T>,
    queue: BinaryHeap<Scheduled<T>>,
    seq: u64,
    resources: ResourceState<T>,
    placement: crate::placement::PlacementMap,
    pending: Vec<Pending<T>>,
    requests: Vec<Request<T>>,
    hops: Vec<HopRecord<T>>,
    records: Vec<RequestRecord<T>>,
    emitted: Vec<Emitted<T>>,
    congestion_events: usize,
    max_core_occupancy: usize,
    layer: usize,
    layer_end: T,
    layer_worst: T,
}

/// Simulates `circuit` under `cfg`.
pub fn run<T: Time>(circuit: &Circuit, cfg: &SimConfig<T>) -> Result<SimReport<T>> {
    cfg.validate()?;
    let placement = initial_mapping(circuit.num_qubits(), &cfg.topology, cfg.n_per_core)?;
    let mut sim = Run {
        cfg,
        queue: BinaryHeap::new(),
        seq: 0,
        resources: ResourceState::new(cfg.topology, cfg.m_per_core),
        max_core_occupancy: placement.max_load(),
        placement,
        pending: Vec::new(),
        requests: Vec::new(),
        hops: Vec::new(),
        records: Vec::new(),
        emitted: Vec::with_capacity(circuit.len()),
        congestion_events: 0,
        layer: 0,
        layer_end: T::zero(),
        layer_worst: T::zero(),
    };

    let mut now = T::zero();
    let mut comm_delay_sum = T::zero();
    let mut comm_delay_critical = T::zero();

    for (layer_idx, layer) in circuit.layerize().iter().enumerate() {
        sim.layer = layer_idx;
        sim.layer_end = now;
        sim.layer_worst = T::zero();
        let first_record = sim.records.len();

        for &gate_id in &layer.gates {
            let gate = *circuit.gate(gate_id).expect("layer lists known gate ids");
            sim.issue(gate, now)?;
        }
        sim.drain(now);

        for r in &sim.records[first_record..] {
            comm_delay_sum = comm_delay_sum + r.latency;
        }
        comm_delay_critical = comm_delay_critical + sim.layer_worst;
        debug_assert_eq!(sim.placement.total_occupancy(), circuit.num_qubits());
        now = sim.layer_end;
        sim.requests.clear();
    }

    let expanded = sim.expanded_circuit(circuit.num_qubits())?;
    Ok(SimReport {
        strategy: cfg.strategy,
        total_delay: now,
        comm_delay_sum,
        comm_delay_critical,
        original_depth: circuit.depth(),
        expanded_depth: expanded.depth(),
        inter_core_requests: sim.records.len(),
        congestion_events: sim.congestion_events,
        max_core_occupancy: sim.max_core_occupancy,
        requests: sim.records,
        hops: sim.hops,
        expanded,
    })
}

/// Runs both strategies on `circuit` with identical seeds.
pub fn compare<T: Time>(circuit: &Circuit, base: &SimConfig<T>) -> Result<Comparison<T>> {
    compare_circuits(circuit, circuit, base)
}

/// Runs hop-by-hop on `hh_circuit` and two-way on `twt_circuit` with identical
/// seeds, for workloads generated separately for each strategy.
pub fn compare_circuits<T: Time>(
    hh_circuit: &Circuit,
    twt_circuit: &Circuit,
    base: &SimConfig<T>,
) -> Result<Comparison<T>> {
    let hh = run(hh_circuit, &base.with_strategy(Strategy::HopByHop))?;
    let twt = run(twt_circuit, &base.with_strategy(Strategy::TwoWay))?;
    Ok(Comparison {
        delay_reduction: reduction(
            hh.comm_delay_critical.as_f64(),
            twt.comm_delay_critical.as_f64(),
        ),
        delay_sum_reduction: reduction(hh.comm_delay_sum.as_f64(), twt.comm_delay_sum.as_f64()),
        depth_reduction: reduction(hh.expanded_depth as f64, twt.expanded_depth as f64),
        hh,
        twt,
    })
}

impl<T: Time> Run<'_, T> {
    fn schedule(&mut self, time: T, kind: EventKind, hop: HopRef) {
        self.seq += 1;
        self.queue.push(Scheduled {
            time,
            seq: self.seq,
            kind,
            hop,
        });
    }

    fn emit_gate(&mut self, gate: &Gate, time: T) {
        let ops = gate.operands();
        self.emitted.push(Emitted {
            layer: self.layer,
            time,
            rank: 1,
            gate_id: gate.id,
            side: ChainSide::Source,
            hop: 0,
            kind: gate.kind,
            operands: [ops[0], *ops.last().unwrap()],
        });
        self.layer_end = self.layer_end.max_of(time);
    }

    fn issue(&mut self, gate: Gate, now: T) -> Result<()> {
        let t_gate = self.cfg.timing.t_gate;
        if gate.kind != GateKind::TwoQubit {
            self.emit_gate(&gate, now + t_gate);
            return Ok(());
        }
        let (qa, qb) = (gate.operands()[0], gate.operands()[1]);
        let (src, dst) = (self.placement.core_of(qa), self.placement.core_of(qb));
        if src == dst {
            self.emit_gate(&gate, now + t_gate);
            return Ok(());
        }

        let topo = &self.cfg.topology;
        let plan = plan(self.cfg.strategy, topo, src, dst)?;
        let mut rng = request_stream(self.cfg.seed, gate.id as u64);
        let mut chain = |qubit: QubitId, start: CoreId, hops: &[CoreId]| -> Result<Chain> {
            let mut path = Vec::with_capacity(hops.len() + 1);
            path.push(start);
            path.extend_from_slice(hops);
            let mut attempts = Vec::with_capacity(hops.len());
            let mut needs = Vec::with_capacity(hops.len());
            for w in path.windows(2) {
                let link = topo.bsm_link_between(w[0], w[1])?;
                let a = draw_attempts(&self.cfg.timing, &mut rng).map_err(|cap| {
                    Error::AttemptsExhausted {
                        link: link.to_string(),
                        cap,
                        gate: Some(gate.id),
                    }
                })?;
                attempts.push(a);
                needs.push(HopNeed {
                    link,
                    from: w[0],
                    to: w[1],
                });
            }
            Ok(Chain {
                qubit,
                path,
                attempts,
                needs,
            })
        };
        let source = chain(qa, src, &plan.src_hops)?;
        let destination = chain(qb, dst, &plan.dst_hops)?;

        let req = self.requests.len();
        let remaining = usize::from(source.hops() > 0) + usize::from(destination.hops() > 0);
        for (side, c) in [
            (ChainSide::Source, &source),
            (ChainSide::Destination, &destination),
        ] {
            if c.hops() > 0 {
                self.pending.push(Pending {
                    ready: now,
                    gate_id: gate.id,
                    hop: HopRef { req, side, hop: 0 },
                });
            }
        }
        self.requests.push(Request {
            gate,
            issue: now,
            src,
            dst,
            exec_core: plan.exec_core,
            radius: topo.hop_distance(src, dst)?,
            rounds: plan.rounds,
            source,
            destination,
            remaining,
        });
        Ok(())
    }

    /// Processes events until the layer's queue is empty.
    fn drain(&mut self, mut now: T) {
        loop {
            self.grant(now);
            let Some(next) = self.queue.peek().map(|e| e.time) else {
                break;
            };
            now = next;
            while self
                .queue
                .peek()
                .is_some_and(|e| e.time.total_cmp(&now) == Ordering::Equal)
            {
                let ev = self.queue.pop().expect("peeked");
                match ev.kind {
                    EventKind::HopReady => self.pending.push(Pending {
                        ready: now,
                        gate_id: self.requests[ev.hop.req].gate.id,
                        hop: ev.hop,
                    }),
                    EventKind::HopFinish => self.finish_hop(ev.hop, now),
                }
            }
        }
        debug_assert!(self.pending.is_empty());
    }

    fn grant(&mut self, now: T) {
        if self.pending.is_empty() {
            return;
        }
        self.pending.sort_by(|a, b| {
            a.ready
                .total_cmp(&b.ready)
                .then(a.gate_id.cmp(&b.gate_id))
                .then(a.hop.side.cmp(&b.hop.side))
                .then(a.hop.hop.cmp(&b.hop.hop))
        });
        let needs: Vec<HopNeed> = self
            .pending
            .iter()
            .map(|p| self.requests[p.hop.req].chain(p.hop.side).needs[p.hop.hop])
            .collect();
        let granted = self.resources.select(&needs);
        let pending = std::mem::take(&mut self.pending);
        for ((p, need), ok) in pending.into_iter().zip(needs).zip(granted) {
            if !ok {
                self.pending.push(p);
                continue;
            }
            let timing = &self.cfg.timing;
            let chain = self.requests[p.hop.req].chain(p.hop.side);
            let attempts = chain.attempts[p.hop.hop];
            let duration = timing.hop_duration(attempts);
            let finish = now + duration;
            let next_epr = chain
                .attempts
                .get(p.hop.hop + 1)
                .map(|&a| timing.epr_phase(a));
            self.hops.push(HopRecord {
                gate_id: p.gate_id,
                qubit: chain.qubit,
                side: p.hop.side,
                hop: p.hop.hop,
                from: need.from,
                to: need.to,
                link: need.link,
                attempts,
                start: now,
                finish,
            });
            self.resources.acquire(&need, finish);
            self.schedule(finish, EventKind::HopFinish, p.hop);
            if let (true, Some(epr)) = (self.cfg.pipelining, next_epr) {
                // Start the next hop early enough that its pair is ready on arrival.
                let lead = if duration > epr {
                    duration - epr
                } else {
                    T::zero()
                };
                self.schedule(
                    now + lead,
                    EventKind::HopReady,
                    HopRef {
                        hop: p.hop.hop + 1,
                        ..p.hop
                    },
                );
            }
        }
    }

    fn finish_hop(&mut self, h: HopRef, now: T) {
        let (need, qubit, last) = {
            let chain = self.requests[h.req].chain(h.side);
            (chain.needs[h.hop], chain.qubit, h.hop + 1 == chain.hops())
        };
        self.resources.release(&need);
        let congested = self
            .placement
            .relocate(qubit, need.to)
            .expect("planned hops stay on the mesh");
        if congested {
            self.congestion_events += 1;
        }
        self.max_core_occupancy = self.max_core_occupancy.max(self.placement.load(need.to));
        let gate_id = self.requests[h.req].gate.id;
        self.emitted.push(Emitted {
            layer: self.layer,
            time: now,
            rank: 0,
            gate_id,
            side: h.side,
            hop: h.hop,
            kind: GateKind::Teleport,
            operands: [qubit, qubit],
        });

        if !last {
            if !self.cfg.pipelining {
                self.pending.push(Pending {
                    ready: now,
                    gate_id,
                    hop: HopRef {
                        hop: h.hop + 1,
                        ..h
                    },
                });
            }
            return;
        }

        let req = &mut self.requests[h.req];
        req.remaining -= 1;
        if req.remaining > 0 {
            return;
        }
        let latency = now - req.issue;
        let attempts = req
            .source
            .attempts
            .iter()
            .chain(&req.destination.attempts)
            .sum();
        self.records.push(RequestRecord {
            gate_id,
            layer: self.layer,
            src: req.src,
            dst: req.dst,
            radius: req.radius,
            rounds: req.rounds,
            exec_core: req.exec_core,
            attempts,
            issue: req.issue,
            arrival: now,
            latency,
        });
        debug_assert_eq!(
            self.placement.core_of(req.gate.operands()[0]),
            req.exec_core
        );
        debug_assert_eq!(
            self.placement.core_of(req.gate.operands()[1]),
            req.exec_core
        );
        self.layer_worst = self.layer_worst.max_of(latency);
        let gate = req.gate;
        self.emit_gate(&gate, now + self.cfg.timing.t_gate);
    }

    fn expanded_circuit(&mut self, num_qubits: usize) -> Result<Circuit> {
        self.emitted.sort_by(|a, b| {
            a.layer
                .cmp(&b.layer)
                .then(a.time.total_cmp(&b.time))
                .then(a.rank.cmp(&b.rank))
                .then(a.gate_id.cmp(&b.gate_id))
                .then(a.side.cmp(&b.side))
                .then(a.hop.cmp(&b.hop))
        });
        let gates = self
            .emitted
            .iter()
            .enumerate()
            .map(|(id, e)| match e.kind {
                GateKind::OneQubit => Gate::one_qubit(id, e.operands[0]),
                GateKind::TwoQubit => Gate::two_qubit(id, e.operands[0], e.operands[1]),
                GateKind::Teleport => Gate::teleport(id, e.operands[0]),
            })
            .collect();
        Circuit::new(num_qubits, gates)
    }
}
