//! Workload generators: synthetic inter-core circuits and coupling-level versions
//! of QFT, the Cuccaro ripple-carry adder, multi-control multi-target (V-chain)
//! and Quantum Volume.
//!
//! All generators are pure functions of their arguments. Seeded generators use
//! `ChaCha8Rng::seed_from_u64(seed)`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, CircuitBuilder, QubitId};
use crate::error::{Error, Result};
use crate::placement::{initial_mapping, PlacementMap};
use crate::strategy::{plan, Strategy};
use crate::topology::MeshTopology;

/// Connectivity radius of generated requests: hop distance between operand cores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrMode {
    Fixed(usize),
    /// Uniform in `1..=max`.
    Random(usize),
}

impl CrMode {
    pub fn max_radius(self) -> usize {
        match self {
            CrMode::Fixed(r) | CrMode::Random(r) => r,
        }
    }
}

impl fmt::Display for CrMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrMode::Fixed(r) => write!(f, "fixed:{r}"),
            CrMode::Random(r) => write!(f, "random:{r}"),
        }
    }
}

impl FromStr for CrMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "bad C_r `{s}` (expected fixed:<r> or random:<max>)"
            ))
        };
        let (kind, value) = s.trim().split_once(':').ok_or_else(bad)?;
        let r: usize = value.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "fixed" => Ok(CrMode::Fixed(r)),
            "random" => Ok(CrMode::Random(r)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthSpec {
    pub target_depth: usize,
    pub requests_per_layer: usize,
    pub cr_mode: CrMode,
    pub seed: u64,
}

const LAYER_TRIES: usize = 64;
const RADIUS_DRAWS: usize = 16;
const MAX_BACKTRACKS: usize = 64;

/// Random circuit of two-qubit inter-core gates with exactly `target_depth` layers,
/// with every request at its radius when resolved hop-by-hop.
pub fn gen_synthetic(
    spec: &SynthSpec,
    topology: &MeshTopology,
    qubits_per_core: usize,
) -> Result<Circuit> {
    gen_synthetic_for(spec, topology, qubits_per_core, Strategy::HopByHop)
}

/// Random circuit of two-qubit inter-core gates with exactly `target_depth` layers,
/// built for execution under `strategy`.
///
/// Every mesh slot holds a qubit (`core_count * qubits_per_core` qubits). Qubits
/// migrate as gates execute (no return teleport), and the generator follows the
/// placement `strategy` produces: hop-by-hop moves the first operand onto the
/// second operand's core, two-way teleportation moves both onto the meeting core.
/// Each gate is picked so its operands are exactly `r` hops apart at that point.
/// The first gate of each layer reuses an operand of the first gate of the previous
/// layer, which pins the depth. A layer that cannot be completed sends the
/// generator back to redraw the layer before it.
pub fn gen_synthetic_for(
    spec: &SynthSpec,
    topology: &MeshTopology,
    qubits_per_core: usize,
    strategy: Strategy,
) -> Result<Circuit> {
    let n = topology.core_count() * qubits_per_core;
    if spec.target_depth == 0 || spec.requests_per_layer == 0 {
        return Err(Error::Generation(
            "depth and requests per layer must be positive".into(),
        ));
    }
    let max_r = spec.cr_mode.max_radius();
    if max_r == 0 || max_r > topology.diameter() {
        return Err(Error::Generation(format!(
            "C_r {} outside 1..={} for a {}x{} mesh",
            spec.cr_mode,
            topology.diameter(),
            topology.width(),
            topology.height()
        )));
    }
    if 2 * spec.requests_per_layer > n {
        return Err(Error::Generation(format!(
            "{} disjoint requests per layer need {} qubits, mesh holds {n}",
            spec.requests_per_layer,
            2 * spec.requests_per_layer
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut placement = initial_mapping(n, topology, qubits_per_core)?;
    // Accepted layers with the placement each one started from.
    let mut layers: Vec<(Vec<(QubitId, QubitId)>, PlacementMap)> = Vec::new();
    let mut backtracks = 0;

    while layers.len() < spec.target_depth {
        let anchor = layers.last().map(|(g, _)| [g[0].0, g[0].1]);
        let layer = layers.len() as u64;
        let found = (0..LAYER_TRIES).find_map(|_| {
            let mut radii = radius_stream(spec.seed, layer);
            try_layer(
                spec, topology, &placement, anchor, strategy, &mut rng, &mut radii,
            )
        });
        match found {
            Some(gates) => {
                let before = placement.clone();
                for &(src, dst) in &gates {
                    let p = plan(
                        strategy,
                        topology,
                        placement.core_of(src),
                        placement.core_of(dst),
                    )?;
                    placement.relocate(src, p.exec_core)?;
                    placement.relocate(dst, p.exec_core)?;
                }
                layers.push((gates, before));
            }
            None if backtracks < MAX_BACKTRACKS && !layers.is_empty() => {
                backtracks += 1;
                let (_, before) = layers.pop().expect("non-empty");
                placement = before;
            }
            None => {
                return Err(Error::Generation(format!(
                    "could not place {} requests with C_r {} in layer {}",
                    spec.requests_per_layer,
                    spec.cr_mode,
                    layers.len() + 1
                )))
            }
        }
    }

    let mut builder = CircuitBuilder::new(n);
    for (src, dst) in layers.iter().flat_map(|(g, _)| g) {
        builder.two(src.0, dst.0);
    }
    builder.build()
}

/// Radii for one layer. Keyed by layer index alone, so both strategies and every
/// retry of a layer draw the same sequence.
fn radius_stream(seed: u64, layer: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(layer + 1);
    rng
}

fn try_layer(
    spec: &SynthSpec,
    topology: &MeshTopology,
    placement: &PlacementMap,
    anchor: Option<[QubitId; 2]>,
    strategy: Strategy,
    rng: &mut ChaCha8Rng,
    radii: &mut ChaCha8Rng,
) -> Option<Vec<(QubitId, QubitId)>> {
    let n = placement.num_qubits();
    let mut used = vec![false; n];
    let mut gates = Vec::with_capacity(spec.requests_per_layer);

    for slot in 0..spec.requests_per_layer {
        let required = if slot == 0 { anchor } else { None };
        let mut chosen = None;
        for _ in 0..RADIUS_DRAWS {
            let r = match spec.cr_mode {
                CrMode::Fixed(r) => r,
                CrMode::Random(max) => radii.random_range(1..=max),
            };
            let candidates = pairs_at(topology, placement, &used, required, r);
            if !candidates.is_empty() {
                chosen = Some(candidates[rng.random_range(0..candidates.len())]);
                break;
            }
            if matches!(spec.cr_mode, CrMode::Fixed(_)) {
                break;
            }
        }
        let (a, b) = chosen?;
        // Orient the gate so it executes on the emptier core.
        let landing = |s: QubitId, d: QubitId| {
            let core = plan(
                strategy,
                topology,
                placement.core_of(s),
                placement.core_of(d),
            )
            .expect("placement holds valid cores")
            .exec_core;
            placement.load(core)
        };
        let a_is_src = match landing(a, b).cmp(&landing(b, a)) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => rng.random_bool(0.5),
        };
        used[a.0] = true;
        used[b.0] = true;
        gates.push(if a_is_src { (a, b) } else { (b, a) });
    }
    Some(gates)
}

fn pairs_at(
    topology: &MeshTopology,
    placement: &PlacementMap,
    used: &[bool],
    required: Option<[QubitId; 2]>,
    r: usize,
) -> Vec<(QubitId, QubitId)> {
    let w = topology.width();
    let xy = |q: usize| {
        let c = placement.core_of(QubitId(q)).0;
        (c % w, c / w)
    };
    let dist = |a: (usize, usize), b: (usize, usize)| a.0.abs_diff(b.0) + a.1.abs_diff(b.1);
    let free: Vec<(usize, (usize, usize))> = (0..used.len())
        .filter(|&q| !used[q])
        .map(|q| (q, xy(q)))
        .collect();
    let mut out = Vec::new();
    match required {
        Some(req) => {
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            for anchor in req.iter().map(|q| q.0).filter(|&q| !used[q]) {
                let at = xy(anchor);
                for &(b, bxy) in &free {
                    if b != anchor && dist(at, bxy) == r {
                        pairs.push((anchor.min(b), anchor.max(b)));
                    }
                }
            }
            pairs.sort_unstable();
            pairs.dedup();
            out.extend(pairs.into_iter().map(|(a, b)| (QubitId(a), QubitId(b))));
        }
        None => {
            for (i, &(a, axy)) in free.iter().enumerate() {
                for &(b, bxy) in &free[i + 1..] {
                    if dist(axy, bxy) == r {
                        out.push((QubitId(a), QubitId(b)));
                    }
                }
            }
        }
    }
    out
}

/// Coupling-level QFT: on each qubit `i`, a one-qubit gate then controlled
/// rotations `(j, i)` for every `j > i`.
pub fn gen_qft(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Generation("QFT needs at least one qubit".into()));
    }
    let mut b = CircuitBuilder::new(n);
    for i in 0..n {
        b.one(i);
        for j in i + 1..n {
            b.two(j, i);
        }
    }
    b.build()
}

/// Coupling-level Cuccaro ripple-carry adder on `2 * n_bits + 2` qubits.
///
/// Layout is `c0, b0, a0, b1, a1, ..., b(n-1), a(n-1), z`. Each pair is written
/// target first, so under hop-by-hop the target travels to its control. MAJ(c, b, a)
/// is CNOT(a, b), CNOT(a, c), Toffoli(c, b; a) and emits `(b, a), (c, a), (a, c)`;
/// UMA(c, b, a) is Toffoli(c, b; a), CNOT(a, c), CNOT(c, b) and emits
/// `(a, c), (c, a), (b, c)`. Each Toffoli keeps its `c` control. The carry-out
/// CNOT(a(n-1), z) emits `(z, a(n-1))`.
pub fn gen_cuccaro(n_bits: usize) -> Result<Circuit> {
    if n_bits == 0 {
        return Err(Error::Generation("adder needs at least one bit".into()));
    }
    let n = 2 * n_bits + 2;
    let b_of = |i: usize| 2 * i + 1;
    let a_of = |i: usize| 2 * i + 2;
    // Carry into bit i: c0 for i = 0, otherwise a(i-1) which holds the running carry.
    let c_of = |i: usize| if i == 0 { 0 } else { a_of(i - 1) };

    let mut circ = CircuitBuilder::new(n);
    for i in 0..n_bits {
        let (c, b, a) = (c_of(i), b_of(i), a_of(i));
        circ.two(b, a).two(c, a).two(a, c);
    }
    circ.two(n - 1, a_of(n_bits - 1));
    for i in (0..n_bits).rev() {
        let (c, b, a) = (c_of(i), b_of(i), a_of(i));
        circ.two(a, c).two(c, a).two(b, c);
    }
    circ.build()
}

/// Qubit count of [`gen_mcmt`]: controls, `n_controls - 1` ancillas, then targets.
pub fn mcmt_qubits(n_controls: usize, n_targets: usize) -> usize {
    n_controls + n_controls.saturating_sub(1) + n_targets
}

/// Coupling-level multi-control multi-target gate with a V-chain of ancillas.
///
/// Each accumulation block `(x, y -> t)` emits `(x, t), (y, t), (x, y)`; the
/// accumulator then drives every target; uncomputation replays the accumulation
/// pairs in reverse.
pub fn gen_mcmt(n_controls: usize, n_targets: usize) -> Result<Circuit> {
    if n_controls == 0 || n_targets == 0 {
        return Err(Error::Generation(
            "MCMT needs at least one control and one target".into(),
        ));
    }
    let ancilla = |i: usize| n_controls + i;
    let first_target = n_controls + n_controls.saturating_sub(1);

    let mut accumulate: Vec<(usize, usize)> = Vec::new();
    if n_controls >= 2 {
        let mut block = |x: usize, y: usize, t: usize| {
            accumulate.extend([(x, t), (y, t), (x, y)]);
        };
        block(0, 1, ancilla(0));
        for c in 2..n_controls {
            block(c, ancilla(c - 2), ancilla(c - 1));
        }
    }
    let acc = if n_controls == 1 {
        0
    } else {
        ancilla(n_controls - 2)
    };

    let mut b = CircuitBuilder::new(mcmt_qubits(n_controls, n_targets));
    for &(x, y) in &accumulate {
        b.two(x, y);
    }
    for t in 0..n_targets {
        b.two(acc, first_target + t);
    }
    for &(x, y) in accumulate.iter().rev() {
        b.two(x, y);
    }
    b.build()
}

/// Quantum Volume coupling pattern: each layer pairs a uniformly shuffled qubit order.
pub fn gen_quantum_volume(n: usize, n_layers: usize, seed: u64) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::Generation(
            "Quantum Volume needs at least two qubits".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut b = CircuitBuilder::new(n);
    for _ in 0..n_layers {
        order.sort_unstable();
        order.shuffle(&mut rng);
        for pair in order.chunks_exact(2) {
            b.two(pair[0], pair[1]);
        }
    }
    b.build()
}
