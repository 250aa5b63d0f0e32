//! Gate-list circuits, ASAP layering and the plain-text gate-list format.
//!
//! Only arity and operands are modeled. The text format is line oriented:
//!
//! ```text
//! # comment
//! qubits 4
//! h 0
//! u 1
//! cx 0 1
//! tp 2
//! ```
//!
//! `h` and `u` both denote a one-qubit gate, `cx` a two-qubit gate and `tp` a
//! teleport marker on a moved data qubit (emitted by the engine for depth accounting).

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitId(pub usize);

impl QubitId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    OneQubit,
    TwoQubit,
    Teleport,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::TwoQubit => 2,
            GateKind::OneQubit | GateKind::Teleport => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    pub id: usize,
    pub kind: GateKind,
    operands: [QubitId; 2],
}

impl Gate {
    pub fn one_qubit(id: usize, q: QubitId) -> Self {
        Self {
            id,
            kind: GateKind::OneQubit,
            operands: [q, q],
        }
    }

    pub fn two_qubit(id: usize, a: QubitId, b: QubitId) -> Self {
        Self {
            id,
            kind: GateKind::TwoQubit,
            operands: [a, b],
        }
    }

    pub fn teleport(id: usize, q: QubitId) -> Self {
        Self {
            id,
            kind: GateKind::Teleport,
            operands: [q, q],
        }
    }

    pub fn operands(&self) -> &[QubitId] {
        &self.operands[..self.kind.arity()]
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind == GateKind::TwoQubit
    }
}

/// A set of gates on pairwise disjoint qubits, listed by gate id in program order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Layer {
    pub gates: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::Validation("circuit needs at least one qubit".into()));
        }
        let mut prev: Option<usize> = None;
        for g in &gates {
            if let Some(p) = prev {
                if g.id <= p {
                    return Err(Error::Validation(format!(
                        "gate ids must be strictly increasing ({} after {p})",
                        g.id
                    )));
                }
            }
            prev = Some(g.id);
            for q in g.operands() {
                if q.0 >= num_qubits {
                    return Err(Error::Validation(format!(
                        "gate {} uses qubit {} but circuit has {num_qubits}",
                        g.id, q.0
                    )));
                }
            }
            if g.kind == GateKind::TwoQubit && g.operands[0] == g.operands[1] {
                return Err(Error::Validation(format!(
                    "gate {} has identical operands",
                    g.id
                )));
            }
        }
        Ok(Self { num_qubits, gates })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate(&self, id: usize) -> Option<&Gate> {
        self.gates
            .binary_search_by_key(&id, |g| g.id)
            .ok()
            .map(|i| &self.gates[i])
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// ASAP layer index (0-based) of every gate, in program order.
    pub fn layer_indices(&self) -> Vec<usize> {
        let mut frontier = vec![0usize; self.num_qubits];
        self.gates
            .iter()
            .map(|g| {
                let layer = g
                    .operands()
                    .iter()
                    .map(|q| frontier[q.0])
                    .max()
                    .unwrap_or(0);
                for q in g.operands() {
                    frontier[q.0] = layer + 1;
                }
                layer
            })
            .collect()
    }

    /// Greedy as-soon-as-possible layering.
    pub fn layerize(&self) -> Vec<Layer> {
        let mut layers: Vec<Layer> = Vec::new();
        for (g, layer) in self.gates.iter().zip(self.layer_indices()) {
            if layer == layers.len() {
                layers.push(Layer::default());
            }
            layers[layer].gates.push(g.id);
        }
        layers
    }

    pub fn depth(&self) -> usize {
        self.layer_indices()
            .into_iter()
            .map(|l| l + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.num_qubits);
        for g in &self.gates {
            let _ = match g.kind {
                GateKind::OneQubit => writeln!(out, "u {}", g.operands[0]),
                GateKind::TwoQubit => writeln!(out, "cx {} {}", g.operands[0], g.operands[1]),
                GateKind::Teleport => writeln!(out, "tp {}", g.operands[0]),
            };
        }
        out
    }
}

/// Appends gates with sequential ids.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn one(&mut self, q: usize) -> &mut Self {
        let id = self.gates.len();
        self.gates.push(Gate::one_qubit(id, QubitId(q)));
        self
    }

    pub fn two(&mut self, a: usize, b: usize) -> &mut Self {
        let id = self.gates.len();
        self.gates.push(Gate::two_qubit(id, QubitId(a), QubitId(b)));
        self
    }

    pub fn teleport(&mut self, q: usize) -> &mut Self {
        let id = self.gates.len();
        self.gates.push(Gate::teleport(id, QubitId(q)));
        self
    }

    pub fn build(self) -> Result<Circuit> {
        Circuit::new(self.num_qubits, self.gates)
    }
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut num_qubits: Option<(usize, usize)> = None;
    let mut pending: Vec<(usize, GateKind, [usize; 2])> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let directive = words.next().unwrap_or_default();
        let args: Vec<usize> = words
            .map(|w| {
                w.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("expected a non-negative integer, found `{w}`"),
                })
            })
            .collect::<Result<_>>()?;
        let expect = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Parse {
                    line: line_no,
                    message: format!("`{directive}` takes {n} operand(s), found {}", args.len()),
                })
            }
        };
        match directive {
            "qubits" => {
                expect(1)?;
                if num_qubits.is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "duplicate `qubits` header".into(),
                    });
                }
                num_qubits = Some((args[0], line_no));
            }
            "h" | "u" | "tp" => {
                expect(1)?;
                let kind = if directive == "tp" {
                    GateKind::Teleport
                } else {
                    GateKind::OneQubit
                };
                pending.push((line_no, kind, [args[0], args[0]]));
            }
            "cx" => {
                expect(2)?;
                pending.push((line_no, GateKind::TwoQubit, [args[0], args[1]]));
            }
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unknown directive `{other}`"),
                })
            }
        }
        if directive != "qubits" && num_qubits.is_none() {
            return Err(Error::Parse {
                line: line_no,
                message: "gate before `qubits` header".into(),
            });
        }
    }

    let (n, _) = num_qubits.ok_or(Error::Parse {
        line: 0,
        message: "missing `qubits` header".into(),
    })?;
    let gates = pending
        .into_iter()
        .enumerate()
        .map(|(id, (line, kind, ops))| {
            if let Some(q) = ops.iter().find(|&&q| q >= n) {
                return Err(Error::Validation(format!(
                    "line {line}: qubit {q} out of range for {n} qubits"
                )));
            }
            Ok(match kind {
                GateKind::OneQubit => Gate::one_qubit(id, QubitId(ops[0])),
                GateKind::Teleport => Gate::teleport(id, QubitId(ops[0])),
                GateKind::TwoQubit => {
                    if ops[0] == ops[1] {
                        return Err(Error::Validation(format!(
                            "line {line}: two-qubit gate on a single qubit {}",
                            ops[0]
                        )));
                    }
                    Gate::two_qubit(id, QubitId(ops[0]), QubitId(ops[1]))
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Circuit::new(n, gates)
}
