//! Discrete-event simulator for teleportation-based communication between
//! quantum cores on a 2D mesh.
//!
//! Inter-core two-qubit gates are resolved either hop-by-hop (the source operand
//! walks its XY route) or by two-way teleportation (both operands converge on a
//! meeting core). The engine reports end-to-end communication delay and the
//! circuit depth after teleport markers are inserted.
//!
//! Time is generic over [`Time`]; the aliases below fix the common choices.

pub mod benchgen;
pub mod circuit;
pub mod engine;
pub mod error;
pub mod placement;
pub mod protocol;
pub mod strategy;
pub mod time;
pub mod topology;

use num_rational::Ratio;

pub use benchgen::{gen_synthetic, gen_synthetic_for, CrMode, SynthSpec};
pub use circuit::{parse_circuit, Circuit, CircuitBuilder, Gate, GateKind, Layer, QubitId};
pub use engine::{
    audit, compare, compare_circuits, run, AuditReport, Comparison, SimConfig, SimReport,
};
pub use error::{Error, Result};
pub use placement::{initial_mapping, PlacementMap};
pub use protocol::{TeleportOutcome, TimingConfig};
pub use strategy::{CommPlan, Strategy};
pub use time::Time;
pub use topology::{BsmLinkId, Coord, CoreId, MeshTopology};

/// Exact rational time.
pub type Rational = Ratio<i64>;

pub type Timing = TimingConfig<f64>;
pub type Config = SimConfig<f64>;
pub type Report = SimReport<f64>;

pub type TickTiming = TimingConfig<u64>;
pub type TickConfig = SimConfig<u64>;
pub type TickReport = SimReport<u64>;

pub type ExactTiming = TimingConfig<Rational>;
pub type ExactConfig = SimConfig<Rational>;
pub type ExactReport = SimReport<Rational>;
