use thiserror::Error;

use crate::topology::CoreId;

/// Errors raised by the simulator and its building blocks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid mesh dimensions {width}x{height}")]
    InvalidMesh { width: usize, height: usize },

    #[error("{what} {value} out of bounds (limit {limit})")]
    OutOfBounds {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("cores {0} and {1} are not adjacent, no BSM link between them")]
    NoLink(CoreId, CoreId),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid circuit: {0}")]
    Validation(String),

    #[error("{qubits} qubits do not fit on {cores} cores with {per_core} qubits each")]
    Capacity {
        qubits: usize,
        cores: usize,
        per_core: usize,
    },

    #[error("workload generation failed: {0}")]
    Generation(String),

    #[error("both operands already on core {0}; nothing to plan")]
    NoPlan(CoreId),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("entanglement on link {link} exhausted {cap} attempts")]
    AttemptsExhausted {
        link: String,
        cap: u32,
        gate: Option<usize>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
