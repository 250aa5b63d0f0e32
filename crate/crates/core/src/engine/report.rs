use crate::circuit::{Circuit, QubitId};
use crate::strategy::Strategy;
use crate::time::Time;
use crate::topology::{BsmLinkId, CoreId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChainSide {
    Source,
    Destination,
}

/// One inter-core request: a two-qubit gate whose operands sat on different cores.
#[derive(Debug, Clone, PartialEq)]
pub struct RequestRecord<T> {
    pub gate_id: usize,
    pub layer: usize,
    pub src: CoreId,
    pub dst: CoreId,
    /// Hop distance between the operand cores when the request was issued.
    pub radius: usize,
    pub rounds: usize,
    pub exec_core: CoreId,
    /// Entanglement attempts summed over every hop of the request.
    pub attempts: u32,
    pub issue: T,
    pub arrival: T,
    pub latency: T,
}

/// One granted teleport hop, in grant order.
#[derive(Debug, Clone, PartialEq)]
pub struct HopRecord<T> {
    pub gate_id: usize,
    pub qubit: QubitId,
    pub side: ChainSide,
    pub hop: usize,
    pub from: CoreId,
    pub to: CoreId,
    pub link: BsmLinkId,
    pub attempts: u32,
    pub start: T,
    pub finish: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport<T> {
    pub strategy: Strategy,
    /// End of the last layer.
    pub total_delay: T,
    /// Sum of request latencies.
    pub comm_delay_sum: T,
    /// Sum over layers of the slowest request in the layer.
    pub comm_delay_critical: T,
    pub original_depth: usize,
    pub expanded_depth: usize,
    pub inter_core_requests: usize,
    pub congestion_events: usize,
    pub max_core_occupancy: usize,
    pub requests: Vec<RequestRecord<T>>,
    pub hops: Vec<HopRecord<T>>,
    /// Original gates plus one teleport marker per hop, in completion order.
    pub expanded: Circuit,
}

impl<T: Time> SimReport<T> {
    /// Headline communication delay.
    pub fn comm_delay(&self) -> T {
        self.comm_delay_critical
    }

    pub fn total_attempts(&self) -> u64 {
        self.hops.iter().map(|h| h.attempts as u64).sum()
    }
}

/// Paired runs of both strategies on the same circuit and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison<T> {
    pub hh: SimReport<T>,
    pub twt: SimReport<T>,
    /// `(hh - twt) / hh` of the critical-path communication delay.
    pub delay_reduction: f64,
    /// Same ratio for the summed request latencies.
    pub delay_sum_reduction: f64,
    /// Same ratio for expanded depth.
    pub depth_reduction: f64,
}

/// `(hh - twt) / hh`, zero when the baseline is zero.
pub fn reduction(hh: f64, twt: f64) -> f64 {
    if hh == 0.0 {
        0.0
    } else {
        (hh - twt) / hh
    }
}
