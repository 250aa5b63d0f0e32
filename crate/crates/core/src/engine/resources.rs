use crate::time::Time;
use crate::topology::{BsmLinkId, CoreId, MeshTopology};

/// What one teleport hop holds for its whole duration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct HopNeed {
    pub link: BsmLinkId,
    pub from: CoreId,
    pub to: CoreId,
}

/// BSM link occupancy and free communication qubits per core.
#[derive(Debug, Clone)]
pub struct ResourceState<T> {
    topology: MeshTopology,
    busy_until: Vec<Option<T>>,
    comm_free: Vec<usize>,
    m_per_core: usize,
}

impl<T: Time> ResourceState<T> {
    pub fn new(topology: MeshTopology, m_per_core: usize) -> Self {
        Self {
            topology,
            busy_until: vec![None; topology.bsm_link_count()],
            comm_free: vec![m_per_core; topology.core_count()],
            m_per_core,
        }
    }

    pub fn comm_free(&self, core: CoreId) -> usize {
        self.comm_free[core.0]
    }

    pub fn link_busy_until(&self, link: BsmLinkId) -> Option<T> {
        self.busy_until[self.topology.link_index(link)]
    }

    /// Decides which of `needs` (already in FIFO priority order) can start now.
    ///
    /// A request that cannot start still claims what it asked for, so nothing
    /// behind it in the queue can take those resources first.
    pub(crate) fn select(&self, needs: &[HopNeed]) -> Vec<bool> {
        let mut link_claimed: Vec<bool> = self.busy_until.iter().map(Option::is_some).collect();
        let mut avail: Vec<isize> = self.comm_free.iter().map(|&c| c as isize).collect();
        needs
            .iter()
            .map(|need| {
                let li = self.topology.link_index(need.link);
                let ok = !link_claimed[li] && avail[need.from.0] > 0 && avail[need.to.0] > 0;
                link_claimed[li] = true;
                avail[need.from.0] -= 1;
                avail[need.to.0] -= 1;
                ok
            })
            .collect()
    }

    pub(crate) fn acquire(&mut self, need: &HopNeed, until: T) {
        let li = self.topology.link_index(need.link);
        debug_assert!(self.busy_until[li].is_none());
        self.busy_until[li] = Some(until);
        self.comm_free[need.from.0] -= 1;
        self.comm_free[need.to.0] -= 1;
    }

    pub(crate) fn release(&mut self, need: &HopNeed) {
        let li = self.topology.link_index(need.link);
        self.busy_until[li] = None;
        self.comm_free[need.from.0] += 1;
        self.comm_free[need.to.0] += 1;
        debug_assert!(self.comm_free[need.from.0] <= self.m_per_core);
        debug_assert!(self.comm_free[need.to.0] <= self.m_per_core);
    }
}
