//! Logical qubit to core assignment.

use crate::circuit::QubitId;
use crate::error::{Error, Result};
use crate::topology::{CoreId, MeshTopology};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementMap {
    qubit_core: Vec<CoreId>,
    core_load: Vec<usize>,
    capacity: usize,
}

/// Block mapping: qubit `i` goes to core `i / n_per_core`.
pub fn initial_mapping(
    num_qubits: usize,
    topology: &MeshTopology,
    n_per_core: usize,
) -> Result<PlacementMap> {
    let cores = topology.core_count();
    if n_per_core == 0 || num_qubits > cores * n_per_core {
        return Err(Error::Capacity {
            qubits: num_qubits,
            cores,
            per_core: n_per_core,
        });
    }
    let qubit_core: Vec<CoreId> = (0..num_qubits).map(|q| CoreId(q / n_per_core)).collect();
    let mut core_load = vec![0; cores];
    for c in &qubit_core {
        core_load[c.0] += 1;
    }
    Ok(PlacementMap {
        qubit_core,
        core_load,
        capacity: n_per_core,
    })
}

impl PlacementMap {
    pub fn core_of(&self, q: QubitId) -> CoreId {
        self.qubit_core[q.0]
    }

    pub fn load(&self, core: CoreId) -> usize {
        self.core_load[core.0]
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn num_qubits(&self) -> usize {
        self.qubit_core.len()
    }

    pub fn total_occupancy(&self) -> usize {
        self.core_load.iter().sum()
    }

    pub fn max_load(&self) -> usize {
        self.core_load.iter().copied().max().unwrap_or(0)
    }

    pub fn qubits_on(&self, core: CoreId) -> impl Iterator<Item = QubitId> + '_ {
        self.qubit_core
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c == core)
            .map(|(q, _)| QubitId(q))
    }

    /// Moves `qubit` to `to`. Returns true when the destination is now over capacity.
    pub fn relocate(&mut self, qubit: QubitId, to: CoreId) -> Result<bool> {
        if qubit.0 >= self.qubit_core.len() {
            return Err(Error::OutOfBounds {
                what: "qubit",
                value: qubit.0,
                limit: self.qubit_core.len(),
            });
        }
        if to.0 >= self.core_load.len() {
            return Err(Error::OutOfBounds {
                what: "core",
                value: to.0,
                limit: self.core_load.len(),
            });
        }
        let from = self.qubit_core[qubit.0];
        if from == to {
            return Ok(false);
        }
        self.core_load[from.0] -= 1;
        self.core_load[to.0] += 1;
        self.qubit_core[qubit.0] = to;
        Ok(self.core_load[to.0] > self.capacity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mesh4() -> MeshTopology {
        MeshTopology::new(4, 4).unwrap()
    }

    #[test]
    fn identity_mapping_with_one_per_core() {
        let p = initial_mapping(16, &mesh4(), 1).unwrap();
        for q in 0..16 {
            assert_eq!(p.core_of(QubitId(q)), CoreId(q));
        }
    }

    #[test]
    fn block_mapping_two_per_core() {
        let p = initial_mapping(32, &mesh4(), 2).unwrap();
        assert_eq!(p.core_of(QubitId(0)), CoreId(0));
        assert_eq!(p.core_of(QubitId(1)), CoreId(0));
        assert_eq!(p.core_of(QubitId(30)), CoreId(15));
        assert_eq!(p.core_of(QubitId(31)), CoreId(15));
        assert_eq!(p.max_load(), 2);
    }

    #[test]
    fn too_many_qubits() {
        assert!(matches!(
            initial_mapping(17, &mesh4(), 1),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn relocate_to_current_core_is_noop() {
        let mut p = initial_mapping(16, &mesh4(), 1).unwrap();
        let before = p.clone();
        assert!(!p.relocate(QubitId(4), CoreId(4)).unwrap());
        assert_eq!(p, before);
    }

    #[test]
    fn relocate_into_full_core_flags_congestion() {
        let mut p = initial_mapping(16, &mesh4(), 1).unwrap();
        assert!(p.relocate(QubitId(0), CoreId(1)).unwrap());
        assert_eq!(p.load(CoreId(1)), 2);
        assert_eq!(p.load(CoreId(0)), 0);
        assert!(p.relocate(QubitId(0), CoreId(99)).is_err());
        assert!(p.relocate(QubitId(99), CoreId(0)).is_err());
    }

    #[test]
    fn walking_a_route_lands_on_destination() {
        let m = mesh4();
        let mut p = initial_mapping(2, &m, 1).unwrap();
        for core in m
            .xy_route(CoreId(0), CoreId(15))
            .unwrap()
            .into_iter()
            .skip(1)
        {
            p.relocate(QubitId(0), core).unwrap();
        }
        assert_eq!(p.core_of(QubitId(0)), CoreId(15));
        assert_eq!(p.load(CoreId(15)), 1);
    }

    proptest! {
        #[test]
        fn occupancy_is_conserved_and_log_replays(
            moves in prop::collection::vec((0usize..20, 0usize..16), 0..80)
        ) {
            let m = mesh4();
            let mut p = initial_mapping(20, &m, 2).unwrap();
            for &(q, c) in &moves {
                p.relocate(QubitId(q), CoreId(c)).unwrap();
                prop_assert_eq!(p.total_occupancy(), 20);
            }
            let mut replay = initial_mapping(20, &m, 2).unwrap();
            for &(q, c) in &moves {
                replay.relocate(QubitId(q), CoreId(c)).unwrap();
            }
            prop_assert_eq!(&replay, &p);
            for core in m.cores() {
                prop_assert_eq!(p.load(core), p.qubits_on(core).count());
            }
        }
    }
}
