//! Post-run checks on the hop trace: no BSM link serves two overlapping
//! teleports, and no core holds more than `M` communication qubits at once.

use std::collections::BTreeMap;

use super::report::HopRecord;
use crate::time::Time;
use crate::topology::{BsmLinkId, CoreId};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub hops_checked: usize,
    pub link_overlaps: usize,
    pub comm_overholds: usize,
    /// Grants on a link whose busy-until went backwards.
    pub grant_order_violations: usize,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.link_overlaps == 0 && self.comm_overholds == 0 && self.grant_order_violations == 0
    }

    pub fn merge(&mut self, other: AuditReport) {
        self.hops_checked += other.hops_checked;
        self.link_overlaps += other.link_overlaps;
        self.comm_overholds += other.comm_overholds;
        self.grant_order_violations += other.grant_order_violations;
    }
}

pub fn audit<T: Time>(hops: &[HopRecord<T>], m_per_core: usize) -> AuditReport {
    let mut report = AuditReport {
        hops_checked: hops.len(),
        ..Default::default()
    };

    // Hold intervals are half-open [start, finish).
    let mut last_on_link: BTreeMap<BsmLinkId, (T, T)> = BTreeMap::new();
    for h in hops {
        if let Some(&(_, prev_finish)) = last_on_link.get(&h.link) {
            if h.start < prev_finish && h.start < h.finish {
                report.link_overlaps += 1;
            }
            if h.finish < prev_finish {
                report.grant_order_violations += 1;
            }
        }
        last_on_link.insert(h.link, (h.start, h.finish));
    }

    // Sweep per core: releases sort before acquisitions at equal times.
    let mut marks: Vec<(T, i8, CoreId)> = Vec::with_capacity(hops.len() * 4);
    for h in hops.iter().filter(|h| h.start < h.finish) {
        for core in [h.from, h.to] {
            marks.push((h.start, 1, core));
            marks.push((h.finish, -1, core));
        }
    }
    marks.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut held: BTreeMap<CoreId, usize> = BTreeMap::new();
    for (_, delta, core) in marks {
        let e = held.entry(core).or_default();
        if delta > 0 {
            *e += 1;
            if *e > m_per_core {
                report.comm_overholds += 1;
            }
        } else {
            *e -= 1;
        }
    }
    report
}
