//! Communication planning for inter-core two-qubit gates.
//!
//! Hop-by-hop moves the source operand along its XY route to the destination
//! core. Two-way teleportation moves both operands toward a meeting core:
//!
//! * same row or column: both step toward each other along that axis and meet
//!   `ceil(d/2)` hops from the source, so odd distances meet nearer the destination;
//! * diagonal: the source moves along X only and the destination along Y only,
//!   meeting at the corner `(x_dst, y_src)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::topology::{Coord, CoreId, MeshTopology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    HopByHop,
    TwoWay,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::HopByHop, Strategy::TwoWay];

    pub fn token(self) -> &'static str {
        match self {
            Strategy::HopByHop => "hh",
            Strategy::TwoWay => "twt",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hh" => Ok(Strategy::HopByHop),
            "twt" => Ok(Strategy::TwoWay),
            other => Err(Error::Config(format!(
                "unknown strategy `{other}` (expected hh or twt)"
            ))),
        }
    }
}

/// Hop schedule for one request. Hop lists exclude the starting core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommPlan {
    pub src_hops: Vec<CoreId>,
    pub dst_hops: Vec<CoreId>,
    pub exec_core: CoreId,
    pub rounds: usize,
}

impl CommPlan {
    fn new(src_hops: Vec<CoreId>, dst_hops: Vec<CoreId>, exec_core: CoreId) -> Self {
        let rounds = src_hops.len().max(dst_hops.len());
        Self {
            src_hops,
            dst_hops,
            exec_core,
            rounds,
        }
    }

    pub fn total_hops(&self) -> usize {
        self.src_hops.len() + self.dst_hops.len()
    }
}

fn check_pair(topology: &MeshTopology, src: CoreId, dst: CoreId) -> Result<()> {
    topology.check_core(src)?;
    topology.check_core(dst)?;
    if src == dst {
        return Err(Error::NoPlan(src));
    }
    Ok(())
}

pub fn plan_hh(topology: &MeshTopology, src: CoreId, dst: CoreId) -> Result<CommPlan> {
    check_pair(topology, src, dst)?;
    let route = topology.xy_route(src, dst)?;
    Ok(CommPlan::new(route[1..].to_vec(), Vec::new(), dst))
}

pub fn plan_twt(topology: &MeshTopology, src: CoreId, dst: CoreId) -> Result<CommPlan> {
    check_pair(topology, src, dst)?;
    let s = topology.coord_unchecked(src);
    let d = topology.coord_unchecked(dst);

    let meet = if s.y == d.y {
        let dist = s.x.abs_diff(d.x);
        Coord::new(toward(s.x, d.x, dist.div_ceil(2)), s.y)
    } else if s.x == d.x {
        let dist = s.y.abs_diff(d.y);
        Coord::new(s.x, toward(s.y, d.y, dist.div_ceil(2)))
    } else {
        Coord::new(d.x, s.y)
    };
    let meet = topology.core_unchecked(meet);

    // Both legs are straight lines, so the XY route is the unique minimal path.
    let src_hops = topology.xy_route(src, meet)?[1..].to_vec();
    let dst_hops = topology.xy_route(dst, meet)?[1..].to_vec();
    Ok(CommPlan::new(src_hops, dst_hops, meet))
}

pub fn plan(
    strategy: Strategy,
    topology: &MeshTopology,
    src: CoreId,
    dst: CoreId,
) -> Result<CommPlan> {
    match strategy {
        Strategy::HopByHop => plan_hh(topology, src, dst),
        Strategy::TwoWay => plan_twt(topology, src, dst),
    }
}

/// `(hh_rounds, twt_rounds)` for one request.
pub fn rounds_saved(topology: &MeshTopology, src: CoreId, dst: CoreId) -> Result<(usize, usize)> {
    Ok((
        plan_hh(topology, src, dst)?.rounds,
        plan_twt(topology, src, dst)?.rounds,
    ))
}

fn toward(from: usize, to: usize, steps: usize) -> usize {
    if to >= from {
        from + steps
    } else {
        from - steps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::QubitId;
    use crate::placement::initial_mapping;

    fn mesh4() -> MeshTopology {
        MeshTopology::new(4, 4).unwrap()
    }

    fn ids(v: &[usize]) -> Vec<CoreId> {
        v.iter().copied().map(CoreId).collect()
    }

    #[test]
    fn hh_corner_to_corner() {
        let p = plan_hh(&mesh4(), CoreId(0), CoreId(15)).unwrap();
        assert_eq!(p.src_hops, ids(&[1, 2, 3, 7, 11, 15]));
        assert!(p.dst_hops.is_empty());
        assert_eq!(p.exec_core, CoreId(15));
        assert_eq!(p.rounds, 6);
    }

    #[test]
    fn hh_short_routes() {
        let m = mesh4();
        let p = plan_hh(&m, CoreId(5), CoreId(6)).unwrap();
        assert_eq!((p.src_hops, p.rounds), (ids(&[6]), 1));
        let p = plan_hh(&m, CoreId(0), CoreId(2)).unwrap();
        assert_eq!((p.src_hops, p.rounds), (ids(&[1, 2]), 2));
    }

    #[test]
    fn twt_corner_to_corner_meets_at_core_3() {
        let p = plan_twt(&mesh4(), CoreId(0), CoreId(15)).unwrap();
        assert_eq!(p.src_hops, ids(&[1, 2, 3]));
        assert_eq!(p.dst_hops, ids(&[11, 7, 3]));
        assert_eq!(p.exec_core, CoreId(3));
        assert_eq!(p.rounds, 3);
    }

    #[test]
    fn twt_same_row_odd_distance_meets_nearer_destination() {
        let p = plan_twt(&mesh4(), CoreId(0), CoreId(3)).unwrap();
        assert_eq!(p.src_hops, ids(&[1, 2]));
        assert_eq!(p.dst_hops, ids(&[2]));
        assert_eq!(p.exec_core, CoreId(2));
        assert_eq!(p.rounds, 2);
        // Mirrored direction.
        let p = plan_twt(&mesh4(), CoreId(3), CoreId(0)).unwrap();
        assert_eq!(p.exec_core, CoreId(1));
    }

    #[test]
    fn twt_same_column() {
        let p = plan_twt(&mesh4(), CoreId(1), CoreId(13)).unwrap();
        assert_eq!(p.src_hops, ids(&[5, 9]));
        assert_eq!(p.dst_hops, ids(&[9]));
        assert_eq!(p.exec_core, CoreId(9));
    }

    #[test]
    fn twt_adjacent_matches_hh() {
        let m = mesh4();
        let p = plan_twt(&m, CoreId(0), CoreId(1)).unwrap();
        assert_eq!(p.src_hops, ids(&[1]));
        assert!(p.dst_hops.is_empty());
        assert_eq!((p.exec_core, p.rounds), (CoreId(1), 1));
        assert_eq!(p, plan_hh(&m, CoreId(0), CoreId(1)).unwrap());
    }

    #[test]
    fn same_core_has_no_plan() {
        let m = mesh4();
        assert_eq!(
            plan_hh(&m, CoreId(4), CoreId(4)),
            Err(Error::NoPlan(CoreId(4)))
        );
        assert_eq!(
            plan_twt(&m, CoreId(4), CoreId(4)),
            Err(Error::NoPlan(CoreId(4)))
        );
        assert!(plan_hh(&m, CoreId(4), CoreId(40)).is_err());
    }

    #[test]
    fn rounds_saved_examples() {
        let m = mesh4();
        assert_eq!(rounds_saved(&m, CoreId(0), CoreId(15)).unwrap(), (6, 3));
        assert_eq!(rounds_saved(&m, CoreId(4), CoreId(7)).unwrap(), (3, 2));
        let wide = MeshTopology::new(5, 2).unwrap();
        assert_eq!(rounds_saved(&wide, CoreId(0), CoreId(4)).unwrap(), (4, 2));
        for a in m.cores() {
            for b in m.neighbors(a).unwrap() {
                assert_eq!(rounds_saved(&m, a, b).unwrap(), (1, 1));
            }
        }
    }

    #[test]
    fn strategy_tokens() {
        assert_eq!("hh".parse::<Strategy>().unwrap(), Strategy::HopByHop);
        assert_eq!(" TWT ".parse::<Strategy>().unwrap(), Strategy::TwoWay);
        assert!("xy".parse::<Strategy>().is_err());
        assert_eq!(Strategy::TwoWay.to_string(), "twt");
    }

    fn check_plan(m: &MeshTopology, s: CoreId, d: CoreId, p: &CommPlan) {
        let mut prev = s;
        for &h in &p.src_hops {
            assert!(m.is_adjacent(prev, h));
            prev = h;
        }
        assert_eq!(prev, p.exec_core);
        let mut prev = d;
        for &h in &p.dst_hops {
            assert!(m.is_adjacent(prev, h));
            prev = h;
        }
        assert_eq!(prev, p.exec_core);
        assert_eq!(p.rounds, p.src_hops.len().max(p.dst_hops.len()));
    }

    #[test]
    fn exhaustive_plan_properties() {
        for (w, h) in [(1, 6), (2, 3), (4, 4), (5, 3), (8, 8)] {
            let m = MeshTopology::new(w, h).unwrap();
            for s in m.cores() {
                for d in m.cores().filter(|&d| d != s) {
                    let hh = plan_hh(&m, s, d).unwrap();
                    let twt = plan_twt(&m, s, d).unwrap();
                    check_plan(&m, s, d, &hh);
                    check_plan(&m, s, d, &twt);
                    let dist = m.hop_distance(s, d).unwrap();
                    assert_eq!(hh.rounds, dist);
                    assert!(twt.rounds <= hh.rounds);
                    if dist == 1 {
                        assert_eq!(twt.rounds, hh.rounds);
                    }

                    let (sc, dc) = (m.coord_of(s).unwrap(), m.coord_of(d).unwrap());
                    let in_box = |c: CoreId| {
                        let c = m.coord_of(c).unwrap();
                        c.x >= sc.x.min(dc.x)
                            && c.x <= sc.x.max(dc.x)
                            && c.y >= sc.y.min(dc.y)
                            && c.y <= sc.y.max(dc.y)
                    };
                    assert!(twt.src_hops.iter().chain(&twt.dst_hops).all(|&c| in_box(c)));
                    if sc.x != dc.x && sc.y != dc.y {
                        assert!(twt
                            .src_hops
                            .iter()
                            .all(|&c| m.coord_of(c).unwrap().y == sc.y));
                        assert!(twt
                            .dst_hops
                            .iter()
                            .all(|&c| m.coord_of(c).unwrap().x == dc.x));
                        assert_eq!(twt.src_hops.len(), sc.x.abs_diff(dc.x));
                        assert_eq!(twt.dst_hops.len(), sc.y.abs_diff(dc.y));
                    }
                }
            }
        }
    }

    #[test]
    fn replaying_plans_colocates_operands() {
        let m = mesh4();
        for s in m.cores() {
            for d in m.cores().filter(|&d| d != s) {
                for strategy in Strategy::ALL {
                    let p = plan(strategy, &m, s, d).unwrap();
                    let mut map = initial_mapping(16, &m, 1).unwrap();
                    let (qs, qd) = (QubitId(s.0), QubitId(d.0));
                    for &c in &p.src_hops {
                        map.relocate(qs, c).unwrap();
                    }
                    for &c in &p.dst_hops {
                        map.relocate(qd, c).unwrap();
                    }
                    assert_eq!(map.core_of(qs), p.exec_core);
                    assert_eq!(map.core_of(qd), p.exec_core);
                }
            }
        }
    }
}
