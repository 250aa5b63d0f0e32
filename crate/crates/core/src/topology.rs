//! 2D mesh of quantum cores joined by BSM nodes.
//!
//! Cores are numbered row-major from the corner at `(0, 0)`: `id = y * width + x`.
//! On the default 4x4 mesh core 3 sits at `(3, 0)` and core 15 at `(3, 3)`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoreId(pub usize);

impl CoreId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for CoreId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coord {
    pub x: usize,
    pub y: usize,
}

impl Coord {
    pub fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

/// A BSM node between two adjacent cores, identified by its endpoints with the
/// smaller core first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BsmLinkId {
    lo: CoreId,
    hi: CoreId,
}

impl BsmLinkId {
    pub fn endpoints(self) -> (CoreId, CoreId) {
        (self.lo, self.hi)
    }
}

impl fmt::Display for BsmLinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeshTopology {
    width: usize,
    height: usize,
}

impl Default for MeshTopology {
    fn default() -> Self {
        Self {
            width: 4,
            height: 4,
        }
    }
}

impl MeshTopology {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidMesh { width, height });
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn core_count(&self) -> usize {
        self.width * self.height
    }

    /// Longest shortest path in the mesh, `(width - 1) + (height - 1)`.
    pub fn diameter(&self) -> usize {
        self.width + self.height - 2
    }

    pub fn bsm_link_count(&self) -> usize {
        self.height * (self.width - 1) + self.width * (self.height - 1)
    }

    pub fn cores(&self) -> impl Iterator<Item = CoreId> {
        (0..self.core_count()).map(CoreId)
    }

    pub fn check_core(&self, core: CoreId) -> Result<()> {
        if core.0 < self.core_count() {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                what: "core",
                value: core.0,
                limit: self.core_count(),
            })
        }
    }

    pub fn core_at(&self, coord: Coord) -> Result<CoreId> {
        if coord.x >= self.width {
            return Err(Error::OutOfBounds {
                what: "x coordinate",
                value: coord.x,
                limit: self.width,
            });
        }
        if coord.y >= self.height {
            return Err(Error::OutOfBounds {
                what: "y coordinate",
                value: coord.y,
                limit: self.height,
            });
        }
        Ok(CoreId(coord.y * self.width + coord.x))
    }

    pub fn coord_of(&self, core: CoreId) -> Result<Coord> {
        self.check_core(core)?;
        Ok(Coord::new(core.0 % self.width, core.0 / self.width))
    }

    // Callers inside the crate hold ids that were already validated.
    pub(crate) fn coord_unchecked(&self, core: CoreId) -> Coord {
        Coord::new(core.0 % self.width, core.0 / self.width)
    }

    pub(crate) fn core_unchecked(&self, coord: Coord) -> CoreId {
        CoreId(coord.y * self.width + coord.x)
    }

    /// Manhattan distance between two cores.
    pub fn hop_distance(&self, a: CoreId, b: CoreId) -> Result<usize> {
        let ca = self.coord_of(a)?;
        let cb = self.coord_of(b)?;
        Ok(ca.x.abs_diff(cb.x) + ca.y.abs_diff(cb.y))
    }

    pub fn is_adjacent(&self, a: CoreId, b: CoreId) -> bool {
        matches!(self.hop_distance(a, b), Ok(1))
    }

    /// Neighbors in east, west, north, south order (where they exist).
    pub fn neighbors(&self, core: CoreId) -> Result<Vec<CoreId>> {
        let c = self.coord_of(core)?;
        let mut out = Vec::with_capacity(4);
        if c.x + 1 < self.width {
            out.push(self.core_unchecked(Coord::new(c.x + 1, c.y)));
        }
        if c.x > 0 {
            out.push(self.core_unchecked(Coord::new(c.x - 1, c.y)));
        }
        if c.y + 1 < self.height {
            out.push(self.core_unchecked(Coord::new(c.x, c.y + 1)));
        }
        if c.y > 0 {
            out.push(self.core_unchecked(Coord::new(c.x, c.y - 1)));
        }
        Ok(out)
    }

    /// Deterministic XY route: correct x first, then y. Includes both endpoints.
    pub fn xy_route(&self, src: CoreId, dst: CoreId) -> Result<Vec<CoreId>> {
        let s = self.coord_of(src)?;
        let d = self.coord_of(dst)?;
        let mut route = Vec::with_capacity(s.x.abs_diff(d.x) + s.y.abs_diff(d.y) + 1);
        let mut cur = s;
        route.push(src);
        while cur.x != d.x {
            cur.x = step_toward(cur.x, d.x);
            route.push(self.core_unchecked(cur));
        }
        while cur.y != d.y {
            cur.y = step_toward(cur.y, d.y);
            route.push(self.core_unchecked(cur));
        }
        Ok(route)
    }

    pub fn bsm_link_between(&self, a: CoreId, b: CoreId) -> Result<BsmLinkId> {
        if self.hop_distance(a, b)? != 1 {
            return Err(Error::NoLink(a, b));
        }
        Ok(BsmLinkId {
            lo: a.min(b),
            hi: a.max(b),
        })
    }

    /// All BSM links, ordered by (lower endpoint, higher endpoint).
    pub fn links(&self) -> Vec<BsmLinkId> {
        let mut out = Vec::with_capacity(self.bsm_link_count());
        for core in self.cores() {
            let c = self.coord_unchecked(core);
            if c.x + 1 < self.width {
                out.push(BsmLinkId {
                    lo: core,
                    hi: CoreId(core.0 + 1),
                });
            }
            if c.y + 1 < self.height {
                out.push(BsmLinkId {
                    lo: core,
                    hi: CoreId(core.0 + self.width),
                });
            }
        }
        out
    }

    /// Dense index of a link in `0..bsm_link_count()`, matching the order of [`links`](Self::links).
    pub(crate) fn link_index(&self, link: BsmLinkId) -> usize {
        // Each core owns its east link (if any) then its south link (if any).
        let lo = link.lo.0;
        let (x, y) = (lo % self.width, lo / self.width);
        let east_before = y * (self.width - 1) + x.min(self.width - 1);
        let south_before = if y + 1 < self.height {
            y * self.width + x
        } else {
            (self.height - 1) * self.width
        };
        let base = east_before + south_before;
        let vertical = link.hi.0 == lo + self.width;
        if vertical && x + 1 < self.width {
            base + 1
        } else {
            base
        }
    }
}

fn step_toward(from: usize, to: usize) -> usize {
    if to > from {
        from + 1
    } else {
        from - 1
    }
}
