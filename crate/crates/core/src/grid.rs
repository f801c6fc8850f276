//! Coordinate algebra for the n x n grid: rows, columns, the nested square
//! subgrids around an anchor, the cycles between consecutive subgrids, the
//! rings surrounding the innermost subgrid, and the root column segment.
//!
//! Vertex `(i, j)` (1-based) has identifier `(i - 1) * n + j`. Edges are
//! numbered from 0 in row-major vertex order, each vertex emitting its
//! right edge before its down edge.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::GridError;
use crate::graph::{EdgeId, Graph, VertexId};

/// Serialises as an `[i, j]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct GridCoord {
    pub i: u32,
    pub j: u32,
}

impl From<(u32, u32)> for GridCoord {
    fn from((i, j): (u32, u32)) -> Self {
        GridCoord { i, j }
    }
}

impl From<GridCoord> for (u32, u32) {
    fn from(c: GridCoord) -> Self {
        (c.i, c.j)
    }
}

impl GridCoord {
    pub const fn new(i: u32, j: u32) -> Self {
        GridCoord { i, j }
    }
}

impl Serialize for GridSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.n.serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    n: u32,
}

impl GridSpec {
    pub fn new(n: u32) -> Result<Self, GridError> {
        if n == 0 {
            return Err(GridError::EmptyGrid);
        }
        Ok(GridSpec { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        (self.n as usize) * (self.n as usize)
    }

    pub fn edge_count(&self) -> usize {
        2 * (self.n as usize) * (self.n as usize - 1)
    }

    pub fn contains(&self, c: GridCoord) -> bool {
        (1..=self.n).contains(&c.i) && (1..=self.n).contains(&c.j)
    }

    pub fn id(&self, c: GridCoord) -> VertexId {
        debug_assert!(self.contains(c));
        (c.i - 1) * self.n + c.j
    }

    pub fn vertex(&self, i: u32, j: u32) -> VertexId {
        self.id(GridCoord::new(i, j))
    }

    pub fn coord(&self, v: VertexId) -> Result<GridCoord, GridError> {
        if v == 0 || v as usize > self.vertex_count() {
            return Err(GridError::NotAGridVertex(v));
        }
        Ok(GridCoord::new((v - 1) / self.n + 1, (v - 1) % self.n + 1))
    }

    fn edge_base(&self, c: GridCoord) -> u32 {
        let n = self.n;
        let per_vertex = if c.i < n { 2 } else { 1 };
        (c.i - 1) * (2 * n - 1) + (c.j - 1) * per_vertex
    }

    /// Identifier of the grid edge between two adjacent coordinates.
    pub fn edge_between(&self, a: GridCoord, b: GridCoord) -> Result<EdgeId, GridError> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if !self.contains(lo) || !self.contains(hi) {
            return Err(GridError::NotAGridEdge(self.id_lossy(a), self.id_lossy(b)));
        }
        let base = self.edge_base(lo);
        if hi.i == lo.i && hi.j == lo.j + 1 {
            Ok(base)
        } else if hi.j == lo.j && hi.i == lo.i + 1 {
            Ok(base + u32::from(lo.j < self.n))
        } else {
            Err(GridError::NotAGridEdge(self.id_lossy(a), self.id_lossy(b)))
        }
    }

    fn id_lossy(&self, c: GridCoord) -> VertexId {
        (c.i.saturating_sub(1)) * self.n + c.j
    }

    pub fn edge_between_ids(&self, a: VertexId, b: VertexId) -> Result<EdgeId, GridError> {
        self.edge_between(self.coord(a)?, self.coord(b)?)
    }

    /// All grid edges as `(id, lower coordinate, higher coordinate)`.
    pub fn edge_list(&self) -> Vec<(EdgeId, GridCoord, GridCoord)> {
        let n = self.n;
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 1..=n {
            for j in 1..=n {
                let c = GridCoord::new(i, j);
                if j < n {
                    out.push((out.len() as EdgeId, c, GridCoord::new(i, j + 1)));
                }
                if i < n {
                    out.push((out.len() as EdgeId, c, GridCoord::new(i + 1, j)));
                }
            }
        }
        out
    }

    pub fn row(&self, i: u32) -> Result<Vec<VertexId>, GridError> {
        self.check_index(i)?;
        Ok((1..=self.n).map(|j| self.vertex(i, j)).collect())
    }

    pub fn column(&self, j: u32) -> Result<Vec<VertexId>, GridError> {
        self.check_index(j)?;
        Ok((1..=self.n).map(|i| self.vertex(i, j)).collect())
    }

    fn check_index(&self, x: u32) -> Result<(), GridError> {
        if (1..=self.n).contains(&x) {
            Ok(())
        } else {
            Err(GridError::IndexOutOfRange {
                index: x,
                n: self.n,
            })
        }
    }

    /// Vertices of the square block with the given inclusive bounds.
    pub fn block(&self, rows: (u32, u32), cols: (u32, u32)) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for i in rows.0..=rows.1 {
            for j in cols.0..=cols.1 {
                out.insert(self.vertex(i, j));
            }
        }
        out
    }
}

pub fn grid_graph(spec: GridSpec) -> Graph {
    let n = spec.n;
    let mut g = Graph::new();
    for i in 1..=n {
        for j in 1..=n {
            g.add_vertex(spec.vertex(i, j));
        }
    }
    for (id, a, b) in spec.edge_list() {
        g.add_edge(id, spec.id(a), spec.id(b))
            .expect("grid vertices exist");
    }
    g
}

/// Anchor of the nested-subgrid construction: the outer block occupies rows
/// and columns `anchor - k ..= anchor + k + g - 1`, the inner `g x g` block
/// starts at the anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridAtlas {
    pub spec: GridSpec,
    pub i0: u32,
    pub j0: u32,
    pub g: u32,
    pub k: u32,
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = u32::deserialize(d)?;
        GridSpec::new(n).map_err(serde::de::Error::custom)
    }
}

impl GridAtlas {
    pub fn new(spec: GridSpec, i0: u32, j0: u32, g: u32, k: u32) -> Result<Self, GridError> {
        let bad = |m: &str| Err(GridError::BadAtlas(m.to_string()));
        if k < 1 || k > g {
            return bad("need 1 <= k <= g");
        }
        if i0 <= k || j0 <= k {
            return bad("anchor too close to the first row or column");
        }
        if i0 + k + g - 1 > spec.n || j0 + k + g - 1 > spec.n {
            return bad("outer block leaves the grid");
        }
        Ok(GridAtlas { spec, i0, j0, g, k })
    }

    fn level_bounds(&self, s: u32) -> ((u32, u32), (u32, u32)) {
        let (k, g) = (self.k, self.g);
        let lo = |a: u32| a + s - k;
        let hi = |a: u32| a + g - 1 + k - s;
        ((lo(self.i0), hi(self.i0)), (lo(self.j0), hi(self.j0)))
    }

    /// Side length of the level-`s` subgrid.
    pub fn side(&self, s: u32) -> u32 {
        self.g + 2 * (self.k - s)
    }

    /// The square subgrid at level `s` (0 is the outer block, `k` the inner `g x g`).
    pub fn inner_subgrid(&self, s: u32) -> Result<BTreeSet<VertexId>, GridError> {
        if s > self.k {
            return Err(GridError::LevelOutOfRange {
                s,
                lo: 0,
                hi: self.k,
            });
        }
        let (r, c) = self.level_bounds(s);
        Ok(self.spec.block(r, c))
    }

    /// Vertices of level `s` not in level `s + 1`; these induce a cycle.
    pub fn peel_cycle(&self, s: u32) -> Result<BTreeSet<VertexId>, GridError> {
        if s >= self.k {
            return Err(GridError::LevelOutOfRange {
                s,
                lo: 0,
                hi: self.k - 1,
            });
        }
        let outer = self.inner_subgrid(s)?;
        let inner = self.inner_subgrid(s + 1)?;
        Ok(outer.difference(&inner).copied().collect())
    }

    /// The `s`-th ring around the inner subgrid, `1 <= s <= k`, given by the
    /// two vertical and two horizontal segments at offset `s - 1` from the
    /// outer block.
    pub fn ring(&self, s: u32) -> Result<BTreeSet<VertexId>, GridError> {
        if s < 1 || s > self.k {
            return Err(GridError::LevelOutOfRange {
                s,
                lo: 1,
                hi: self.k,
            });
        }
        let (k, g) = (self.k, self.g);
        let top = self.i0 + s - 1 - k;
        let bottom = self.i0 + k + g - s;
        let left = self.j0 + s - 1 - k;
        let right = self.j0 + k + g - s;
        let mut out = BTreeSet::new();
        for i in top..=bottom {
            for j in [left, right] {
                out.insert(self.spec.vertex(i, j));
            }
        }
        for i in [top, bottom] {
            for j in left..=right {
                out.insert(self.spec.vertex(i, j));
            }
        }
        Ok(out)
    }

    /// The `k` vertices `(i0 + t, j0)`, `t = 0..k`, in row order.
    pub fn root_segment(&self) -> Vec<VertexId> {
        (0..self.k)
            .map(|t| self.spec.vertex(self.i0 + t, self.j0))
            .collect()
    }

    /// Grid coordinate of pattern vertex `(a, b)` of the inner `g x g` grid.
    pub fn inner_coord(&self, a: u32, b: u32) -> GridCoord {
        GridCoord::new(self.i0 + a - 1, self.j0 + b - 1)
    }

    /// Rows of the grid met by the outer block.
    pub fn band_rows(&self) -> std::ops::RangeInclusive<u32> {
        (self.i0 - self.k)..=(self.i0 + self.k + self.g - 1)
    }
}

/// Picks an outer block of `g + 2k` consecutive rows, none of which contains
/// a forbidden vertex. Row-aligned blocks `1..=h, h+1..=2h, ...` are tried
/// first (at least one is clean whenever `n >= (k + 1)(g + 2k)` and at most
/// `k` rows are forbidden); if none is clean every sliding window is tried.
/// Columns always start at 1. Returns `None` when no clean window exists.
pub fn choose_band(
    spec: GridSpec,
    g: u32,
    k: u32,
    forbidden: &BTreeSet<VertexId>,
) -> Result<Option<GridAtlas>, GridError> {
    let n = spec.n();
    if k < 1 || k > g {
        return Err(GridError::BadAtlas("need 1 <= k <= g".into()));
    }
    let height = g + 2 * k;
    if height > n {
        return Ok(None);
    }
    let mut dirty = vec![false; n as usize + 1];
    for &v in forbidden {
        dirty[spec.coord(v)?.i as usize] = true;
    }
    let clean = |top: u32| (top..top + height).all(|r| !dirty[r as usize]);
    let aligned = (0..n / height).map(|b| b * height + 1);
    let sliding = 1..=(n - height + 1);
    let top = aligned.chain(sliding).find(|&t| clean(t));
    Ok(match top {
        Some(t) => Some(GridAtlas::new(spec, t + k, k + 1, g, k)?),
        None => None,
    })
}
