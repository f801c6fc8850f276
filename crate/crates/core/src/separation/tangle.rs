use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::SeparationError;
use crate::graph::{Graph, Subgraph, VertexId};
use crate::grid::GridSpec;
use crate::model::Model;
use crate::par::{self, Execution};
use crate::report::{ValidationReport, Violation};

use super::Separation;

/// An explicit tangle: a set of oriented separations, each listed as
/// `(A, B)` with `A` the small side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tangle {
    pub order: usize,
    pub members: Vec<Separation>,
}

impl Tangle {
    pub fn contains(&self, s: &Separation) -> bool {
        self.members.binary_search(s).is_ok()
    }

    /// Sorts and deduplicates the member list.
    pub fn new(order: usize, members: impl IntoIterator<Item = Separation>) -> Self {
        let members: BTreeSet<Separation> = members.into_iter().collect();
        Tangle {
            order,
            members: members.into_iter().collect(),
        }
    }
}

/// Dense bitset over the vertices and edges of a fixed host.
#[derive(Clone, PartialEq, Eq)]
pub(crate) struct SideMask(Vec<u64>);

pub(crate) struct Indexer {
    vertices: BTreeMap<VertexId, usize>,
    edges: BTreeMap<u32, usize>,
    words: usize,
}

impl Indexer {
    pub(crate) fn new(host: &Graph) -> Self {
        let vertices: BTreeMap<_, _> = host
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let nv = vertices.len();
        let edges: BTreeMap<_, _> = host
            .edge_ids()
            .enumerate()
            .map(|(i, e)| (e, nv + i))
            .collect();
        let words = (nv + edges.len()).div_ceil(64).max(1);
        Indexer {
            vertices,
            edges,
            words,
        }
    }

    pub(crate) fn mask(&self, s: &Subgraph) -> SideMask {
        let mut bits = vec![0u64; self.words];
        let idx = s
            .vertices
            .iter()
            .filter_map(|v| self.vertices.get(v))
            .chain(s.edges.iter().filter_map(|e| self.edges.get(e)));
        for &i in idx {
            bits[i / 64] |= 1 << (i % 64);
        }
        SideMask(bits)
    }

    pub(crate) fn full(&self) -> SideMask {
        let total = self.vertices.len() + self.edges.len();
        let mut bits = vec![0u64; self.words];
        for i in 0..total {
            bits[i / 64] |= 1 << (i % 64);
        }
        SideMask(bits)
    }
}

impl SideMask {
    pub(crate) fn covers3(&self, b: &SideMask, c: &SideMask, full: &SideMask) -> bool {
        self.0
            .iter()
            .zip(&b.0)
            .zip(&c.0)
            .zip(&full.0)
            .all(|(((x, y), z), f)| x | y | z == *f)
    }
}

/// Checks the three tangle axioms against `all`, which must list every
/// separation of the host of order below the tangle order. The cover
/// axiom is checked over all member triples, repetitions included.
pub fn check_tangle_axioms(
    t: &Tangle,
    host: &Graph,
    all: &[Separation],
    exec: Execution,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let members: BTreeSet<&Separation> = t.members.iter().collect();
    for (i, s) in all.iter().enumerate() {
        if s.order() < t.order && !members.contains(s) && !members.contains(&s.swapped()) {
            report.push(Violation::TangleIncomplete { separation: i });
        }
    }
    let all_vertices = host.vertices();
    for (i, m) in t.members.iter().enumerate() {
        if m.order() >= t.order {
            report.push(Violation::TangleMemberTooLarge {
                separation: i,
                order: m.order(),
            });
        }
        if &m.a.vertices == all_vertices {
            report.push(Violation::TangleFullSide { member: i });
        }
    }
    let indexer = Indexer::new(host);
    let full = indexer.full();
    let masks: Vec<SideMask> = t.members.iter().map(|m| indexer.mask(&m.a)).collect();
    let covers = par::map_range(exec, masks.len(), |i| {
        let mut found = Vec::new();
        for j in i..masks.len() {
            for l in j..masks.len() {
                if masks[i].covers3(&masks[j], &masks[l], &full) {
                    found.push([i, j, l]);
                }
            }
        }
        found
    });
    for members in covers.into_iter().flatten() {
        report.push(Violation::TangleCover { members });
    }
    report
}

/// Orients `s` as a member of the tangle induced by a model of the grid
/// `G_n`: the returned `(A, B)` has no row image inside `V(A)`.
pub fn grid_tangle_member(
    m: &Model,
    spec: GridSpec,
    s: &Separation,
) -> Result<Separation, SeparationError> {
    let n = spec.n() as usize;
    if s.order() >= n {
        return Err(SeparationError::AmbiguousOrientation(format!(
            "order {} is not below the grid side {n}",
            s.order()
        )));
    }
    let mut images = Vec::with_capacity(n);
    for i in 1..=spec.n() {
        let row = spec.row(i).expect("row in range");
        let image = m
            .image_of_vertices(&row)
            .map_err(|e| SeparationError::AmbiguousOrientation(e.to_string()))?;
        images.push(image);
    }
    let no_row_in = |side: &Subgraph| images.iter().all(|r| !r.is_subset(&side.vertices));
    match (no_row_in(&s.a), no_row_in(&s.b)) {
        (true, false) => Ok(s.clone()),
        (false, true) => Ok(s.swapped()),
        (true, true) => Err(SeparationError::AmbiguousOrientation(
            "no row image lies in either side".into(),
        )),
        (false, false) => Err(SeparationError::AmbiguousOrientation(
            "row images lie in both sides".into(),
        )),
    }
}

/// The members of the grid-induced tangle among `seps` (each oriented,
/// sorted and deduplicated).
pub fn grid_tangle_members(
    m: &Model,
    spec: GridSpec,
    order: usize,
    seps: &[Separation],
    exec: Execution,
) -> Result<Tangle, SeparationError> {
    let oriented = par::map(exec, seps, |s| grid_tangle_member(m, spec, s));
    let members = oriented.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Tangle::new(order, members))
}
