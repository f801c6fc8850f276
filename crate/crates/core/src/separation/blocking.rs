use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::SeparationError;
use crate::graph::{Graph, VertexId};
use crate::model::Pseudomodel;
use crate::par::{self, Execution};

use super::flow::{cut_separation, disjoint_paths};
use super::Separation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockingKind {
    /// Order below the bound.
    Strict,
    /// Order equal to the bound, with `B != G`.
    Reducible,
}

/// A separation with the roots in `V(A)` and the image of a pattern row in
/// `V(B)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingSeparation {
    pub kind: BlockingKind,
    /// Index of the pattern row whose image lies in `V(B)`.
    pub row: u32,
    pub separation: Separation,
}

impl BlockingSeparation {
    pub fn order(&self) -> usize {
        self.separation.order()
    }
}

/// Scans `rows` (pattern row index and its pattern vertices) in the given
/// order and returns the first row admitting a separation of order at most
/// `max_order` with `roots ⊆ V(A)` and the row image in `V(B)`: `Strict` if
/// some such separation has order below `max_order`, otherwise `Reducible`
/// if one of order exactly `max_order` has `B != G`. Rows with no such
/// separation are skipped.
///
/// Minimum cuts are exact, so `None` is a proof that no listed row is
/// blocked.
pub fn find_row_blocking_separation(
    g: &Graph,
    roots: &BTreeSet<VertexId>,
    p: &Pseudomodel,
    rows: &[(u32, Vec<VertexId>)],
    max_order: usize,
    exec: Execution,
) -> Result<Option<BlockingSeparation>, SeparationError> {
    scan_rows(g, roots, p, rows, exec, |image| {
        row_blocker(g, roots, image, max_order)
    })
}

/// The first row (in the given order) whose image can be cut from `roots` by
/// fewer than `k` vertices, with the separation built from the cut closest
/// to the roots.
pub fn find_strict_blocking_separation(
    g: &Graph,
    roots: &BTreeSet<VertexId>,
    p: &Pseudomodel,
    rows: &[(u32, Vec<VertexId>)],
    k: usize,
    exec: Execution,
) -> Result<Option<BlockingSeparation>, SeparationError> {
    scan_rows(g, roots, p, rows, exec, |image| {
        let outcome = disjoint_paths(g, roots, image, k);
        match outcome.source_cut {
            Some(cut) => Ok(Some((
                BlockingKind::Strict,
                cut_separation(g, roots, &cut)?,
            ))),
            None => Ok(None),
        }
    })
}

type RowVerdict = Result<Option<(BlockingKind, Separation)>, SeparationError>;

fn scan_rows<F>(
    g: &Graph,
    roots: &BTreeSet<VertexId>,
    p: &Pseudomodel,
    rows: &[(u32, Vec<VertexId>)],
    exec: Execution,
    test: F,
) -> Result<Option<BlockingSeparation>, SeparationError>
where
    F: Fn(&BTreeSet<VertexId>) -> RowVerdict + Sync + Send,
{
    if roots.is_empty() {
        return Err(SeparationError::MalformedInput("empty root set".into()));
    }
    if let Some(z) = roots.iter().find(|z| !g.has_vertex(**z)) {
        return Err(SeparationError::MalformedInput(format!(
            "root {z} not in graph"
        )));
    }
    let found = par::find_map_first(exec, rows, |(index, vertices)| {
        let image = match p.image_of_vertices(vertices) {
            Ok(image) if !image.is_empty() => image,
            Ok(_) => {
                return Some(Err(SeparationError::MalformedInput(format!(
                    "row {index} has an empty image"
                ))))
            }
            Err(e) => return Some(Err(SeparationError::MalformedInput(e.to_string()))),
        };
        test(&image)
            .map(|found| {
                found.map(|(kind, separation)| BlockingSeparation {
                    kind,
                    row: *index,
                    separation,
                })
            })
            .transpose()
    });
    found.transpose()
}

/// Blocking separation for a single row image, if any.
pub(crate) fn row_blocker(
    g: &Graph,
    roots: &BTreeSet<VertexId>,
    image: &BTreeSet<VertexId>,
    max_order: usize,
) -> Result<Option<(BlockingKind, Separation)>, SeparationError> {
    let outcome = disjoint_paths(g, roots, image, max_order + 1);
    let (Some(source_cut), Some((target_cut, target_side))) =
        (outcome.source_cut, outcome.target_cut)
    else {
        return Ok(None);
    };
    if source_cut.len() < max_order {
        return Ok(Some((
            BlockingKind::Strict,
            cut_separation(g, roots, &source_cut)?,
        )));
    }
    // The cut closest to the row leaves the most on the root side: if it
    // cannot make B a proper subgraph, no minimum cut can.
    let a_only: BTreeSet<VertexId> = g
        .vertices()
        .iter()
        .filter(|v| !target_cut.contains(v) && !target_side.contains(v))
        .copied()
        .collect();
    let sep = Separation::from_sides(g, &a_only, &target_cut)?;
    if sep.b == g.as_subgraph() {
        return Ok(None);
    }
    Ok(Some((BlockingKind::Reducible, sep)))
}
