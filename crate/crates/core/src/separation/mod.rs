//! Separations, vertex-disjoint paths and cuts, blocking separations, and
//! tangles.

mod blocking;
mod flow;
mod tangle;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::SeparationError;
use crate::graph::{Graph, Subgraph, VertexId};

pub use blocking::{
    find_row_blocking_separation, find_strict_blocking_separation, BlockingKind, BlockingSeparation,
};
pub use flow::{disjoint_paths, menger, CutResult, FlowOutcome};
pub use tangle::{check_tangle_axioms, grid_tangle_member, grid_tangle_members, Tangle};

/// A pair of subgraphs covering the host with no common edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Separation {
    #[serde(rename = "A")]
    pub a: Subgraph,
    #[serde(rename = "B")]
    pub b: Subgraph,
}

impl Separation {
    pub fn new(host: &Graph, a: Subgraph, b: Subgraph) -> Result<Self, SeparationError> {
        let s = Separation { a, b };
        s.check(host)?;
        Ok(s)
    }

    pub fn check(&self, host: &Graph) -> Result<(), SeparationError> {
        self.a.check_in(host).map_err(SeparationError::BadSide)?;
        self.b.check_in(host).map_err(SeparationError::BadSide)?;
        if let Some(&e) = self.a.edges.intersection(&self.b.edges).next() {
            return Err(SeparationError::SharedEdge(e));
        }
        if self.a.union(&self.b) != host.as_subgraph() {
            return Err(SeparationError::NotCovering);
        }
        Ok(())
    }

    /// `|V(A ∩ B)|`.
    pub fn order(&self) -> usize {
        self.a.vertices.intersection(&self.b.vertices).count()
    }

    pub fn separator(&self) -> BTreeSet<VertexId> {
        self.a
            .vertices
            .intersection(&self.b.vertices)
            .copied()
            .collect()
    }

    pub fn swapped(&self) -> Separation {
        Separation {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    /// Builds the separation with `V(A) = a_only ∪ separator` and
    /// `V(B) = V(G) \ a_only`. An edge goes to `A` if it has an end in
    /// `a_only` or both ends in the separator, and to `B` otherwise.
    pub fn from_sides(
        host: &Graph,
        a_only: &BTreeSet<VertexId>,
        separator: &BTreeSet<VertexId>,
    ) -> Result<Self, SeparationError> {
        let mut a = Subgraph::from_vertices(a_only.union(separator).copied());
        let mut b = Subgraph::from_vertices(host.vertices().difference(a_only).copied());
        for (e, u, v) in host.edges() {
            let in_a = a_only.contains(&u) || a_only.contains(&v);
            let in_x = separator.contains(&u) && separator.contains(&v);
            if in_a || in_x {
                a.edges.insert(e);
            } else {
                b.edges.insert(e);
            }
        }
        Separation::new(host, a, b)
    }
}

pub fn separation_order(s: &Separation) -> usize {
    s.order()
}
