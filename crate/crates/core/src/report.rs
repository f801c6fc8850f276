use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, VertexId};

/// One broken rule, with the offending pattern vertex or edge where there
/// is one. Pattern elements are reported by identifier; for grid patterns
/// the identifier encodes the coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Violation {
    MissingBranch {
        vertex: VertexId,
    },
    NullBranch {
        vertex: VertexId,
    },
    BranchNotInHost {
        vertex: VertexId,
        detail: String,
    },
    /// Branches are not pairwise vertex-disjoint.
    BranchesOverlap {
        first: VertexId,
        second: VertexId,
        shared: VertexId,
    },
    MissingEdgeImage {
        edge: EdgeId,
    },
    UnknownHostEdge {
        edge: EdgeId,
        host_edge: EdgeId,
    },
    /// Two pattern edges map to the same host edge.
    EdgeImagesNotDistinct {
        first: EdgeId,
        second: EdgeId,
        host_edge: EdgeId,
    },
    EdgeImageInsideBranch {
        edge: EdgeId,
        vertex: VertexId,
    },
    /// The image of a pattern edge does not join the branches of its ends.
    EdgeEndsMismatch {
        edge: EdgeId,
        host_edge: EdgeId,
    },
    DisconnectedBranch {
        vertex: VertexId,
        components: usize,
    },
    UnexpectedPatternElement {
        detail: String,
    },
    /// An augmented branch differs from the base branch where it must agree.
    BranchChanged {
        vertex: VertexId,
    },
    BranchNotExtended {
        vertex: VertexId,
    },
    RootMissing {
        vertex: VertexId,
    },
    EdgeImageChanged {
        edge: EdgeId,
    },
    RootInBranch {
        vertex: VertexId,
        root: VertexId,
    },
    TangleIncomplete {
        separation: usize,
    },
    TangleMemberTooLarge {
        separation: usize,
        order: usize,
    },
    TangleCover {
        members: [usize; 3],
    },
    TangleFullSide {
        member: usize,
    },
    RowImageInSmallSide {
        separation: usize,
        row: u32,
        order: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            MissingBranch { vertex } => write!(f, "pattern vertex {vertex} has no branch"),
            NullBranch { vertex } => write!(f, "branch of {vertex} is null"),
            BranchNotInHost { vertex, detail } => {
                write!(f, "branch of {vertex} is not a subgraph of the host: {detail}")
            }
            BranchesOverlap { first, second, shared } => write!(
                f,
                "branches are not pairwise vertex-disjoint: {first} and {second} share {shared}"
            ),
            MissingEdgeImage { edge } => write!(f, "pattern edge {edge} has no image"),
            UnknownHostEdge { edge, host_edge } => {
                write!(f, "pattern edge {edge} maps to missing host edge {host_edge}")
            }
            EdgeImagesNotDistinct { first, second, host_edge } => write!(
                f,
                "edge images are not distinct: {first} and {second} both map to {host_edge}"
            ),
            EdgeImageInsideBranch { edge, vertex } => {
                write!(f, "image of pattern edge {edge} lies inside the branch of {vertex}")
            }
            EdgeEndsMismatch { edge, host_edge } => write!(
                f,
                "host edge {host_edge} does not join the branches of the ends of pattern edge {edge}"
            ),
            DisconnectedBranch { vertex, components } => {
                write!(f, "branch of {vertex} is not connected ({components} components)")
            }
            UnexpectedPatternElement { detail } => write!(f, "pattern mismatch: {detail}"),
            BranchChanged { vertex } => write!(f, "branch of {vertex} must be unchanged"),
            BranchNotExtended { vertex } => {
                write!(f, "augmented branch of {vertex} does not contain the base branch")
            }
            RootMissing { vertex } => write!(f, "augmented branch of {vertex} contains no root"),
            EdgeImageChanged { edge } => write!(f, "image of pattern edge {edge} changed"),
            RootInBranch { vertex, root } => write!(f, "branch of {vertex} contains root {root}"),
            TangleIncomplete { separation } => {
                write!(f, "neither orientation of separation #{separation} is a member")
            }
            TangleMemberTooLarge { separation, order } => {
                write!(f, "member #{separation} has order {order}, not below the tangle order")
            }
            TangleCover { members } => write!(
                f,
                "small sides of members #{} #{} #{} cover the graph",
                members[0], members[1], members[2]
            ),
            TangleFullSide { member } => {
                write!(f, "small side of member #{member} contains every vertex")
            }
            RowImageInSmallSide { separation, row, order } => write!(
                f,
                "row {row} image lies in the small side of separation #{separation} of order {order}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
