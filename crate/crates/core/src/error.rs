use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate edge {0}")]
    DuplicateEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("edge {0} has an end outside the subgraph")]
    DanglingEdge(EdgeId),
    #[error("edge {0} is a loop and cannot be contracted")]
    ContractLoop(EdgeId),
    #[error("malformed path")]
    MalformedPath,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid side must be at least 1")]
    EmptyGrid,
    #[error("index {index} outside 1..={n}")]
    IndexOutOfRange { index: u32, n: u32 },
    #[error("subgrid level {s} outside {lo}..={hi}")]
    LevelOutOfRange { s: u32, lo: u32, hi: u32 },
    #[error("atlas does not fit: {0}")]
    BadAtlas(String),
    #[error("vertex {0} is not a grid vertex")]
    NotAGridVertex(VertexId),
    #[error("vertices {0} and {1} are not adjacent in the grid")]
    NotAGridEdge(VertexId, VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown pattern vertex {0}")]
    UnknownPatternVertex(VertexId),
    #[error("unknown pattern edge {0}")]
    UnknownPatternEdge(EdgeId),
    #[error("not a subgraph of the pattern: {0}")]
    NotPatternSubgraph(String),
    #[error("augmentation precondition violated: {0}")]
    Augmentation(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeparationError {
    #[error("sides do not cover the graph")]
    NotCovering,
    #[error("sides share edge {0}")]
    SharedEdge(EdgeId),
    #[error("side is not a subgraph of the host: {0}")]
    BadSide(GraphError),
    #[error("malformed flow input: {0}")]
    MalformedInput(String),
    #[error("orientation is ambiguous: {0}")]
    AmbiguousOrientation(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
}
