//! Finite multigraphs with loops, value-like subgraphs, and the handful of
//! operations the extraction consumes: subgraph algebra, edge deletion,
//! edge contraction, components and boundary.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

pub type VertexId = u32;
pub type EdgeId = u32;

/// Undirected multigraph. Loops and parallel edges are allowed; edge
/// endpoints are stored with the smaller identifier first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, (VertexId, VertexId)>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (EdgeId, VertexId, VertexId)>,
    {
        let mut g = Graph::new();
        for v in vertices {
            if !g.vertices.insert(v) {
                return Err(GraphError::DuplicateVertex(v));
            }
        }
        for (id, u, v) in edges {
            g.add_edge(id, u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: VertexId) -> bool {
        self.vertices.insert(v)
    }

    pub fn add_edge(&mut self, id: EdgeId, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        for w in [u, v] {
            if !self.vertices.contains(&w) {
                return Err(GraphError::UnknownVertex(w));
            }
        }
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateEdge(id));
        }
        self.edges.insert(id, (u.min(v), u.max(v)));
        Ok(())
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, VertexId, VertexId)> + '_ {
        self.edges.iter().map(|(&id, &(u, v))| (id, u, v))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `|V| + |E|`, the quantity every reduction step strictly decreases.
    pub fn measure(&self) -> usize {
        self.vertices.len() + self.edges.len()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn endpoints(&self, e: EdgeId) -> Option<(VertexId, VertexId)> {
        self.edges.get(&e).copied()
    }

    pub fn max_vertex_id(&self) -> Option<VertexId> {
        self.vertices.iter().next_back().copied()
    }

    pub fn max_edge_id(&self) -> Option<EdgeId> {
        self.edges.keys().next_back().copied()
    }

    /// Neighbour lists sorted by (neighbour, edge id). Loops appear once.
    pub fn adjacency(&self) -> Adjacency {
        let mut adj: BTreeMap<VertexId, Vec<(VertexId, EdgeId)>> =
            self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for (&id, &(u, v)) in &self.edges {
            adj.get_mut(&u).expect("endpoint").push((v, id));
            if u != v {
                adj.get_mut(&v).expect("endpoint").push((u, id));
            }
        }
        for list in adj.values_mut() {
            list.sort_unstable();
        }
        Adjacency { lists: adj }
    }

    /// The whole graph as a subgraph of itself.
    pub fn as_subgraph(&self) -> Subgraph {
        Subgraph {
            vertices: self.vertices.clone(),
            edges: self.edges.keys().copied().collect(),
        }
    }

    /// The subgraph on `vertices` with every edge whose ends both lie in it.
    pub fn induced(&self, vertices: &BTreeSet<VertexId>) -> Subgraph {
        let edges = self
            .edges
            .iter()
            .filter(|(_, (u, v))| vertices.contains(u) && vertices.contains(v))
            .map(|(&id, _)| id)
            .collect();
        Subgraph {
            vertices: vertices.intersection(&self.vertices).copied().collect(),
            edges,
        }
    }

    /// Materialises a subgraph as a standalone graph (same identifiers).
    pub fn restricted_to(&self, h: &Subgraph) -> Result<Graph, GraphError> {
        h.check_in(self)?;
        Ok(Graph {
            vertices: h.vertices.clone(),
            edges: h.edges.iter().map(|e| (*e, self.edges[e])).collect(),
        })
    }

    /// The graph with the given vertices and all incident edges removed.
    pub fn without_vertices(&self, removed: &BTreeSet<VertexId>) -> Graph {
        Graph {
            vertices: self.vertices.difference(removed).copied().collect(),
            edges: self
                .edges
                .iter()
                .filter(|(_, (u, v))| !removed.contains(u) && !removed.contains(v))
                .map(|(&id, &ends)| (id, ends))
                .collect(),
        }
    }

    pub fn delete_edge(&self, f: EdgeId) -> Result<Graph, GraphError> {
        let mut g = self.clone();
        g.remove_edge(f)?;
        Ok(g)
    }

    pub(crate) fn remove_edge(&mut self, f: EdgeId) -> Result<(VertexId, VertexId), GraphError> {
        self.edges.remove(&f).ok_or(GraphError::UnknownEdge(f))
    }

    /// Contracts the non-loop edge `f`. The merged vertex keeps the smaller
    /// endpoint identifier; other edges between the two ends become loops.
    pub fn contract_edge(&self, f: EdgeId) -> Result<(Graph, Contraction), GraphError> {
        let mut g = self.clone();
        let c = g.contract_in_place(f)?;
        Ok((g, c))
    }

    pub(crate) fn contract_in_place(&mut self, f: EdgeId) -> Result<Contraction, GraphError> {
        let (u, v) = self.endpoints(f).ok_or(GraphError::UnknownEdge(f))?;
        if u == v {
            return Err(GraphError::ContractLoop(f));
        }
        // endpoints are normalised, so u is the survivor
        self.edges.remove(&f);
        self.vertices.remove(&v);
        for ends in self.edges.values_mut() {
            let a = if ends.0 == v { u } else { ends.0 };
            let b = if ends.1 == v { u } else { ends.1 };
            *ends = (a.min(b), a.max(b));
        }
        Ok(Contraction {
            edge: f,
            survivor: u,
            absorbed: v,
        })
    }
}

/// A path given by its vertex sequence and the edges joining consecutive
/// vertices. A single vertex with no edges is a path of length zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Path {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl Path {
    pub fn trivial(v: VertexId) -> Self {
        Path {
            vertices: vec![v],
            edges: Vec::new(),
        }
    }

    pub fn first(&self) -> Option<VertexId> {
        self.vertices.first().copied()
    }

    pub fn last(&self) -> Option<VertexId> {
        self.vertices.last().copied()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Checks that the vertices are distinct and each edge joins its two
    /// neighbours in the sequence.
    pub fn check_in(&self, host: &Graph) -> Result<(), GraphError> {
        if self.vertices.is_empty() || self.edges.len() + 1 != self.vertices.len() {
            return Err(GraphError::MalformedPath);
        }
        let distinct: BTreeSet<_> = self.vertices.iter().collect();
        if distinct.len() != self.vertices.len() {
            return Err(GraphError::MalformedPath);
        }
        for &v in &self.vertices {
            if !host.has_vertex(v) {
                return Err(GraphError::UnknownVertex(v));
            }
        }
        for (w, &e) in self.vertices.windows(2).zip(&self.edges) {
            let (a, b) = host.endpoints(e).ok_or(GraphError::UnknownEdge(e))?;
            if (a.min(b), a.max(b)) != (w[0].min(w[1]), w[0].max(w[1])) {
                return Err(GraphError::MalformedPath);
            }
        }
        Ok(())
    }

    pub fn to_subgraph(&self) -> Subgraph {
        Subgraph::new(self.vertices.iter().copied(), self.edges.iter().copied())
    }

    /// The sub-path between positions `from` and `to` inclusive.
    pub fn slice(&self, from: usize, to: usize) -> Path {
        Path {
            vertices: self.vertices[from..=to].to_vec(),
            edges: self.edges[from..to].to_vec(),
        }
    }

    /// Concatenates `self` (ending at `v`) with `next` (starting at `v`).
    pub fn join(&self, next: &Path) -> Path {
        debug_assert_eq!(self.last(), next.first());
        let mut out = self.clone();
        out.vertices.extend_from_slice(&next.vertices[1..]);
        out.edges.extend_from_slice(&next.edges);
        out
    }

    pub fn reversed(&self) -> Path {
        Path {
            vertices: self.vertices.iter().rev().copied().collect(),
            edges: self.edges.iter().rev().copied().collect(),
        }
    }
}

/// Record of a single edge contraction: `absorbed` was merged into `survivor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contraction {
    pub edge: EdgeId,
    pub survivor: VertexId,
    pub absorbed: VertexId,
}

impl Contraction {
    pub fn rename(&self, v: VertexId) -> VertexId {
        if v == self.absorbed {
            self.survivor
        } else {
            v
        }
    }

    /// The rename map restricted to the two merged endpoints.
    pub fn rename_map(&self) -> BTreeMap<VertexId, VertexId> {
        BTreeMap::from([
            (self.survivor, self.survivor),
            (self.absorbed, self.survivor),
        ])
    }

    /// Pulls a subgraph of the contracted graph back to the graph before
    /// contraction: the merged vertex expands to both ends plus `edge`.
    pub fn lift(&self, h: &Subgraph) -> Subgraph {
        let mut out = h.clone();
        if out.vertices.contains(&self.survivor) {
            out.vertices.insert(self.absorbed);
            out.edges.insert(self.edge);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Adjacency {
    lists: BTreeMap<VertexId, Vec<(VertexId, EdgeId)>>,
}

impl Adjacency {
    pub fn neighbours(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        self.lists.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// A vertex set and an edge set drawn from some host graph. Subgraphs are
/// plain values; operations that need edge endpoints take the host.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Subgraph {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
}

impl Subgraph {
    pub fn null() -> Self {
        Self::default()
    }

    pub fn from_vertices<I: IntoIterator<Item = VertexId>>(vs: I) -> Self {
        Subgraph {
            vertices: vs.into_iter().collect(),
            edges: BTreeSet::new(),
        }
    }

    pub fn new<V, E>(vs: V, es: E) -> Self
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = EdgeId>,
    {
        Subgraph {
            vertices: vs.into_iter().collect(),
            edges: es.into_iter().collect(),
        }
    }

    pub fn is_null(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty()
    }

    /// Checks that every element exists in `host` and every edge end is present.
    pub fn check_in(&self, host: &Graph) -> Result<(), GraphError> {
        if let Some(&v) = self.vertices.iter().find(|v| !host.has_vertex(**v)) {
            return Err(GraphError::UnknownVertex(v));
        }
        for &e in &self.edges {
            let (u, v) = host.endpoints(e).ok_or(GraphError::UnknownEdge(e))?;
            if !self.vertices.contains(&u) || !self.vertices.contains(&v) {
                return Err(GraphError::DanglingEdge(e));
            }
        }
        Ok(())
    }

    pub fn union(&self, other: &Subgraph) -> Subgraph {
        Subgraph {
            vertices: self.vertices.union(&other.vertices).copied().collect(),
            edges: self.edges.union(&other.edges).copied().collect(),
        }
    }

    pub fn intersection(&self, other: &Subgraph) -> Subgraph {
        Subgraph {
            vertices: self
                .vertices
                .intersection(&other.vertices)
                .copied()
                .collect(),
            edges: self.edges.intersection(&other.edges).copied().collect(),
        }
    }

    pub fn shares_vertex_with(&self, other: &Subgraph) -> bool {
        !self.vertices.is_disjoint(&other.vertices)
    }

    pub fn is_subgraph_of(&self, other: &Subgraph) -> bool {
        self.vertices.is_subset(&other.vertices) && self.edges.is_subset(&other.edges)
    }

    /// Connected pieces, each closed under the edges of `self`, ordered by
    /// least vertex identifier.
    pub fn components(&self, host: &Graph) -> Vec<Subgraph> {
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for &e in &self.edges {
            if let Some((u, v)) = host.endpoints(e) {
                adj.entry(u).or_default().push(v);
                adj.entry(v).or_default().push(u);
            }
        }
        let mut label: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut parts: Vec<Subgraph> = Vec::new();
        for &start in &self.vertices {
            if label.contains_key(&start) {
                continue;
            }
            let idx = parts.len();
            let mut part = Subgraph::null();
            let mut queue = VecDeque::from([start]);
            label.insert(start, idx);
            while let Some(x) = queue.pop_front() {
                part.vertices.insert(x);
                for &y in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                    if self.vertices.contains(&y) && !label.contains_key(&y) {
                        label.insert(y, idx);
                        queue.push_back(y);
                    }
                }
            }
            parts.push(part);
        }
        for &e in &self.edges {
            if let Some((u, _)) = host.endpoints(e) {
                if let Some(&i) = label.get(&u) {
                    parts[i].edges.insert(e);
                }
            }
        }
        parts
    }

    pub fn is_connected(&self, host: &Graph) -> bool {
        self.components(host).len() == 1
    }

    /// Vertices of `self` incident with an edge of `host` outside `self`.
    pub fn boundary(&self, host: &Graph) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for (id, u, v) in host.edges() {
            if self.edges.contains(&id) {
                continue;
            }
            for w in [u, v] {
                if self.vertices.contains(&w) {
                    out.insert(w);
                }
            }
        }
        out
    }
}

pub fn union(a: &Subgraph, b: &Subgraph) -> Subgraph {
    a.union(b)
}

pub fn intersection(a: &Subgraph, b: &Subgraph) -> Subgraph {
    a.intersection(b)
}

pub fn components(host: &Graph, h: &Subgraph) -> Vec<Subgraph> {
    h.components(host)
}

pub fn boundary(host: &Graph, h: &Subgraph) -> BTreeSet<VertexId> {
    h.boundary(host)
}

/// Interchange form of a graph: `{"vertices": [...], "edges": [[id, u, v], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(EdgeId, VertexId, VertexId)>,
}

impl From<&Graph> for GraphFile {
    fn from(g: &Graph) -> Self {
        GraphFile {
            vertices: g.vertices.iter().copied().collect(),
            edges: g.edges().collect(),
        }
    }
}

impl TryFrom<GraphFile> for Graph {
    type Error = GraphError;

    fn try_from(f: GraphFile) -> Result<Self, Self::Error> {
        Graph::from_parts(f.vertices, f.edges)
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let f = GraphFile::deserialize(d)?;
        Graph::try_from(f).map_err(serde::de::Error::custom)
    }
}
