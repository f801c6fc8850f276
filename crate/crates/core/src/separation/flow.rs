//! Vertex-disjoint paths and minimum vertex cuts by unit augmenting paths
//! on the split network (`v_in -> v_out` with capacity 1 per vertex).
//!
//! Sources and targets are themselves cuttable: a super-source feeds every
//! `s_in` and every `t_out` drains to a super-sink. Breadth-first search
//! visits arcs in ascending neighbour identifier, so results are
//! reproducible.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::SeparationError;
use crate::graph::{EdgeId, Graph, Path, VertexId};

use super::Separation;

const INF: u32 = u32::MAX / 4;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: u32,
    rev: usize,
    /// Host edge carried by a `u_out -> v_in` arc.
    edge: Option<EdgeId>,
}

struct Network {
    ids: Vec<VertexId>,
    adj: Vec<Vec<Arc>>,
    source: usize,
    sink: usize,
}

impl Network {
    fn vin(i: usize) -> usize {
        2 * i
    }

    fn vout(i: usize) -> usize {
        2 * i + 1
    }

    fn index(&self, v: VertexId) -> Option<usize> {
        self.ids.binary_search(&v).ok()
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: u32, edge: Option<EdgeId>) {
        let rf = self.adj[to].len();
        let rt = self.adj[from].len() + usize::from(from == to);
        self.adj[from].push(Arc {
            to,
            cap,
            rev: rf,
            edge,
        });
        self.adj[to].push(Arc {
            to: from,
            cap: 0,
            rev: rt,
            edge: None,
        });
    }

    fn build(g: &Graph, sources: &BTreeSet<VertexId>, targets: &BTreeSet<VertexId>) -> Network {
        let ids: Vec<VertexId> = g.vertices().iter().copied().collect();
        let n = ids.len();
        let mut net = Network {
            ids,
            adj: vec![Vec::new(); 2 * n + 2],
            source: 2 * n,
            sink: 2 * n + 1,
        };
        let adjacency = g.adjacency();
        for i in 0..n {
            let v = net.ids[i];
            if sources.contains(&v) {
                net.add_arc(net.source, Self::vin(i), INF, None);
            }
            net.add_arc(Self::vin(i), Self::vout(i), 1, None);
            let mut last = None;
            for &(w, e) in adjacency.neighbours(v) {
                // first (least) edge id per neighbour; loops carry nothing
                if w == v || last == Some(w) {
                    continue;
                }
                last = Some(w);
                let j = net.index(w).expect("neighbour is a vertex");
                net.add_arc(Self::vout(i), Self::vin(j), INF, Some(e));
            }
            if targets.contains(&v) {
                net.add_arc(Self::vout(i), net.sink, INF, None);
            }
        }
        net
    }

    fn augment(&mut self) -> bool {
        let n = self.adj.len();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[self.source] = true;
        let mut queue = VecDeque::from([self.source]);
        while let Some(x) = queue.pop_front() {
            if x == self.sink {
                break;
            }
            for (ai, arc) in self.adj[x].iter().enumerate() {
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    parent[arc.to] = Some((x, ai));
                    queue.push_back(arc.to);
                }
            }
        }
        if !seen[self.sink] {
            return false;
        }
        let mut y = self.sink;
        while let Some((x, ai)) = parent[y] {
            self.adj[x][ai].cap -= 1;
            let rev = self.adj[x][ai].rev;
            self.adj[y][rev].cap += 1;
            y = x;
        }
        true
    }

    fn reach_from_source(&self) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[self.source] = true;
        let mut queue = VecDeque::from([self.source]);
        while let Some(x) = queue.pop_front() {
            for arc in &self.adj[x] {
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    queue.push_back(arc.to);
                }
            }
        }
        seen
    }

    fn reach_to_sink(&self) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[self.sink] = true;
        let mut queue = VecDeque::from([self.sink]);
        while let Some(y) = queue.pop_front() {
            for arc in &self.adj[y] {
                // arc.to can reach y if the reverse arc has capacity left
                let back = &self.adj[arc.to][arc.rev];
                if back.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    queue.push_back(arc.to);
                }
            }
        }
        seen
    }

    /// Splits the flow into vertex-disjoint host paths.
    fn paths(&self) -> Vec<Path> {
        let mut used: Vec<Vec<u32>> = self.adj.iter().map(|arcs| vec![0; arcs.len()]).collect();
        let flow_on = |x: usize, ai: usize| -> u32 {
            let arc = &self.adj[x][ai];
            // flow equals the residual capacity of the reverse arc on forward arcs
            if self.is_forward(x, ai) {
                self.adj[arc.to][arc.rev].cap
            } else {
                0
            }
        };
        let mut out = Vec::new();
        loop {
            let mut x = self.source;
            let mut vertices = Vec::new();
            let mut edges = Vec::new();
            let mut pending_edge = None;
            let mut advanced = false;
            while x != self.sink {
                let next = (0..self.adj[x].len()).find(|&ai| flow_on(x, ai) > used[x][ai]);
                let Some(ai) = next else { break };
                used[x][ai] += 1;
                advanced = true;
                let arc = &self.adj[x][ai];
                if let Some(e) = arc.edge {
                    pending_edge = Some(e);
                }
                let to = arc.to;
                if to < self.source && to % 2 == 0 {
                    if let Some(e) = pending_edge.take() {
                        edges.push(e);
                    }
                    vertices.push(self.ids[to / 2]);
                }
                x = to;
            }
            if !advanced || x != self.sink {
                break;
            }
            out.push(Path { vertices, edges });
        }
        out
    }

    fn is_forward(&self, x: usize, ai: usize) -> bool {
        let arc = &self.adj[x][ai];
        if arc.edge.is_some() {
            return true;
        }
        if x == self.source || arc.to == self.sink {
            return true;
        }
        x < self.source && x % 2 == 0 && arc.to == x + 1
    }
}

/// Result of a bounded max-flow run between two vertex sets.
#[derive(Debug, Clone)]
pub struct FlowOutcome {
    /// Vertex-disjoint source-target paths, trimmed so each contains exactly
    /// one source (its first vertex) and one target (its last vertex).
    pub paths: Vec<Path>,
    /// When fewer paths than the limit exist: the cut closest to the
    /// sources, and the cut closest to the targets together with the
    /// vertices strictly on the target side of it.
    pub source_cut: Option<BTreeSet<VertexId>>,
    pub target_cut: Option<(BTreeSet<VertexId>, BTreeSet<VertexId>)>,
}

/// Up to `limit` vertex-disjoint paths from `sources` to `targets` in `g`.
/// If fewer exist the two extreme minimum vertex cuts are reported too.
pub fn disjoint_paths(
    g: &Graph,
    sources: &BTreeSet<VertexId>,
    targets: &BTreeSet<VertexId>,
    limit: usize,
) -> FlowOutcome {
    let mut net = Network::build(g, sources, targets);
    let mut value = 0;
    while value < limit && net.augment() {
        value += 1;
    }
    let paths = net
        .paths()
        .into_iter()
        .map(|p| trim(p, sources, targets))
        .collect();
    if value >= limit {
        return FlowOutcome {
            paths,
            source_cut: None,
            target_cut: None,
        };
    }
    let from_s = net.reach_from_source();
    let to_t = net.reach_to_sink();
    let mut source_cut = BTreeSet::new();
    let mut target_cut = BTreeSet::new();
    let mut target_side = BTreeSet::new();
    for (i, &v) in net.ids.iter().enumerate() {
        let (vin, vout) = (Network::vin(i), Network::vout(i));
        if from_s[vin] && !from_s[vout] {
            source_cut.insert(v);
        }
        if to_t[vin] {
            target_side.insert(v);
        } else if to_t[vout] {
            target_cut.insert(v);
        }
    }
    FlowOutcome {
        paths,
        source_cut: Some(source_cut),
        target_cut: Some((target_cut, target_side)),
    }
}

/// Keeps the part of `p` between its last source before the first target
/// and that first target.
fn trim(p: Path, sources: &BTreeSet<VertexId>, targets: &BTreeSet<VertexId>) -> Path {
    let end = p
        .vertices
        .iter()
        .position(|v| targets.contains(v))
        .expect("flow path reaches a target");
    let start = p.vertices[..=end]
        .iter()
        .rposition(|v| sources.contains(v))
        .expect("flow path starts at a source");
    p.slice(start, end)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutResult {
    Paths(Vec<Path>),
    Cut {
        separator: BTreeSet<VertexId>,
        separation: Separation,
    },
}

impl CutResult {
    pub fn paths(&self) -> Option<&[Path]> {
        match self {
            CutResult::Paths(p) => Some(p),
            CutResult::Cut { .. } => None,
        }
    }
}

/// Either `k` vertex-disjoint paths from `sources` to `targets` in
/// `g - forbidden`, or a vertex set `X` with `|X| < k` meeting every such
/// path, with the separation of `g - forbidden` whose `A` side is `X` plus
/// everything reachable from the sources in `g - forbidden - X`.
pub fn menger(
    g: &Graph,
    sources: &BTreeSet<VertexId>,
    targets: &BTreeSet<VertexId>,
    k: usize,
    forbidden: &BTreeSet<VertexId>,
) -> Result<CutResult, SeparationError> {
    let bad = |m: &str| Err(SeparationError::MalformedInput(m.to_string()));
    if sources.is_empty() || targets.is_empty() {
        return bad("sources and targets must be non-empty");
    }
    if !sources.is_disjoint(forbidden) || !targets.is_disjoint(forbidden) {
        return bad("sources and targets must avoid the forbidden set");
    }
    if let Some(v) = sources.iter().chain(targets).find(|v| !g.has_vertex(**v)) {
        return Err(SeparationError::MalformedInput(format!(
            "vertex {v} not in graph"
        )));
    }
    let arena = if forbidden.is_empty() {
        g.clone()
    } else {
        g.without_vertices(forbidden)
    };
    let outcome = disjoint_paths(&arena, sources, targets, k);
    let Some(separator) = outcome.source_cut else {
        return Ok(CutResult::Paths(outcome.paths));
    };
    let separation = cut_separation(&arena, sources, &separator)?;
    Ok(CutResult::Cut {
        separator,
        separation,
    })
}

/// The separation with `A = X ∪ {vertices reachable from sources in g - X}`.
pub(crate) fn cut_separation(
    g: &Graph,
    sources: &BTreeSet<VertexId>,
    separator: &BTreeSet<VertexId>,
) -> Result<Separation, SeparationError> {
    let adj = g.adjacency();
    let mut reach: BTreeSet<VertexId> = sources.difference(separator).copied().collect();
    let mut queue: VecDeque<VertexId> = reach.iter().copied().collect();
    while let Some(x) = queue.pop_front() {
        for &(y, _) in adj.neighbours(x) {
            if !separator.contains(&y) && reach.insert(y) {
                queue.push_back(y);
            }
        }
    }
    Separation::from_sides(g, &reach, separator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{grid_graph, GridSpec};

    fn set(xs: &[VertexId]) -> BTreeSet<VertexId> {
        xs.iter().copied().collect()
    }

    #[test]
    fn grid_columns_give_row_paths() {
        let s = GridSpec::new(3).unwrap();
        let g = grid_graph(s);
        let src: BTreeSet<_> = s.column(1).unwrap().into_iter().collect();
        let dst: BTreeSet<_> = s.column(3).unwrap().into_iter().collect();
        let r = menger(&g, &src, &dst, 3, &BTreeSet::new()).unwrap();
        let paths = r.paths().expect("paths");
        assert_eq!(paths.len(), 3);
        for p in paths {
            p.check_in(&g).unwrap();
            assert!(src.contains(&p.first().unwrap()));
            assert!(dst.contains(&p.last().unwrap()));
        }
        let mut rows: Vec<_> = paths.iter().map(|p| p.vertices.clone()).collect();
        rows.sort();
        assert_eq!(rows, vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
    }

    #[test]
    fn single_interior_vertex_is_the_cut() {
        let g = Graph::from_parts([1, 2, 3], [(0, 1, 2), (1, 2, 3)]).unwrap();
        let r = menger(&g, &set(&[1]), &set(&[3]), 2, &BTreeSet::new()).unwrap();
        match r {
            CutResult::Cut {
                separator,
                separation,
            } => {
                assert_eq!(separator, set(&[1]));
                assert_eq!(separation.order(), 1);
            }
            other => panic!("expected a cut, got {other:?}"),
        }
    }

    #[test]
    fn different_components_give_empty_cut() {
        let g = Graph::from_parts([1, 2, 3, 4], [(0, 1, 2), (1, 3, 4)]).unwrap();
        let r = menger(&g, &set(&[1]), &set(&[4]), 1, &BTreeSet::new()).unwrap();
        let CutResult::Cut {
            separator,
            separation,
        } = r
        else {
            panic!("expected cut")
        };
        assert!(separator.is_empty());
        assert_eq!(separation.order(), 0);
        assert_eq!(separation.a.vertices, set(&[1, 2]));
    }

    #[test]
    fn cut_vertex_between_two_blocks() {
        // z=10 joined to a,b; a,b joined to m; m joined to t
        let g = Graph::from_parts(
            [10, 1, 2, 3, 4],
            [(0, 10, 1), (1, 10, 2), (2, 1, 3), (3, 2, 3), (4, 3, 4)],
        )
        .unwrap();
        let out = disjoint_paths(&g, &set(&[10]), &set(&[4]), 2);
        assert_eq!(out.paths.len(), 1);
        assert_eq!(out.source_cut, Some(set(&[10])));
        // the target itself is cuttable, so the cut nearest the target is {4}
        let (x1, b_side) = out.target_cut.unwrap();
        assert_eq!(x1, set(&[4]));
        assert!(b_side.is_empty());
        let out = disjoint_paths(&g, &set(&[1, 2]), &set(&[4]), 2);
        assert_eq!(out.source_cut, Some(set(&[3])));
    }

    #[test]
    fn forbidden_vertices_are_avoided() {
        let s = GridSpec::new(3).unwrap();
        let g = grid_graph(s);
        let r = menger(&g, &set(&[1, 3]), &set(&[7, 9]), 2, &set(&[5])).unwrap();
        let paths = r.paths().unwrap();
        assert_eq!(paths.len(), 2);
        assert!(paths.iter().all(|p| !p.vertices.contains(&5)));
        let r = menger(&g, &set(&[1]), &set(&[9]), 1, &set(&[2, 4])).unwrap();
        let CutResult::Cut {
            separator,
            separation,
        } = r
        else {
            panic!()
        };
        assert!(separator.is_empty());
        assert_eq!(separation.a.vertices, set(&[1]));
    }

    #[test]
    fn paths_contain_one_source_and_one_target() {
        // path 1-2-3-4 with sources {1,2}, targets {3,4}
        let g = Graph::from_parts([1, 2, 3, 4], [(0, 1, 2), (1, 2, 3), (2, 3, 4)]).unwrap();
        let out = disjoint_paths(&g, &set(&[1, 2]), &set(&[3, 4]), 5);
        assert_eq!(out.paths.len(), 1);
        assert_eq!(out.paths[0].vertices, vec![2, 3]);
    }

    #[test]
    fn shared_source_and_target() {
        let g = Graph::from_parts([1, 2], [(0, 1, 2)]).unwrap();
        let out = disjoint_paths(&g, &set(&[1]), &set(&[1, 2]), 2);
        assert_eq!(out.paths, vec![Path::trivial(1)]);
        assert_eq!(out.source_cut, Some(set(&[1])));
    }

    #[test]
    fn malformed_inputs() {
        let g = Graph::from_parts([1, 2], [(0, 1, 2)]).unwrap();
        assert!(menger(&g, &BTreeSet::new(), &set(&[2]), 1, &BTreeSet::new()).is_err());
        assert!(menger(&g, &set(&[1]), &set(&[2]), 1, &set(&[1])).is_err());
        assert!(menger(&g, &set(&[7]), &set(&[2]), 1, &BTreeSet::new()).is_err());
    }

    #[test]
    fn parallel_edges_and_loops() {
        let g = Graph::from_parts([1, 2, 3], [(5, 1, 2), (2, 1, 2), (3, 2, 2), (4, 2, 3)]).unwrap();
        let r = menger(&g, &set(&[1]), &set(&[3]), 1, &BTreeSet::new()).unwrap();
        let p = &r.paths().unwrap()[0];
        assert_eq!(p.edges, vec![2, 4]);
        p.check_in(&g).unwrap();
    }
}
