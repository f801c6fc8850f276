//! Pseudomodels and models of a pattern graph in a host graph, their
//! validation, images, restriction, and root augmentation of grid models.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{GridError, ModelError};
use crate::graph::{EdgeId, Graph, Path, Subgraph, VertexId};
use crate::grid::{grid_graph, GridAtlas, GridCoord, GridSpec};
use crate::report::{ValidationReport, Violation};

/// Maps every pattern vertex to a branch subgraph of the host and every
/// pattern edge to a host edge.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Pseudomodel {
    pub pattern: Graph,
    pub branches: BTreeMap<VertexId, Subgraph>,
    pub edge_images: BTreeMap<EdgeId, EdgeId>,
}

/// A pseudomodel whose branches are all connected. The type is the same;
/// `validate_model` is what distinguishes the two.
pub type Model = Pseudomodel;

impl Pseudomodel {
    pub fn branch(&self, v: VertexId) -> Option<&Subgraph> {
        self.branches.get(&v)
    }

    pub fn image_of_vertices<'a, I>(&self, f: I) -> Result<BTreeSet<VertexId>, ModelError>
    where
        I: IntoIterator<Item = &'a VertexId>,
    {
        let mut out = BTreeSet::new();
        for v in f {
            let b = self
                .branches
                .get(v)
                .ok_or(ModelError::UnknownPatternVertex(*v))?;
            out.extend(b.vertices.iter().copied());
        }
        Ok(out)
    }

    /// Union of the branches of `f`'s vertices and the images of its edges,
    /// together with their host endpoints.
    pub fn image_of_subgraph(&self, host: &Graph, f: &Subgraph) -> Result<Subgraph, ModelError> {
        let mut out = Subgraph::null();
        for v in &f.vertices {
            let b = self
                .branches
                .get(v)
                .ok_or(ModelError::UnknownPatternVertex(*v))?;
            out = out.union(b);
        }
        for e in &f.edges {
            let he = *self
                .edge_images
                .get(e)
                .ok_or(ModelError::UnknownPatternEdge(*e))?;
            let (a, b) = host
                .endpoints(he)
                .ok_or(crate::error::GraphError::UnknownEdge(he))?;
            out.edges.insert(he);
            out.vertices.insert(a);
            out.vertices.insert(b);
        }
        Ok(out)
    }

    /// The pseudomodel of the pattern subgraph `h` obtained by restriction.
    pub fn restrict(&self, h: &Subgraph) -> Result<Pseudomodel, ModelError> {
        let pattern = self
            .pattern
            .restricted_to(h)
            .map_err(|e| ModelError::NotPatternSubgraph(e.to_string()))?;
        let branches = h
            .vertices
            .iter()
            .map(|v| {
                self.branches
                    .get(v)
                    .map(|b| (*v, b.clone()))
                    .ok_or(ModelError::UnknownPatternVertex(*v))
            })
            .collect::<Result<_, _>>()?;
        let edge_images = h
            .edges
            .iter()
            .map(|e| {
                self.edge_images
                    .get(e)
                    .map(|x| (*e, *x))
                    .ok_or(ModelError::UnknownPatternEdge(*e))
            })
            .collect::<Result<_, _>>()?;
        Ok(Pseudomodel {
            pattern,
            branches,
            edge_images,
        })
    }

    /// Which pattern vertex's branch contains each host vertex.
    pub fn vertex_owners(&self) -> BTreeMap<VertexId, VertexId> {
        let mut out = BTreeMap::new();
        for (&v, b) in &self.branches {
            for &x in &b.vertices {
                out.entry(x).or_insert(v);
            }
        }
        out
    }
}

pub fn validate_pseudomodel(p: &Pseudomodel, host: &Graph) -> ValidationReport {
    let mut report = ValidationReport::default();

    for &v in p.pattern.vertices() {
        match p.branches.get(&v) {
            None => report.push(Violation::MissingBranch { vertex: v }),
            Some(b) if b.vertices.is_empty() => report.push(Violation::NullBranch { vertex: v }),
            Some(b) => {
                if let Err(e) = b.check_in(host) {
                    report.push(Violation::BranchNotInHost {
                        vertex: v,
                        detail: e.to_string(),
                    });
                }
            }
        }
    }
    for &v in p.branches.keys() {
        if !p.pattern.has_vertex(v) {
            report.push(Violation::UnexpectedPatternElement {
                detail: format!("branch given for non-pattern vertex {v}"),
            });
        }
    }

    let mut owner: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for (&v, b) in &p.branches {
        for &x in &b.vertices {
            if let Some(&first) = owner.get(&x) {
                report.push(Violation::BranchesOverlap {
                    first,
                    second: v,
                    shared: x,
                });
            } else {
                owner.insert(x, v);
            }
        }
    }
    let mut edge_owner: BTreeMap<EdgeId, VertexId> = BTreeMap::new();
    for (&v, b) in &p.branches {
        for &e in &b.edges {
            edge_owner.entry(e).or_insert(v);
        }
    }

    let mut image_owner: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    for (e, u, v) in p.pattern.edges() {
        let Some(&he) = p.edge_images.get(&e) else {
            report.push(Violation::MissingEdgeImage { edge: e });
            continue;
        };
        if let Some(&first) = image_owner.get(&he) {
            report.push(Violation::EdgeImagesNotDistinct {
                first,
                second: e,
                host_edge: he,
            });
        } else {
            image_owner.insert(he, e);
        }
        if let Some(&w) = edge_owner.get(&he) {
            report.push(Violation::EdgeImageInsideBranch { edge: e, vertex: w });
        }
        let Some((a, b)) = host.endpoints(he) else {
            report.push(Violation::UnknownHostEdge {
                edge: e,
                host_edge: he,
            });
            continue;
        };
        let in_branch = |x: VertexId, w: VertexId| {
            p.branches
                .get(&w)
                .is_some_and(|br| br.vertices.contains(&x))
        };
        let ok = if u == v {
            in_branch(a, u) && in_branch(b, u)
        } else {
            (in_branch(a, u) && in_branch(b, v)) || (in_branch(a, v) && in_branch(b, u))
        };
        if !ok {
            report.push(Violation::EdgeEndsMismatch {
                edge: e,
                host_edge: he,
            });
        }
    }
    for &e in p.edge_images.keys() {
        if !p.pattern.has_edge(e) {
            report.push(Violation::UnexpectedPatternElement {
                detail: format!("image given for non-pattern edge {e}"),
            });
        }
    }
    report
}

pub fn validate_model(m: &Model, host: &Graph) -> ValidationReport {
    let mut report = validate_pseudomodel(m, host);
    for (&v, b) in &m.branches {
        if b.vertices.is_empty() || b.check_in(host).is_err() {
            continue;
        }
        let parts = b.components(host).len();
        if parts != 1 {
            report.push(Violation::DisconnectedBranch {
                vertex: v,
                components: parts,
            });
        }
    }
    report
}

/// Each grid vertex mapped to itself and each grid edge to itself.
pub fn identity_grid_model(spec: GridSpec) -> (Graph, Model) {
    let g = grid_graph(spec);
    let m = Pseudomodel {
        pattern: g.clone(),
        branches: g
            .vertices()
            .iter()
            .map(|&v| (v, Subgraph::from_vertices([v])))
            .collect(),
        edge_images: g.edge_ids().map(|e| (e, e)).collect(),
    };
    (g, m)
}

/// Re-indexes the restriction of `p` to the inner `g x g` block of `atlas`
/// as a pseudomodel of the grid `G_g` with its own coordinates.
pub fn relabel_inner_grid(p: &Pseudomodel, atlas: &GridAtlas) -> Result<Pseudomodel, ModelError> {
    let small = GridSpec::new(atlas.g)?;
    let big = atlas.spec;
    let mut branches = BTreeMap::new();
    for a in 1..=atlas.g {
        for b in 1..=atlas.g {
            let src = big.id(atlas.inner_coord(a, b));
            let br = p
                .branches
                .get(&src)
                .ok_or(ModelError::UnknownPatternVertex(src))?;
            branches.insert(small.vertex(a, b), br.clone());
        }
    }
    let mut edge_images = BTreeMap::new();
    for (id, x, y) in small.edge_list() {
        let src = big.edge_between(atlas.inner_coord(x.i, x.j), atlas.inner_coord(y.i, y.j))?;
        let he = *p
            .edge_images
            .get(&src)
            .ok_or(ModelError::UnknownPatternEdge(src))?;
        edge_images.insert(id, he);
    }
    Ok(Pseudomodel {
        pattern: grid_graph(small),
        branches,
        edge_images,
    })
}

/// Extends the first `paths.len()` branches of the first column of a grid
/// model: branch `(i, 1)` absorbs path `i`. Each path must start at a root,
/// end in its branch, avoid every other branch and every other path, and
/// use no edge that is an edge image.
pub fn apply_augmentation(
    base: &Model,
    pattern: GridSpec,
    host: &Graph,
    paths: &[Path],
    roots: &BTreeSet<VertexId>,
) -> Result<Model, ModelError> {
    let fail = |m: String| Err(ModelError::Augmentation(m));
    if paths.len() > pattern.n() as usize {
        return fail(format!(
            "{} paths for a grid of side {}",
            paths.len(),
            pattern.n()
        ));
    }
    let images: BTreeSet<EdgeId> = base.edge_images.values().copied().collect();
    let owners = base.vertex_owners();
    let mut used: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (idx, p) in paths.iter().enumerate() {
        let i = idx as u32 + 1;
        let target = pattern.vertex(i, 1);
        if let Err(e) = p.check_in(host) {
            return fail(format!("path {i}: {e}"));
        }
        let (start, end) = (p.first().unwrap(), p.last().unwrap());
        if !roots.contains(&start) {
            return fail(format!("path {i} does not start at a root"));
        }
        if owners.get(&end) != Some(&target) {
            return fail(format!("path {i} does not end in the branch of (i, 1)"));
        }
        for (pos, &x) in p.vertices.iter().enumerate() {
            if let Some(&o) = owners.get(&x) {
                if pos + 1 != p.vertices.len() {
                    return fail(format!("path {i} meets the branch of {o} before its end"));
                }
            }
            if let Some(other) = used.insert(x, idx) {
                return fail(format!("paths {} and {i} share vertex {x}", other + 1));
            }
        }
        if let Some(e) = p.edges.iter().find(|e| images.contains(e)) {
            return fail(format!("path {i} uses edge image {e}"));
        }
    }
    let mut out = base.clone();
    for (idx, p) in paths.iter().enumerate() {
        let v = pattern.vertex(idx as u32 + 1, 1);
        let br = out.branches.get_mut(&v).expect("first-column branch");
        *br = br.union(&p.to_subgraph());
    }
    Ok(out)
}

/// How the coordinates of the output grid sit inside the input grid:
/// output `(a, b)` is input `(i0 + a - 1, j0 + b - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    pub n: u32,
    pub i0: u32,
    pub j0: u32,
}

impl Labeling {
    pub fn to_input(&self, c: GridCoord) -> GridCoord {
        GridCoord::new(self.i0 + c.i - 1, self.j0 + c.j - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentationWitness {
    /// Side of the output grid.
    pub pattern: GridSpec,
    pub base: Model,
    pub augmented: Model,
    pub roots: BTreeSet<VertexId>,
    pub labeling: Labeling,
}

/// Checks that `augmented` is a root augmentation of `base`: branches
/// agree off the first `k` first-column vertices, those contain their base
/// branch and a root, edge images agree, and both are models in `host`.
pub fn check_augmentation(w: &AugmentationWitness, host: &Graph) -> ValidationReport {
    let mut report = ValidationReport::default();
    let g = w.pattern.n();
    let k = w.roots.len() as u32;
    if w.base.pattern != grid_graph(w.pattern) || w.augmented.pattern != w.base.pattern {
        report.push(Violation::UnexpectedPatternElement {
            detail: format!("patterns are not both the {g} x {g} grid"),
        });
        return report;
    }
    for i in 1..=g {
        for j in 1..=g {
            let v = w.pattern.vertex(i, j);
            let (Some(b), Some(a)) = (w.base.branch(v), w.augmented.branch(v)) else {
                continue;
            };
            if j == 1 && i <= k {
                if !b.is_subgraph_of(a) {
                    report.push(Violation::BranchNotExtended { vertex: v });
                }
                if a.vertices.is_disjoint(&w.roots) {
                    report.push(Violation::RootMissing { vertex: v });
                }
            } else if a != b {
                report.push(Violation::BranchChanged { vertex: v });
            }
        }
    }
    for (e, he) in &w.base.edge_images {
        if w.augmented.edge_images.get(e) != Some(he) {
            report.push(Violation::EdgeImageChanged { edge: *e });
        }
    }
    if w.augmented.edge_images.len() != w.base.edge_images.len() {
        report.push(Violation::UnexpectedPatternElement {
            detail: "augmented model has extra edge images".into(),
        });
    }
    report.extend(validate_model(&w.base, host));
    report.extend(validate_model(&w.augmented, host));
    report
}

/// Reports every branch of `m` that contains a root.
pub fn root_free_report(m: &Model, roots: &BTreeSet<VertexId>) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (&v, b) in &m.branches {
        if let Some(&z) = b.vertices.intersection(roots).next() {
            report.push(Violation::RootInBranch { vertex: v, root: z });
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternFile {
    pub n: u32,
    pub coords: Vec<GridCoord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchEntry {
    pub coord: GridCoord,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeImageEntry {
    pub edge: (GridCoord, GridCoord),
    pub host: EdgeId,
}

/// Interchange form of a pseudomodel whose pattern is a subgraph of an
/// `n x n` grid. The pattern's edges are the keys of `edgeImages`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelFile {
    pub pattern: PatternFile,
    pub branches: Vec<BranchEntry>,
    pub edge_images: Vec<EdgeImageEntry>,
}

impl ModelFile {
    pub fn from_grid_model(spec: GridSpec, p: &Pseudomodel) -> Result<Self, GridError> {
        let coords = p
            .pattern
            .vertices()
            .iter()
            .map(|&v| spec.coord(v))
            .collect::<Result<Vec<_>, _>>()?;
        let branches = p
            .branches
            .iter()
            .map(|(&v, b)| {
                Ok(BranchEntry {
                    coord: spec.coord(v)?,
                    vertices: b.vertices.iter().copied().collect(),
                    edges: b.edges.iter().copied().collect(),
                })
            })
            .collect::<Result<Vec<_>, GridError>>()?;
        let edge_images = p
            .pattern
            .edges()
            .filter_map(|(e, a, b)| p.edge_images.get(&e).map(|&he| (a, b, he)))
            .map(|(a, b, he)| {
                Ok(EdgeImageEntry {
                    edge: (spec.coord(a)?, spec.coord(b)?),
                    host: he,
                })
            })
            .collect::<Result<Vec<_>, GridError>>()?;
        Ok(ModelFile {
            pattern: PatternFile {
                n: spec.n(),
                coords,
            },
            branches,
            edge_images,
        })
    }

    pub fn to_grid_model(&self) -> Result<(GridSpec, Pseudomodel), ModelError> {
        let spec = GridSpec::new(self.pattern.n)?;
        let mut pattern = Graph::new();
        for &c in &self.pattern.coords {
            if !spec.contains(c) {
                return Err(GridError::IndexOutOfRange {
                    index: c.i.max(c.j),
                    n: spec.n(),
                }
                .into());
            }
            if !pattern.add_vertex(spec.id(c)) {
                return Err(ModelError::NotPatternSubgraph(format!(
                    "coordinate ({}, {}) listed twice",
                    c.i, c.j
                )));
            }
        }
        let mut edge_images = BTreeMap::new();
        for entry in &self.edge_images {
            let (a, b) = entry.edge;
            if !spec.contains(a) || !spec.contains(b) {
                return Err(GridError::NotAGridEdge(0, 0).into());
            }
            let id = spec.edge_between(a, b)?;
            pattern
                .add_edge(id, spec.id(a), spec.id(b))
                .map_err(|e| ModelError::NotPatternSubgraph(e.to_string()))?;
            edge_images.insert(id, entry.host);
        }
        let mut branches = BTreeMap::new();
        for entry in &self.branches {
            if !spec.contains(entry.coord) {
                return Err(GridError::IndexOutOfRange {
                    index: entry.coord.i,
                    n: spec.n(),
                }
                .into());
            }
            let v = spec.id(entry.coord);
            let b = Subgraph::new(entry.vertices.iter().copied(), entry.edges.iter().copied());
            if branches.insert(v, b).is_some() {
                return Err(ModelError::NotPatternSubgraph(format!(
                    "branch for ({}, {}) listed twice",
                    entry.coord.i, entry.coord.j
                )));
            }
        }
        Ok((
            spec,
            Pseudomodel {
                pattern,
                branches,
                edge_images,
            },
        ))
    }
}
