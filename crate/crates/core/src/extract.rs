//! Rooted grid extraction.
//!
//! The induction on `|V(G)| + |E(G)|` runs as a loop: while a blocking
//! separation of order `k` or a removable edge exists, the instance is
//! shrunk and the step is logged. Once the instance is reduced, a band of
//! clean rows is chosen, the inner `g x g` block is taken as the output grid
//! and `k` disjoint paths attach the roots to its first column.
//!
//! The attaching paths are recomputed in the caller's host: the reduced
//! instance only decides which block to take. The reduced run's own paths
//! are kept in the trace.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::SeparationError;
use crate::graph::{Contraction, EdgeId, Graph, Path, Subgraph, VertexId};
use crate::grid::{choose_band, grid_graph, GridAtlas, GridCoord, GridSpec};
use crate::model::{
    apply_augmentation, check_augmentation, relabel_inner_grid, root_free_report, validate_model,
    validate_pseudomodel, AugmentationWitness, Labeling, Model, Pseudomodel,
};
use crate::par::Execution;
use crate::separation::{
    find_row_blocking_separation, find_strict_blocking_separation, menger, BlockingKind,
    BlockingSeparation, CutResult, Separation,
};

/// Lower bound on the side `n` of the input grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundPolicy {
    /// `n > k(g + 2k)`. A clean band of rows is not guaranteed; when none
    /// exists the run stops with [`ExtractError::NoCleanBand`].
    #[default]
    Tight,
    /// `n >= (k + 1)(g + 2k)`, enough for `k + 1` disjoint bands.
    Safe,
}

impl BoundPolicy {
    pub fn min_n(self, g: u32, k: u32) -> u32 {
        match self {
            BoundPolicy::Tight => k * (g + 2 * k) + 1,
            BoundPolicy::Safe => (k + 1) * (g + 2 * k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionProblem {
    pub host: Graph,
    pub roots: BTreeSet<VertexId>,
    /// The grid `G_n` the pattern lives in.
    pub spec: GridSpec,
    /// Pseudomodel of a subgraph `J` of `G_n`.
    pub model: Pseudomodel,
    pub g: u32,
    pub k: u32,
    pub bound: BoundPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Reduction {
    /// Restrict to the `B` side of an order-`k` blocking separation; the
    /// separator becomes the new root set.
    SeparationRecursion { row: u32, separation: Separation },
    /// Remove an edge used by no branch and no edge image.
    EdgeDelete { edge: EdgeId },
    /// Remove a loop, or an edge between two roots, from a branch.
    BranchEdgeDelete { edge: EdgeId, branch: VertexId },
    BranchEdgeContract {
        edge: EdgeId,
        branch: VertexId,
        contraction: Contraction,
    },
    BandSelected {
        atlas: GridAtlas,
        forbidden: Vec<GridCoord>,
    },
    /// Paths found in the reduced instance and the paths delivered in the
    /// input host, in first-column order.
    MengerAugment {
        reduced_paths: Vec<Path>,
        paths: Vec<Path>,
    },
}

impl Reduction {
    /// Separation and edge steps; these must shrink the instance.
    pub fn is_shrinking(&self) -> bool {
        !matches!(
            self,
            Reduction::BandSelected { .. } | Reduction::MengerAugment { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionRecord {
    pub step: usize,
    pub measure_before: usize,
    pub measure_after: usize,
    #[serde(flatten)]
    pub reduction: Reduction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionResult {
    pub atlas: GridAtlas,
    pub witness: AugmentationWitness,
    /// The attaching paths; path `i` joins a root to the branch of `(i, 1)`.
    pub paths: Vec<Path>,
    pub trace: Vec<ReductionRecord>,
}

impl ExtractionResult {
    /// Input-grid coordinates of the output grid, row by row.
    pub fn subgrid(&self) -> Vec<GridCoord> {
        let g = self.atlas.g;
        (1..=g)
            .flat_map(|a| (1..=g).map(move |b| (a, b)))
            .map(|(a, b)| self.atlas.inner_coord(a, b))
            .collect()
    }

    /// Output model of `G_g` with the roots attached.
    pub fn model(&self) -> &Model {
        &self.witness.augmented
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum HypothesisCertificate {
    Holds,
    Violated { certificate: BlockingSeparation },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("hypothesis violated: separation of order {} cuts the roots from row {}", .0.order(), .0.row)]
    HypothesisViolated(Box<BlockingSeparation>),
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("no band of clean rows (forbidden rows {forbidden_rows:?})")]
    NoCleanBand {
        forbidden_rows: Vec<u32>,
        trace: Vec<ReductionRecord>,
    },
    #[error("internal invariant broken: {reason}")]
    InternalInvariantBroken {
        reason: String,
        trace: Vec<ReductionRecord>,
    },
    #[error("replay failed at record {step}: {reason}")]
    Replay { step: usize, reason: String },
}

impl ExtractError {
    pub fn trace(&self) -> Option<&[ReductionRecord]> {
        match self {
            ExtractError::NoCleanBand { trace, .. }
            | ExtractError::InternalInvariantBroken { trace, .. } => Some(trace),
            _ => None,
        }
    }
}

/// Rows of `G_n` all of whose vertices are pattern vertices, with those
/// vertices.
pub fn full_rows(spec: GridSpec, pattern: &Graph) -> Vec<(u32, Vec<VertexId>)> {
    (1..=spec.n())
        .map(|i| (i, spec.row(i).expect("row in range")))
        .filter(|(_, r)| r.iter().all(|v| pattern.has_vertex(*v)))
        .collect()
}

/// Pattern vertices whose branch meets `roots`.
fn root_owners(model: &Pseudomodel, roots: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    model
        .branches
        .iter()
        .filter(|(_, b)| !b.vertices.is_disjoint(roots))
        .map(|(&v, _)| v)
        .collect()
}

/// Boundary of the pattern inside `G_n`.
fn pattern_boundary(spec: GridSpec, pattern: &Graph) -> BTreeSet<VertexId> {
    pattern.as_subgraph().boundary(&grid_graph(spec))
}

/// Checks hypothesis (ii) exactly: no separation of order below `k` puts
/// the roots in `V(A)` and the image of a full pattern row in `V(B)`.
pub fn check_hypothesis(
    host: &Graph,
    roots: &BTreeSet<VertexId>,
    model: &Pseudomodel,
    spec: GridSpec,
    k: usize,
    exec: Execution,
) -> Result<HypothesisCertificate, SeparationError> {
    let rows = full_rows(spec, &model.pattern);
    Ok(
        match find_strict_blocking_separation(host, roots, model, &rows, k, exec)? {
            Some(certificate) => HypothesisCertificate::Violated { certificate },
            None => HypothesisCertificate::Holds,
        },
    )
}

impl ExtractionProblem {
    /// Everything the run relies on except hypothesis (ii).
    pub fn validate(&self) -> Result<(), ExtractError> {
        let bad = |m: String| Err(ExtractError::MalformedInput(m));
        let (g, k, n) = (self.g, self.k, self.spec.n());
        if k < 1 || k > g {
            return bad(format!("need 1 <= k <= g, got k = {k}, g = {g}"));
        }
        let min_n = self.bound.min_n(g, k);
        if n < min_n {
            return bad(format!("grid side {n} is below the required {min_n}"));
        }
        if self.roots.len() != k as usize {
            return bad(format!("{} roots given, expected {k}", self.roots.len()));
        }
        if let Some(z) = self.roots.iter().find(|z| !self.host.has_vertex(**z)) {
            return bad(format!("root {z} is not a host vertex"));
        }
        let grid = grid_graph(self.spec);
        for &v in self.model.pattern.vertices() {
            if !grid.has_vertex(v) {
                return bad(format!(
                    "pattern vertex {v} is not a vertex of the {n} x {n} grid"
                ));
            }
        }
        for (e, u, v) in self.model.pattern.edges() {
            if grid.endpoints(e) != Some((u, v)) {
                return bad(format!(
                    "pattern edge {e} is not the grid edge with that identifier"
                ));
            }
        }
        let report = validate_pseudomodel(&self.model, &self.host);
        if !report.is_valid() {
            return bad(format!("not a pseudomodel: {report}"));
        }
        if full_rows(self.spec, &self.model.pattern).is_empty() {
            return bad("the pattern contains no full row".into());
        }
        let beta = pattern_boundary(self.spec, &self.model.pattern);
        for (&v, b) in &self.model.branches {
            let connected_inside = b.is_connected(&self.host) && !beta.contains(&v);
            let rooted = b
                .components(&self.host)
                .iter()
                .all(|c| !c.vertices.is_disjoint(&self.roots));
            if !connected_inside && !rooted {
                return bad(format!(
                    "branch of pattern vertex {v} is neither connected off the boundary nor rooted in every component"
                ));
            }
        }
        Ok(())
    }

    fn initial_state(&self) -> State {
        State {
            host: self.host.clone(),
            roots: self.roots.clone(),
            model: self.model.clone(),
        }
    }
}

#[derive(Debug, Clone)]
struct State {
    host: Graph,
    roots: BTreeSet<VertexId>,
    model: Pseudomodel,
}

impl State {
    fn measure(&self) -> usize {
        self.host.measure()
    }

    fn branch_of_edge(&self) -> BTreeMap<EdgeId, VertexId> {
        let mut out = BTreeMap::new();
        for (&v, b) in &self.model.branches {
            for &e in &b.edges {
                out.insert(e, v);
            }
        }
        out
    }

    /// The least removable edge, by kind and then by identifier.
    fn next_edge_reduction(&self) -> Option<Reduction> {
        let images: BTreeSet<EdgeId> = self.model.edge_images.values().copied().collect();
        let owners = self.branch_of_edge();
        let free = self
            .host
            .edge_ids()
            .find(|e| !images.contains(e) && !owners.contains_key(e));
        if let Some(edge) = free {
            return Some(Reduction::EdgeDelete { edge });
        }
        let mut contract = None;
        for (&edge, &branch) in &owners {
            let (u, v) = self.host.endpoints(edge)?;
            if u == v || (self.roots.contains(&u) && self.roots.contains(&v)) {
                return Some(Reduction::BranchEdgeDelete { edge, branch });
            }
            if contract.is_none() {
                contract = Some(Reduction::BranchEdgeContract {
                    edge,
                    branch,
                    contraction: Contraction {
                        edge,
                        survivor: u,
                        absorbed: v,
                    },
                });
            }
        }
        contract
    }

    fn apply(&mut self, r: &Reduction, k: usize) -> Result<(), String> {
        match r {
            Reduction::SeparationRecursion { separation, .. } => {
                separation.check(&self.host).map_err(|e| e.to_string())?;
                if separation.order() != k {
                    return Err(format!(
                        "separation has order {}, not {k}",
                        separation.order()
                    ));
                }
                if !self.roots.is_subset(&separation.a.vertices) {
                    return Err("roots are not in V(A)".into());
                }
                if separation.b == self.host.as_subgraph() {
                    return Err("B is the whole graph".into());
                }
                self.recurse_into(separation)
            }
            Reduction::EdgeDelete { edge } => {
                let images: BTreeSet<EdgeId> = self.model.edge_images.values().copied().collect();
                if images.contains(edge) || self.branch_of_edge().contains_key(edge) {
                    return Err(format!("edge {edge} is used by the model"));
                }
                self.host.remove_edge(*edge).map_err(|e| e.to_string())?;
                Ok(())
            }
            Reduction::BranchEdgeDelete { edge, branch } => {
                let (u, v) = self.branch_edge(*edge, *branch)?;
                if u != v && !(self.roots.contains(&u) && self.roots.contains(&v)) {
                    return Err(format!("edge {edge} is neither a loop nor between roots"));
                }
                self.host.remove_edge(*edge).map_err(|e| e.to_string())?;
                self.model
                    .branches
                    .get_mut(branch)
                    .expect("checked")
                    .edges
                    .remove(edge);
                Ok(())
            }
            Reduction::BranchEdgeContract {
                edge,
                branch,
                contraction,
            } => {
                let (u, v) = self.branch_edge(*edge, *branch)?;
                if u == v || (self.roots.contains(&u) && self.roots.contains(&v)) {
                    return Err(format!("edge {edge} must be deleted, not contracted"));
                }
                let c = self
                    .host
                    .contract_in_place(*edge)
                    .map_err(|e| e.to_string())?;
                if &c != contraction {
                    return Err(format!("contraction of {edge} differs from the record"));
                }
                let b = self.model.branches.get_mut(branch).expect("checked");
                b.edges.remove(edge);
                b.vertices.remove(&c.absorbed);
                self.roots = self.roots.iter().map(|&z| c.rename(z)).collect();
                Ok(())
            }
            Reduction::BandSelected { .. } | Reduction::MengerAugment { .. } => Ok(()),
        }
    }

    fn branch_edge(&self, edge: EdgeId, branch: VertexId) -> Result<(VertexId, VertexId), String> {
        let inside = self
            .model
            .branches
            .get(&branch)
            .is_some_and(|b| b.edges.contains(&edge));
        if !inside {
            return Err(format!("edge {edge} is not in the branch of {branch}"));
        }
        self.host
            .endpoints(edge)
            .ok_or_else(|| format!("edge {edge} is not in the host"))
    }

    /// Replaces the instance by its restriction to `B`, with roots
    /// `V(A ∩ B)`. Pattern vertices keep their branch's part in `B`; pattern
    /// edges survive when some end's branch misses `V(A)`.
    fn recurse_into(&mut self, s: &Separation) -> Result<(), String> {
        let host = self.host.restricted_to(&s.b).map_err(|e| e.to_string())?;
        let in_a = |v: &VertexId| {
            self.model
                .branches
                .get(v)
                .is_some_and(|b| !b.vertices.is_disjoint(&s.a.vertices))
        };
        let mut keep = Subgraph::null();
        let mut branches = BTreeMap::new();
        for (&v, b) in &self.model.branches {
            let part = b.intersection(&s.b);
            if !part.is_null() {
                keep.vertices.insert(v);
                branches.insert(v, part);
            }
        }
        let mut edge_images = BTreeMap::new();
        for (e, u, v) in self.model.pattern.edges() {
            if !in_a(&u) || !in_a(&v) {
                if !keep.vertices.contains(&u) || !keep.vertices.contains(&v) {
                    return Err(format!("pattern edge {e} keeps an end outside B"));
                }
                keep.edges.insert(e);
                edge_images.insert(e, self.model.edge_images[&e]);
            }
        }
        let pattern = self
            .model
            .pattern
            .restricted_to(&keep)
            .map_err(|e| e.to_string())?;
        self.model = Pseudomodel {
            pattern,
            branches,
            edge_images,
        };
        self.roots = s.separator();
        self.host = host;
        Ok(())
    }
}

pub fn extract(problem: &ExtractionProblem) -> Result<ExtractionResult, ExtractError> {
    extract_with(problem, Execution::default())
}

pub fn extract_with(
    problem: &ExtractionProblem,
    exec: Execution,
) -> Result<ExtractionResult, ExtractError> {
    problem.validate()?;
    let k = problem.k as usize;
    let malformed = |e: SeparationError| ExtractError::MalformedInput(e.to_string());
    if let HypothesisCertificate::Violated { certificate } = check_hypothesis(
        &problem.host,
        &problem.roots,
        &problem.model,
        problem.spec,
        k,
        exec,
    )
    .map_err(malformed)?
    {
        return Err(ExtractError::HypothesisViolated(Box::new(certificate)));
    }

    let mut state = problem.initial_state();
    let mut trace = Vec::new();
    loop {
        let broken =
            |reason: String, trace: &Vec<ReductionRecord>| ExtractError::InternalInvariantBroken {
                reason,
                trace: trace.clone(),
            };
        let rows = full_rows(problem.spec, &state.model.pattern);
        if rows.is_empty() {
            return Err(broken("the reduced pattern has no full row".into(), &trace));
        }
        let blocking =
            find_row_blocking_separation(&state.host, &state.roots, &state.model, &rows, k, exec)
                .map_err(|e| broken(e.to_string(), &trace))?;
        let reduction = match blocking {
            Some(b) if b.kind == BlockingKind::Strict => {
                return Err(broken(
                    format!(
                        "separation of order {} below k appeared after reduction",
                        b.order()
                    ),
                    &trace,
                ))
            }
            Some(b) => Reduction::SeparationRecursion {
                row: b.row,
                separation: b.separation,
            },
            None => match state.next_edge_reduction() {
                Some(r) => r,
                None => break,
            },
        };
        let before = state.measure();
        state.apply(&reduction, k).map_err(|e| broken(e, &trace))?;
        let record = ReductionRecord {
            step: trace.len(),
            measure_before: before,
            measure_after: state.measure(),
            reduction,
        };
        if record.measure_after >= record.measure_before {
            trace.push(record);
            return Err(broken(
                "reduction did not shrink the instance".into(),
                &trace,
            ));
        }
        trace.push(record);
    }
    finish(problem, &state, trace)
}

/// Steps after the last reduction: band choice, the disjoint-paths step in
/// the reduced instance and the attaching paths in the input host.
fn finish(
    problem: &ExtractionProblem,
    state: &State,
    mut trace: Vec<ReductionRecord>,
) -> Result<ExtractionResult, ExtractError> {
    let (spec, g, k) = (problem.spec, problem.g, problem.k as usize);
    macro_rules! broken {
        ($($arg:tt)*) => {
            return Err(ExtractError::InternalInvariantBroken {
                reason: format!($($arg)*),
                trace,
            })
        };
    }
    for (&v, b) in &state.model.branches {
        if b.vertices.len() != 1 && !b.vertices.is_subset(&state.roots) {
            broken!(
                "branch of {v} has {} vertices after reduction",
                b.vertices.len()
            );
        }
    }
    let forbidden = root_owners(&state.model, &state.roots);
    if forbidden.len() > k {
        broken!("{} pattern vertices own roots", forbidden.len());
    }
    let beta = pattern_boundary(spec, &state.model.pattern);
    if !beta.is_subset(&forbidden) {
        broken!("pattern boundary is not inside the root-owning vertices");
    }
    let atlas = match choose_band(spec, g, k as u32, &forbidden) {
        Ok(Some(a)) => a,
        Ok(None) if problem.bound == BoundPolicy::Tight => {
            let mut rows: Vec<u32> = forbidden
                .iter()
                .map(|&v| spec.coord(v).expect("grid vertex").i)
                .collect();
            rows.dedup();
            return Err(ExtractError::NoCleanBand {
                forbidden_rows: rows,
                trace,
            });
        }
        Ok(None) => broken!("no clean band although n >= (k + 1)(g + 2k)"),
        Err(e) => broken!("band selection failed: {e}"),
    };
    let grid = grid_graph(spec);
    let band: BTreeSet<VertexId> = atlas
        .band_rows()
        .flat_map(|i| spec.row(i).expect("band row"))
        .collect();
    let band_edges = grid.induced(&band);
    if !band.iter().all(|v| state.model.pattern.has_vertex(*v))
        || !band_edges
            .edges
            .iter()
            .all(|e| state.model.pattern.has_edge(*e))
    {
        broken!("band rows are not inside the pattern");
    }
    let measure = state.measure();
    trace.push(ReductionRecord {
        step: trace.len(),
        measure_before: measure,
        measure_after: measure,
        reduction: Reduction::BandSelected {
            atlas,
            forbidden: forbidden
                .iter()
                .map(|&v| spec.coord(v).expect("grid vertex"))
                .collect(),
        },
    });

    let segment = atlas.root_segment();
    let inner = atlas.inner_subgrid(atlas.k).expect("level k");
    let others: Vec<VertexId> = inner
        .iter()
        .filter(|v| !segment.contains(v))
        .copied()
        .collect();
    let removed = state
        .model
        .image_of_vertices(&others)
        .expect("band in pattern");
    let arena = state.host.without_vertices(&removed);
    let targets = state
        .model
        .image_of_vertices(&segment)
        .expect("band in pattern");
    let reduced_paths = match menger(&arena, &state.roots, &targets, k, &BTreeSet::new()) {
        Ok(CutResult::Paths(p)) => p,
        Ok(CutResult::Cut { separator, .. }) => {
            broken!("roots are cut from the first column by {separator:?} in the reduced instance")
        }
        Err(e) => broken!("disjoint-paths step failed: {e}"),
    };

    let base = relabel_inner_grid(&problem.model, &atlas).map_err(|e| {
        ExtractError::InternalInvariantBroken {
            reason: format!("output grid is not in the pattern: {e}"),
            trace: trace.clone(),
        }
    })?;
    let paths = match attach_roots(
        &problem.host,
        &problem.roots,
        &base,
        GridSpec::new(g).expect("g >= 1"),
        k,
    ) {
        Ok(p) => p,
        Err(reason) => broken!("{reason}"),
    };
    trace.push(ReductionRecord {
        step: trace.len(),
        measure_before: measure,
        measure_after: measure,
        reduction: Reduction::MengerAugment {
            reduced_paths,
            paths: paths.clone(),
        },
    });
    assemble(problem, atlas, base, paths, trace)
}

/// Builds and certifies the result.
fn assemble(
    problem: &ExtractionProblem,
    atlas: GridAtlas,
    base: Model,
    paths: Vec<Path>,
    trace: Vec<ReductionRecord>,
) -> Result<ExtractionResult, ExtractError> {
    let pattern =
        GridSpec::new(problem.g).map_err(|e| ExtractError::MalformedInput(e.to_string()))?;
    let broken = |reason: String, trace: Vec<ReductionRecord>| {
        ExtractError::InternalInvariantBroken { reason, trace }
    };
    let augmented = match apply_augmentation(&base, pattern, &problem.host, &paths, &problem.roots)
    {
        Ok(m) => m,
        Err(e) => return Err(broken(e.to_string(), trace)),
    };
    let witness = AugmentationWitness {
        pattern,
        base,
        augmented,
        roots: problem.roots.clone(),
        labeling: Labeling {
            n: problem.spec.n(),
            i0: atlas.i0,
            j0: atlas.j0,
        },
    };
    let mut report = check_augmentation(&witness, &problem.host);
    report.extend(root_free_report(&witness.base, &problem.roots));
    if !report.is_valid() {
        return Err(broken(
            format!("output fails certification: {report}"),
            trace,
        ));
    }
    Ok(ExtractionResult {
        atlas,
        witness,
        paths,
        trace,
    })
}

/// `k` disjoint paths from `roots` to the branches of `(1, 1) .. (k, 1)` of
/// the grid model `base`, avoiding every other branch. Each target branch
/// is collapsed to a single vertex so that every branch receives one path.
fn attach_roots(
    host: &Graph,
    roots: &BTreeSet<VertexId>,
    base: &Model,
    spec: GridSpec,
    k: usize,
) -> Result<Vec<Path>, String> {
    let column: Vec<VertexId> = (1..=k as u32).map(|i| spec.vertex(i, 1)).collect();
    let mut removed = BTreeSet::new();
    for (v, b) in &base.branches {
        if !column.contains(v) {
            removed.extend(b.vertices.iter().copied());
        }
    }
    let arena = host.without_vertices(&removed);
    let mut rep: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut targets = BTreeSet::new();
    for v in &column {
        let b = &base.branches[v];
        let r = *b.vertices.first().ok_or("null branch")?;
        targets.insert(r);
        for &x in &b.vertices {
            rep.insert(x, r);
        }
    }
    let map = |x: VertexId| rep.get(&x).copied().unwrap_or(x);
    let mut collapsed = Graph::new();
    for &v in arena.vertices() {
        collapsed.add_vertex(map(v));
    }
    for (e, u, v) in arena.edges() {
        let (a, b) = (map(u), map(v));
        if a == b && rep.contains_key(&u) {
            continue;
        }
        collapsed.add_edge(e, a, b).map_err(|e| e.to_string())?;
    }
    let found =
        menger(&collapsed, roots, &targets, k, &BTreeSet::new()).map_err(|e| e.to_string())?;
    let CutResult::Paths(found) = found else {
        return Err("roots cannot be attached to the first column in the input host".into());
    };
    let mut ordered: Vec<Option<Path>> = vec![None; k];
    for mut p in found {
        let last = p.last().expect("non-empty path");
        let idx = column
            .iter()
            .position(|v| base.branches[v].vertices.first() == Some(&last))
            .ok_or("path ends outside the first column")?;
        if let (Some(&e), true) = (p.edges.last(), p.vertices.len() >= 2) {
            let prev = p.vertices[p.vertices.len() - 2];
            let (u, v) = host.endpoints(e).ok_or("path edge not in host")?;
            let end = if u == prev { v } else { u };
            *p.vertices.last_mut().expect("non-empty") = end;
        }
        ordered[idx] = Some(p);
    }
    ordered
        .into_iter()
        .map(|p| p.ok_or_else(|| "a first-column branch received no path".to_string()))
        .collect()
}

/// Re-executes a recorded trace on `problem` without any search and
/// rebuilds the result.
pub fn replay(
    problem: &ExtractionProblem,
    trace: &[ReductionRecord],
) -> Result<ExtractionResult, ExtractError> {
    problem.validate()?;
    let k = problem.k as usize;
    let mut state = problem.initial_state();
    let mut atlas = None;
    let mut paths = None;
    for (i, r) in trace.iter().enumerate() {
        let fail = |reason: String| ExtractError::Replay { step: i, reason };
        if r.step != i || state.measure() != r.measure_before {
            return Err(fail("record does not match the replayed state".into()));
        }
        match &r.reduction {
            Reduction::BandSelected { atlas: a, .. } => atlas = Some(*a),
            Reduction::MengerAugment { paths: p, .. } => paths = Some(p.clone()),
            other => state.apply(other, k).map_err(fail)?,
        }
        if state.measure() != r.measure_after {
            return Err(fail("measure after the step differs".into()));
        }
    }
    let fail = |reason: &str| ExtractError::Replay {
        step: trace.len(),
        reason: reason.to_string(),
    };
    let atlas = atlas.ok_or_else(|| fail("no band record"))?;
    let paths = paths.ok_or_else(|| fail("no augmentation record"))?;
    let base = relabel_inner_grid(&problem.model, &atlas).map_err(|e| fail(&e.to_string()))?;
    assemble(problem, atlas, base, paths, trace.to_vec())
}

/// Runs the extraction on a model of the whole grid `G_n`, as in the
/// tangle form of the statement.
pub fn extract_via_tangle_statement(
    host: &Graph,
    model: &Model,
    spec: GridSpec,
    roots: &BTreeSet<VertexId>,
    g: u32,
    k: u32,
    exec: Execution,
) -> Result<ExtractionResult, ExtractError> {
    if model.pattern != grid_graph(spec) {
        return Err(ExtractError::MalformedInput(
            "model pattern is not the full grid".into(),
        ));
    }
    let report = validate_model(model, host);
    if !report.is_valid() {
        return Err(ExtractError::MalformedInput(format!(
            "not a model: {report}"
        )));
    }
    let problem = ExtractionProblem {
        host: host.clone(),
        roots: roots.clone(),
        spec,
        model: model.clone(),
        g,
        k,
        bound: BoundPolicy::Safe,
    };
    extract_with(&problem, exec)
}

/// Rows of the output grid whose image lies in `V(A)` while `(A, B)` has
/// order below `g`. For a member of the tangle the output grid is drawn
/// from, this list is empty.
pub fn output_rows_in_small_side(result: &ExtractionResult, s: &Separation) -> Vec<u32> {
    let g = result.atlas.g;
    if s.order() >= g as usize {
        return Vec::new();
    }
    let spec = GridSpec::new(g).expect("g >= 1");
    (1..=g)
        .filter(|&i| {
            let row = spec.row(i).expect("row in range");
            result
                .model()
                .image_of_vertices(&row)
                .map(|img| img.is_subset(&s.a.vertices))
                .unwrap_or(false)
        })
        .collect()
}

pub fn trace_to_jsonl(trace: &[ReductionRecord]) -> String {
    let mut out = String::new();
    for r in trace {
        out.push_str(&serde_json::to_string(r).expect("records serialise"));
        out.push('\n');
    }
    out
}

pub fn trace_from_jsonl(text: &str) -> Result<Vec<ReductionRecord>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
