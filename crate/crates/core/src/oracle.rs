//! Exhaustive reference implementations for small inputs.
//!
//! Nothing here calls the flow code, the blocking search or the tangle
//! predicate; the point is to re-derive their answers by brute force.
//! Every routine checks its budget before it starts.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::OracleError;
use crate::extract::ExtractionResult;
use crate::graph::{EdgeId, Graph, Subgraph, VertexId};
use crate::grid::{grid_graph, GridSpec};
use crate::model::{Model, Pseudomodel};
use crate::par::{self, Execution};
use crate::report::{ValidationReport, Violation};
use crate::separation::{Separation, Tangle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_vertices: usize,
    pub max_order: usize,
    pub max_pattern_side: u32,
    /// Cap on generated objects or search nodes.
    pub max_steps: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_vertices: 10,
            max_order: 4,
            max_pattern_side: 3,
            max_steps: 5_000_000,
        }
    }
}

impl EnumerationBudget {
    fn check_vertices(&self, g: &Graph) -> Result<(), OracleError> {
        if g.vertex_count() > self.max_vertices {
            return Err(OracleError::BudgetExceeded(format!(
                "{} vertices, budget {}",
                g.vertex_count(),
                self.max_vertices
            )));
        }
        Ok(())
    }

    fn check_order(&self, order: usize) -> Result<(), OracleError> {
        if order > self.max_order {
            return Err(OracleError::BudgetExceeded(format!(
                "order {order}, budget {}",
                self.max_order
            )));
        }
        Ok(())
    }
}

/// All `r`-subsets of `items`, in lexicographic order.
fn subsets_of_size<T: Copy>(items: &[T], r: usize) -> Vec<Vec<T>> {
    fn go<T: Copy>(items: &[T], r: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < r - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, r, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, r, 0, &mut Vec::new(), &mut out);
    out
}

/// Vertex sets of the components of `g - removed`, by least vertex.
fn components_without(g: &Graph, removed: &BTreeSet<VertexId>) -> Vec<BTreeSet<VertexId>> {
    let mut nbrs: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for (_, u, v) in g.edges() {
        nbrs.entry(u).or_default().push(v);
        nbrs.entry(v).or_default().push(u);
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &s in g.vertices() {
        if removed.contains(&s) || seen.contains(&s) {
            continue;
        }
        let mut comp = BTreeSet::from([s]);
        let mut stack = vec![s];
        seen.insert(s);
        while let Some(x) = stack.pop() {
            for &y in nbrs.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                if !removed.contains(&y) && seen.insert(y) {
                    comp.insert(y);
                    stack.push(y);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Every separation of order at most `max_order`: choose the separator,
/// give each component of the rest to a side, and send each edge inside
/// the separator either way. Sorted and deduplicated.
pub fn enumerate_separations(
    g: &Graph,
    max_order: usize,
    budget: &EnumerationBudget,
    exec: Execution,
) -> Result<Vec<Separation>, OracleError> {
    budget.check_vertices(g)?;
    budget.check_order(max_order)?;
    let vertices: Vec<VertexId> = g.vertices().iter().copied().collect();
    let cuts: Vec<Vec<VertexId>> = (0..=max_order.min(vertices.len()))
        .flat_map(|r| subsets_of_size(&vertices, r))
        .collect();
    let per_cut = par::map(exec, &cuts, |x| {
        let x: BTreeSet<VertexId> = x.iter().copied().collect();
        let comps = components_without(g, &x);
        let inner: Vec<EdgeId> = g
            .edges()
            .filter(|(_, u, v)| x.contains(u) && x.contains(v))
            .map(|(e, _, _)| e)
            .collect();
        let count = 1u64
            .checked_shl(comps.len() as u32 + inner.len() as u32)
            .unwrap_or(u64::MAX);
        (x, comps, inner, count)
    });
    let total: u64 = per_cut.iter().map(|c| c.3).fold(0, u64::saturating_add);
    if total > budget.max_steps {
        return Err(OracleError::BudgetExceeded(format!(
            "{total} candidate separations, budget {}",
            budget.max_steps
        )));
    }
    let built = par::map(exec, &per_cut, |(x, comps, inner, _)| {
        let mut out = Vec::new();
        for side_bits in 0u64..(1 << comps.len()) {
            let mut a_only = BTreeSet::new();
            for (i, c) in comps.iter().enumerate() {
                if side_bits >> i & 1 == 1 {
                    a_only.extend(c.iter().copied());
                }
            }
            for edge_bits in 0u64..(1 << inner.len()) {
                let mut a = Subgraph::from_vertices(a_only.union(x).copied());
                let mut b = Subgraph::from_vertices(g.vertices().difference(&a_only).copied());
                for (e, u, v) in g.edges() {
                    let to_a = if let Some(i) = inner.iter().position(|&f| f == e) {
                        edge_bits >> i & 1 == 1
                    } else {
                        a_only.contains(&u) || a_only.contains(&v)
                    };
                    if to_a {
                        a.edges.insert(e);
                    } else {
                        b.edges.insert(e);
                    }
                }
                out.push(Separation { a, b });
            }
        }
        out
    });
    let all: BTreeSet<Separation> = built.into_iter().flatten().collect();
    Ok(all.into_iter().collect())
}

/// Least number of vertices meeting every path from `sources` to
/// `targets` (sources and targets may themselves be chosen), by trying all
/// vertex sets in order of size.
pub fn min_vertex_cut(
    g: &Graph,
    sources: &BTreeSet<VertexId>,
    targets: &BTreeSet<VertexId>,
    budget: &EnumerationBudget,
) -> Result<usize, OracleError> {
    budget.check_vertices(g)?;
    let vertices: Vec<VertexId> = g.vertices().iter().copied().collect();
    for r in 0..=vertices.len() {
        for x in subsets_of_size(&vertices, r) {
            let x: BTreeSet<VertexId> = x.into_iter().collect();
            let separated = components_without(g, &x)
                .iter()
                .all(|c| c.is_disjoint(sources) || c.is_disjoint(targets));
            if separated {
                return Ok(r);
            }
        }
    }
    unreachable!("removing every vertex separates")
}

/// Vertex and edge bitmask of a side, for graphs with at most 128 of each.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Mask {
    v: u128,
    e: u128,
}

struct MaskMap {
    v: BTreeMap<VertexId, u32>,
    e: BTreeMap<EdgeId, u32>,
    full: Mask,
}

impl MaskMap {
    fn new(g: &Graph) -> Result<Self, OracleError> {
        if g.vertex_count() > 128 || g.edge_count() > 128 {
            return Err(OracleError::BudgetExceeded(
                "more than 128 vertices or edges".into(),
            ));
        }
        let v: BTreeMap<_, _> = g
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, i as u32))
            .collect();
        let e: BTreeMap<_, _> = g
            .edge_ids()
            .enumerate()
            .map(|(i, x)| (x, i as u32))
            .collect();
        let full = Mask {
            v: ones(v.len()),
            e: ones(e.len()),
        };
        Ok(MaskMap { v, e, full })
    }

    fn of(&self, s: &Subgraph) -> Mask {
        Mask {
            v: s.vertices.iter().fold(0, |m, x| m | 1 << self.v[x]),
            e: s.edges.iter().fold(0, |m, x| m | 1 << self.e[x]),
        }
    }
}

fn ones(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Every tangle of order `theta`, found by orienting each separation of
/// order below `theta` in turn and abandoning a branch as soon as a chosen
/// small side contains every vertex or three chosen small sides cover the
/// graph.
pub fn enumerate_tangles(
    g: &Graph,
    theta: usize,
    budget: &EnumerationBudget,
    exec: Execution,
) -> Result<Vec<Tangle>, OracleError> {
    if theta == 0 {
        return Err(OracleError::BudgetExceeded(
            "tangle order must be at least 1".into(),
        ));
    }
    let seps = enumerate_separations(g, theta - 1, budget, exec)?;
    let map = MaskMap::new(g)?;
    let index: BTreeMap<&Separation, usize> =
        seps.iter().enumerate().map(|(i, s)| (s, i)).collect();
    // each unordered pair once, as (first orientation, second orientation)
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (i, s) in seps.iter().enumerate() {
        let j = index[&s.swapped()];
        if i <= j {
            pairs.push((i, j));
        }
    }
    let masks: Vec<Mask> = seps.iter().map(|s| map.of(&s.a)).collect();
    let full = map.full;
    let mut search = TangleSearch {
        pairs: &pairs,
        masks: &masks,
        full,
        chosen: Vec::new(),
        found: Vec::new(),
        steps: 0,
        max_steps: budget.max_steps,
    };
    search.run(0)?;
    let mut tangles: Vec<Tangle> = search
        .found
        .into_iter()
        .map(|ids| Tangle::new(theta, ids.into_iter().map(|i| seps[i].clone())))
        .collect();
    tangles.sort_by(|a, b| a.members.cmp(&b.members));
    tangles.dedup();
    Ok(tangles)
}

struct TangleSearch<'a> {
    pairs: &'a [(usize, usize)],
    masks: &'a [Mask],
    full: Mask,
    chosen: Vec<usize>,
    found: Vec<Vec<usize>>,
    steps: u64,
    max_steps: u64,
}

impl TangleSearch<'_> {
    fn fits(&self, cand: usize) -> bool {
        let m = self.masks[cand];
        let covers = |x: Mask| x.v == self.full.v && x.e == self.full.e;
        if m.v == self.full.v {
            return false;
        }
        let chosen: Vec<Mask> = self.chosen.iter().map(|&i| self.masks[i]).collect();
        for (p, a) in chosen.iter().enumerate() {
            let two = Mask {
                v: m.v | a.v,
                e: m.e | a.e,
            };
            if covers(two) {
                return false;
            }
            for b in &chosen[p..] {
                if covers(Mask {
                    v: two.v | b.v,
                    e: two.e | b.e,
                }) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, at: usize) -> Result<(), OracleError> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(OracleError::BudgetExceeded(format!(
                "tangle search exceeded {} nodes",
                self.max_steps
            )));
        }
        if at == self.pairs.len() {
            self.found.push(self.chosen.clone());
            return Ok(());
        }
        let (x, y) = self.pairs[at];
        let options: &[usize] = if x == y { &[x][..] } else { &[x, y][..] };
        for &cand in options {
            if self.fits(cand) {
                self.chosen.push(cand);
                self.run(at + 1)?;
                self.chosen.pop();
            }
        }
        Ok(())
    }
}

/// A model of `G_side` in `g`, if one exists. Branches are connected vertex
/// sets (with all host edges inside them); each grid edge maps to the least
/// host edge joining its two branches.
pub fn brute_force_grid_model(
    g: &Graph,
    side: u32,
    budget: &EnumerationBudget,
) -> Result<Option<Model>, OracleError> {
    budget.check_vertices(g)?;
    if side == 0 || side > budget.max_pattern_side {
        return Err(OracleError::BudgetExceeded(format!(
            "pattern side {side}, budget {}",
            budget.max_pattern_side
        )));
    }
    let spec = GridSpec::new(side).expect("side >= 1");
    let pattern = grid_graph(spec);
    let order: Vec<VertexId> = pattern.vertices().iter().copied().collect();
    if order.len() > g.vertex_count() {
        return Ok(None);
    }
    let vertices: Vec<VertexId> = g.vertices().iter().copied().collect();
    let mut connected_sets = Vec::new();
    for r in 1..=(vertices.len() + 1 - order.len()) {
        for set in subsets_of_size(&vertices, r) {
            let set: BTreeSet<VertexId> = set.into_iter().collect();
            let rest: BTreeSet<VertexId> = g.vertices().difference(&set).copied().collect();
            if components_without(g, &rest).len() == 1 {
                connected_sets.push(set);
            }
        }
    }
    let mut joins: BTreeMap<(VertexId, VertexId), EdgeId> = BTreeMap::new();
    for (e, u, v) in g.edges() {
        if u != v {
            joins.entry((u, v)).or_insert(e);
            joins.entry((v, u)).or_insert(e);
        }
    }
    let earlier: Vec<Vec<(VertexId, EdgeId)>> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            pattern
                .edges()
                .filter_map(|(e, a, b)| {
                    let other = if a == v {
                        b
                    } else if b == v {
                        a
                    } else {
                        return None;
                    };
                    order[..i].contains(&other).then_some((other, e))
                })
                .collect()
        })
        .collect();
    let mut search = ModelSearch {
        sets: &connected_sets,
        order: &order,
        earlier: &earlier,
        joins: &joins,
        total: vertices.len(),
        chosen: BTreeMap::new(),
        used: BTreeSet::new(),
        steps: 0,
        max_steps: budget.max_steps,
    };
    let Some(branches) = search.run(0)? else {
        return Ok(None);
    };
    let mut edge_images = BTreeMap::new();
    for (e, a, b) in pattern.edges() {
        edge_images.insert(
            e,
            least_join(&joins, &branches[&a], &branches[&b]).expect("joined"),
        );
    }
    let branches = branches
        .into_iter()
        .map(|(v, set)| (v, g.induced(&set)))
        .collect();
    Ok(Some(Pseudomodel {
        pattern,
        branches,
        edge_images,
    }))
}

fn least_join(
    joins: &BTreeMap<(VertexId, VertexId), EdgeId>,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
) -> Option<EdgeId> {
    a.iter()
        .flat_map(|x| b.iter().filter_map(move |y| joins.get(&(*x, *y)).copied()))
        .min()
}

struct ModelSearch<'a> {
    sets: &'a [BTreeSet<VertexId>],
    order: &'a [VertexId],
    earlier: &'a [Vec<(VertexId, EdgeId)>],
    joins: &'a BTreeMap<(VertexId, VertexId), EdgeId>,
    total: usize,
    chosen: BTreeMap<VertexId, BTreeSet<VertexId>>,
    used: BTreeSet<VertexId>,
    steps: u64,
    max_steps: u64,
}

impl ModelSearch<'_> {
    fn run(
        &mut self,
        at: usize,
    ) -> Result<Option<BTreeMap<VertexId, BTreeSet<VertexId>>>, OracleError> {
        if at == self.order.len() {
            return Ok(Some(self.chosen.clone()));
        }
        let remaining = self.order.len() - at - 1;
        for set in self.sets {
            self.steps += 1;
            if self.steps > self.max_steps {
                return Err(OracleError::BudgetExceeded(format!(
                    "model search exceeded {} steps",
                    self.max_steps
                )));
            }
            if self.used.len() + set.len() + remaining > self.total || !self.used.is_disjoint(set) {
                continue;
            }
            let joined = self.earlier[at]
                .iter()
                .all(|(other, _)| least_join(self.joins, set, &self.chosen[other]).is_some());
            if !joined {
                continue;
            }
            self.chosen.insert(self.order[at], set.clone());
            self.used.extend(set.iter().copied());
            if let Some(found) = self.run(at + 1)? {
                return Ok(Some(found));
            }
            for x in set {
                self.used.remove(x);
            }
            self.chosen.remove(&self.order[at]);
        }
        Ok(None)
    }
}

/// Whether `(A, B)` is oriented as in the tangle of the model `m` of
/// `G_n`: some row image lies in `V(B) \ V(A)`.
fn is_grid_tangle_member(m: &Model, spec: GridSpec, s: &Separation) -> bool {
    (1..=spec.n()).any(|i| {
        spec.row(i).expect("row").iter().all(|v| {
            m.branches[v]
                .vertices
                .iter()
                .all(|x| s.b.vertices.contains(x) && !s.a.vertices.contains(x))
        })
    })
}

/// For each separation of order below `n` that the model `input` of `G_n`
/// orients as `(A, B)`, and each row of the output grid whose image lies in
/// `V(A)`, reports the pair when the order is below `g`.
pub fn verify_output_row_property(
    result: &ExtractionResult,
    input: &Model,
    spec: GridSpec,
    seps: &[Separation],
    exec: Execution,
) -> ValidationReport {
    let g = result.atlas.g;
    let out_spec = GridSpec::new(g).expect("g >= 1");
    let rows: Vec<BTreeSet<VertexId>> = (1..=g)
        .map(|i| {
            out_spec
                .row(i)
                .expect("row")
                .iter()
                .flat_map(|v| result.model().branches[v].vertices.iter().copied())
                .collect()
        })
        .collect();
    let found = par::map_range(exec, seps.len(), |idx| {
        let s = &seps[idx];
        let order = s.order();
        if order >= spec.n() as usize || !is_grid_tangle_member(input, spec, s) {
            return Vec::new();
        }
        rows.iter()
            .enumerate()
            .filter(|(_, r)| r.is_subset(&s.a.vertices) && order < g as usize)
            .map(|(i, _)| Violation::RowImageInSmallSide {
                separation: idx,
                row: i as u32 + 1,
                order,
            })
            .collect()
    });
    let mut report = ValidationReport::default();
    for v in found.into_iter().flatten() {
        report.push(v);
    }
    report
}

/// Pattern rows of `G_n` fully inside the pattern of `m`, as row images.
fn full_row_images(m: &Pseudomodel, spec: GridSpec) -> Vec<(u32, BTreeSet<VertexId>)> {
    (1..=spec.n())
        .filter_map(|i| {
            let row = spec.row(i).expect("row");
            if !row.iter().all(|v| m.pattern.has_vertex(*v)) {
                return None;
            }
            let image = row
                .iter()
                .flat_map(|v| m.branches[v].vertices.iter().copied())
                .collect();
            Some((i, image))
        })
        .collect()
}

/// A separation of order below `k` with `roots ⊆ V(A)` and the image of a
/// full pattern row inside `V(B)`, found by enumeration; the first in
/// enumeration order.
pub fn exhaustive_strict_blocking(
    g: &Graph,
    roots: &BTreeSet<VertexId>,
    m: &Pseudomodel,
    spec: GridSpec,
    k: usize,
    budget: &EnumerationBudget,
    exec: Execution,
) -> Result<Option<Separation>, OracleError> {
    if k == 0 {
        return Ok(None);
    }
    let rows = full_row_images(m, spec);
    let seps = enumerate_separations(g, k - 1, budget, exec)?;
    Ok(seps.into_iter().find(|s| {
        roots.is_subset(&s.a.vertices) && rows.iter().any(|(_, r)| r.is_subset(&s.b.vertices))
    }))
}

/// Like [`exhaustive_strict_blocking`] but for order exactly `k` with
/// `B != G`.
pub fn exhaustive_reducible_blocking(
    g: &Graph,
    roots: &BTreeSet<VertexId>,
    m: &Pseudomodel,
    spec: GridSpec,
    k: usize,
    budget: &EnumerationBudget,
    exec: Execution,
) -> Result<Option<Separation>, OracleError> {
    let rows = full_row_images(m, spec);
    let whole = g.as_subgraph();
    let seps = enumerate_separations(g, k, budget, exec)?;
    Ok(seps.into_iter().find(|s| {
        s.order() == k
            && s.b != whole
            && roots.is_subset(&s.a.vertices)
            && rows.iter().any(|(_, r)| r.is_subset(&s.b.vertices))
    }))
}
