//! Seeded instance generation.
//!
//! All randomness comes from the recipe seed through ChaCha8; the same
//! recipe always yields the same instance.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::{check_hypothesis, HypothesisCertificate};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::grid::GridSpec;
use crate::model::{identity_grid_model, Model};
use crate::par::Execution;
use crate::separation::BlockingSeparation;

const RETRIES: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    /// The grid itself, roots `v_11 .. v_1k`.
    IdentityGrid,
    /// The grid plus `k` new root vertices, each joined to `degree` row-1
    /// vertices.
    GridPlusRoots,
    /// As `GridPlusRoots`, plus `extra_edges` random edges.
    RandomAttachment,
    /// New roots with no path to the grid.
    DetachedRoots,
    /// New roots reaching the grid only through fewer than `k` hub vertices.
    BottleneckRoots,
}

impl InstanceKind {
    /// Kinds built to violate the hypothesis.
    pub fn is_broken(self) -> bool {
        matches!(
            self,
            InstanceKind::DetachedRoots | InstanceKind::BottleneckRoots
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecipe {
    pub kind: InstanceKind,
    pub n: u32,
    pub g: u32,
    pub k: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_degree")]
    pub degree: u32,
    #[serde(default)]
    pub extra_edges: u32,
}

fn default_degree() -> u32 {
    2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub host: Graph,
    pub roots: BTreeSet<VertexId>,
    pub spec: GridSpec,
    pub model: Model,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),
    #[error("no valid instance after {attempts} attempts")]
    RetriesExhausted {
        attempts: u64,
        last_certificate: Option<Box<BlockingSeparation>>,
    },
}

impl InstanceRecipe {
    pub fn new(kind: InstanceKind, n: u32, g: u32, k: u32, seed: u64) -> Self {
        InstanceRecipe {
            kind,
            n,
            g,
            k,
            seed,
            degree: default_degree().max(k),
            extra_edges: 0,
        }
    }

    fn check(&self) -> Result<GridSpec, GenerateError> {
        let bad = |m: &str| Err(GenerateError::InvalidRecipe(m.to_string()));
        let spec =
            GridSpec::new(self.n).map_err(|e| GenerateError::InvalidRecipe(e.to_string()))?;
        if self.k < 1 || self.k > self.g {
            return bad("need 1 <= k <= g");
        }
        if self.k > self.n {
            return bad("need k <= n");
        }
        let attaches = !matches!(
            self.kind,
            InstanceKind::IdentityGrid | InstanceKind::DetachedRoots
        );
        if attaches && (self.degree < 1 || self.degree > self.n) {
            return bad("attachment degree must lie in 1..=n");
        }
        if matches!(
            self.kind,
            InstanceKind::GridPlusRoots | InstanceKind::RandomAttachment
        ) && self.degree < self.k
        {
            return bad("attachment degree must be at least k");
        }
        if self.kind == InstanceKind::BottleneckRoots && self.k < 2 {
            return bad("a bottleneck below k needs k >= 2");
        }
        Ok(spec)
    }
}

struct Builder {
    host: Graph,
    next_vertex: VertexId,
    next_edge: EdgeId,
}

impl Builder {
    fn new(host: Graph) -> Self {
        let next_vertex = host.max_vertex_id().map_or(1, |v| v + 1);
        let next_edge = host.max_edge_id().map_or(0, |e| e + 1);
        Builder {
            host,
            next_vertex,
            next_edge,
        }
    }

    fn vertex(&mut self) -> VertexId {
        let v = self.next_vertex;
        self.next_vertex += 1;
        self.host.add_vertex(v);
        v
    }

    fn edge(&mut self, u: VertexId, v: VertexId) {
        self.host
            .add_edge(self.next_edge, u, v)
            .expect("fresh edge between known vertices");
        self.next_edge += 1;
    }
}

/// Distinct row-1 columns for each of `count` attachers, with pairwise
/// distinct column sets.
fn column_sets(rng: &mut ChaCha8Rng, n: u32, degree: u32, count: u32) -> Vec<Vec<u32>> {
    let columns: Vec<u32> = (1..=n).collect();
    let mut out: Vec<Vec<u32>> = Vec::new();
    while out.len() < count as usize {
        let mut pick: Vec<u32> = columns
            .choose_multiple(rng, degree as usize)
            .copied()
            .collect();
        pick.sort_unstable();
        // with degree == n every set is the same; distinctness is then impossible
        if !out.contains(&pick) || degree == n {
            out.push(pick);
        }
    }
    out
}

fn attempt(r: &InstanceRecipe, spec: GridSpec, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (grid, model) = identity_grid_model(spec);
    if r.kind == InstanceKind::IdentityGrid {
        let roots = spec
            .row(1)
            .expect("row 1")
            .into_iter()
            .take(r.k as usize)
            .collect();
        return Instance {
            host: grid,
            roots,
            spec,
            model,
        };
    }
    let mut b = Builder::new(grid);
    let roots: Vec<VertexId> = (0..r.k).map(|_| b.vertex()).collect();
    match r.kind {
        InstanceKind::GridPlusRoots | InstanceKind::RandomAttachment => {
            for (z, cols) in roots.iter().zip(column_sets(&mut rng, r.n, r.degree, r.k)) {
                for c in cols {
                    b.edge(*z, spec.vertex(1, c));
                }
            }
            if r.kind == InstanceKind::RandomAttachment {
                let all: Vec<VertexId> = b.host.vertices().iter().copied().collect();
                for _ in 0..r.extra_edges {
                    let u = *all.choose(&mut rng).expect("non-empty");
                    let v = *all.choose(&mut rng).expect("non-empty");
                    if u != v {
                        b.edge(u, v);
                    }
                }
            }
        }
        InstanceKind::DetachedRoots => {
            // roots joined among themselves at random, never to the grid
            for w in roots.windows(2) {
                if rng.gen_bool(0.5) {
                    b.edge(w[0], w[1]);
                }
            }
        }
        InstanceKind::BottleneckRoots => {
            let hubs: Vec<VertexId> = (0..rng.gen_range(1..r.k)).map(|_| b.vertex()).collect();
            for (h, cols) in
                hubs.iter()
                    .zip(column_sets(&mut rng, r.n, r.degree, hubs.len() as u32))
            {
                for c in cols {
                    b.edge(*h, spec.vertex(1, c));
                }
            }
            for &z in &roots {
                let mut any = false;
                for &h in &hubs {
                    if rng.gen_bool(0.5) {
                        b.edge(z, h);
                        any = true;
                    }
                }
                if !any {
                    let h = *hubs.choose(&mut rng).expect("at least one hub");
                    b.edge(z, h);
                }
            }
            for w in roots.windows(2) {
                if rng.gen_bool(0.3) {
                    b.edge(w[0], w[1]);
                }
            }
        }
        InstanceKind::IdentityGrid => unreachable!(),
    }
    Instance {
        host: b.host,
        roots: roots.into_iter().collect(),
        spec,
        model,
    }
}

/// Builds the instance described by `r`. Instances are certified after
/// construction: ordinary kinds must satisfy the hypothesis and broken kinds
/// must violate it; a failing attempt is retried with the next sub-seed.
pub fn generate_instance(r: &InstanceRecipe) -> Result<Instance, GenerateError> {
    let spec = r.check()?;
    let mut last = None;
    for t in 0..RETRIES {
        let inst = attempt(r, spec, r.seed.wrapping_add(t));
        let verdict = check_hypothesis(
            &inst.host,
            &inst.roots,
            &inst.model,
            spec,
            r.k as usize,
            Execution::Sequential,
        )
        .map_err(|e| GenerateError::InvalidRecipe(e.to_string()))?;
        match (verdict, r.kind.is_broken()) {
            (HypothesisCertificate::Holds, false) => return Ok(inst),
            (HypothesisCertificate::Violated { .. }, true) => return Ok(inst),
            (HypothesisCertificate::Violated { certificate }, false) => {
                last = Some(Box::new(certificate))
            }
            (HypothesisCertificate::Holds, true) => last = None,
        }
    }
    Err(GenerateError::RetriesExhausted {
        attempts: RETRIES,
        last_certificate: last,
    })
}
