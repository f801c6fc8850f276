//! JSON bundles exchanged by the command-line tool.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::extract::{BoundPolicy, ExtractionProblem, ExtractionResult, ReductionRecord};
use crate::graph::{Graph, Path, VertexId};
use crate::grid::{GridAtlas, GridCoord, GridSpec};
use crate::instance::{Instance, InstanceRecipe};
use crate::model::{AugmentationWitness, Labeling, ModelFile, Pseudomodel};

/// A host graph, its roots and a grid pseudomodel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceBundle {
    pub graph: Graph,
    pub roots: Vec<VertexId>,
    pub model: ModelFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipe: Option<InstanceRecipe>,
}

impl InstanceBundle {
    pub fn from_instance(
        inst: &Instance,
        recipe: Option<InstanceRecipe>,
    ) -> Result<Self, ModelError> {
        Ok(InstanceBundle {
            graph: inst.host.clone(),
            roots: inst.roots.iter().copied().collect(),
            model: ModelFile::from_grid_model(inst.spec, &inst.model)?,
            recipe,
        })
    }

    pub fn to_instance(&self) -> Result<Instance, ModelError> {
        let (spec, model) = self.model.to_grid_model()?;
        Ok(Instance {
            host: self.graph.clone(),
            roots: self.roots.iter().copied().collect(),
            spec,
            model,
        })
    }

    pub fn to_problem(
        &self,
        g: u32,
        k: u32,
        bound: BoundPolicy,
    ) -> Result<ExtractionProblem, ModelError> {
        let inst = self.to_instance()?;
        Ok(ExtractionProblem {
            host: inst.host,
            roots: inst.roots,
            spec: inst.spec,
            model: inst.model,
            g,
            k,
            bound,
        })
    }
}

/// Everything an extraction returns, in a form that can be re-validated
/// against the host without rerunning the algorithm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub atlas: GridAtlas,
    pub labeling: Labeling,
    /// Input-grid coordinates of the output grid, row by row.
    pub subgrid: Vec<GridCoord>,
    pub roots: Vec<VertexId>,
    pub base: ModelFile,
    pub augmented: ModelFile,
    pub paths: Vec<Path>,
    pub trace: Vec<ReductionRecord>,
}

impl ResultBundle {
    pub fn from_result(r: &ExtractionResult) -> Result<Self, ModelError> {
        let w = &r.witness;
        Ok(ResultBundle {
            atlas: r.atlas,
            labeling: w.labeling,
            subgrid: r.subgrid(),
            roots: w.roots.iter().copied().collect(),
            base: ModelFile::from_grid_model(w.pattern, &w.base)?,
            augmented: ModelFile::from_grid_model(w.pattern, &w.augmented)?,
            paths: r.paths.clone(),
            trace: r.trace.clone(),
        })
    }

    pub fn to_result(&self) -> Result<ExtractionResult, ModelError> {
        Ok(ExtractionResult {
            atlas: self.atlas,
            witness: self.witness()?,
            paths: self.paths.clone(),
            trace: self.trace.clone(),
        })
    }

    pub fn witness(&self) -> Result<AugmentationWitness, ModelError> {
        let (pattern, base) = self.base.to_grid_model()?;
        let (aug_spec, augmented): (GridSpec, Pseudomodel) = self.augmented.to_grid_model()?;
        if aug_spec != pattern {
            return Err(ModelError::NotPatternSubgraph(format!(
                "base grid has side {} but augmented grid has side {}",
                pattern.n(),
                aug_spec.n()
            )));
        }
        Ok(AugmentationWitness {
            pattern,
            base,
            augmented,
            roots: self.roots.iter().copied().collect::<BTreeSet<_>>(),
            labeling: self.labeling,
        })
    }
}
