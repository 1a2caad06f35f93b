//! JSON model files.
//!
//! ```json
//! {
//!   "atoms": ["+", "-"],
//!   "weights": [0.5, 0.5],
//!   "site1_states": [ [[[1,0],[0,0]],[[0,0],[0,0]]], ... ],
//!   "site2_states": [ ... ],
//!   "target_state": [ ... ]
//! }
//! ```
//!
//! Matrices are arrays of rows, each row an array of `[re, im]` pairs.
//! `target_state` is always written and optional on input; when present it
//! must agree with the state reconstructed from the components.

use serde::{Deserialize, Serialize};

use crate::lhv::{lhv_from_separable, LhvModel, ProductComponent, SeparableDecomposition};
use crate::operator::{ComplexMatrix, DensityOperator};
use crate::probability::{validate_model_measure_with, FiniteSampleSpace, MeasureViolation, ProbabilityMeasure};
use crate::{Error, Result, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub atoms: Vec<String>,
    pub weights: Vec<f64>,
    pub site1_states: Vec<ComplexMatrix>,
    pub site2_states: Vec<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_state: Option<ComplexMatrix>,
}

impl ModelFile {
    pub fn from_model(model: &LhvModel) -> Self {
        Self {
            atoms: model.space().atoms().to_vec(),
            weights: model.measure().weights().to_vec(),
            site1_states: model.f1().states().iter().map(|s| s.matrix().clone()).collect(),
            site2_states: model.f2().states().iter().map(|s| s.matrix().clone()).collect(),
            target_state: Some(model.target_state().matrix().clone()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        let n = file.atoms.len();
        if file.weights.len() != n || file.site1_states.len() != n || file.site2_states.len() != n {
            return Err(Error::InvalidArgument(format!(
                "model file lists {} atoms, {} weights, {} site-1 states and {} site-2 states",
                n,
                file.weights.len(),
                file.site1_states.len(),
                file.site2_states.len()
            )));
        }
        Ok(file)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Measure defects of the listed weights, reported rather than rejected.
    pub fn measure_violations(&self, tol_measure: f64) -> Result<Vec<MeasureViolation>> {
        let space = FiniteSampleSpace::new(self.atoms.iter().cloned())?;
        let measure = ProbabilityMeasure::unchecked(space, self.weights.clone())?;
        Ok(validate_model_measure_with(&measure, tol_measure))
    }

    pub fn to_decomposition(&self, tol: &Tolerances) -> Result<SeparableDecomposition> {
        let state = |m: &ComplexMatrix, atom: &str, site: u8| {
            DensityOperator::with_tolerances(m.clone(), tol)
                .map_err(|e| Error::InvalidDecomposition(format!("site {site} state of atom '{atom}': {e}")))
        };
        let comps = self
            .atoms
            .iter()
            .zip(&self.weights)
            .zip(self.site1_states.iter().zip(&self.site2_states))
            .map(|((atom, &weight), (s1, s2))| {
                Ok(ProductComponent {
                    label: atom.clone(),
                    weight,
                    site1: state(s1, atom, 1)?,
                    site2: state(s2, atom, 2)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let decomp = SeparableDecomposition::with_tolerances(comps, tol)?;
        if let Some(target) = &self.target_state {
            let diff = target.sub(decomp.state().matrix())?.max_norm();
            if diff > tol.trace {
                return Err(Error::InvalidDecomposition(format!(
                    "target_state differs from the reconstructed mixture by {diff:e}"
                )));
            }
        }
        Ok(decomp)
    }

    pub fn to_model(&self, tol: &Tolerances) -> Result<LhvModel> {
        lhv_from_separable(&self.to_decomposition(tol)?)
    }
}
