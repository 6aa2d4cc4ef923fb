//! Model construction from JSON descriptions such as
//! `{"model": "heisenberg", "n": 1}` or
//! `{"model": "carnot", "step": 2, "layers": [2, 1], "brackets": [[0, 1, 2, 1]]}`.

use serde::{Deserialize, Serialize};

use super::{
    CarnotGroup, CarnotSpec, ChartFamily, ComplexHeisenbergModel, DyadicBoundaryModel, EuclideanModel, HeisenbergModel,
    PullbackModel,
};
use crate::error::{LabError, Result};

fn default_precision() -> u32 {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Euclidean {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        norm_exponent: Option<f64>,
    },
    Heisenberg {
        n: usize,
    },
    Carnot {
        step: usize,
        layers: Vec<usize>,
        #[serde(default)]
        brackets: Vec<(usize, usize, usize, f64)>,
    },
    Dyadic {
        #[serde(default = "default_precision")]
        precision: u32,
    },
    ComplexHeisenberg,
    Pullback {
        base: Box<ModelSpec>,
        #[serde(default)]
        chart: ChartFamily,
    },
}

/// A constructed model, one variant per shipped structure.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltModel {
    Euclidean(EuclideanModel),
    Heisenberg(HeisenbergModel),
    Carnot(CarnotGroup),
    Dyadic(DyadicBoundaryModel),
    ComplexHeisenberg(ComplexHeisenbergModel),
    Pullback(PullbackModel),
}

impl ModelSpec {
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        serde_json::from_value(value.clone()).map_err(|e| LabError::Model(e.to_string()))
    }

    pub fn build(&self) -> Result<BuiltModel> {
        Ok(match self {
            ModelSpec::Euclidean { n, norm_exponent } => {
                BuiltModel::Euclidean(EuclideanModel::with_exponent(*n, norm_exponent.unwrap_or(2.0))?)
            }
            ModelSpec::Heisenberg { n } => BuiltModel::Heisenberg(HeisenbergModel::new(*n)?),
            ModelSpec::Carnot { step, layers, brackets } => BuiltModel::Carnot(CarnotGroup::new(CarnotSpec {
                step: *step,
                layers: layers.clone(),
                brackets: brackets.clone(),
            })?),
            ModelSpec::Dyadic { precision } => BuiltModel::Dyadic(DyadicBoundaryModel::new(*precision)?),
            ModelSpec::ComplexHeisenberg => BuiltModel::ComplexHeisenberg(ComplexHeisenbergModel::new()),
            ModelSpec::Pullback { base, chart } => match base.build()? {
                BuiltModel::Euclidean(e) => BuiltModel::Pullback(PullbackModel::new(e, *chart)),
                other => {
                    return Err(LabError::Model(format!(
                        "pullback charts act on euclidean bases, got {}",
                        other.name()
                    )))
                }
            },
        })
    }
}

impl BuiltModel {
    pub fn name(&self) -> String {
        use crate::structure::DilatationStructure;
        match self {
            BuiltModel::Euclidean(m) => m.name(),
            BuiltModel::Heisenberg(m) => m.name(),
            BuiltModel::Carnot(m) => m.name(),
            BuiltModel::Dyadic(m) => m.name(),
            BuiltModel::ComplexHeisenberg(m) => m.name(),
            BuiltModel::Pullback(m) => m.name(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn build(v: serde_json::Value) -> Result<BuiltModel> {
        ModelSpec::from_json(&v)?.build()
    }

    #[test]
    fn parses_every_documented_shape() {
        assert!(matches!(build(json!({"model": "euclidean", "n": 2})), Ok(BuiltModel::Euclidean(_))));
        assert!(matches!(build(json!({"model": "heisenberg", "n": 1})), Ok(BuiltModel::Heisenberg(_))));
        assert!(matches!(build(json!({"model": "dyadic", "precision": 64})), Ok(BuiltModel::Dyadic(_))));
        assert!(matches!(build(json!({"model": "complex_heisenberg"})), Ok(BuiltModel::ComplexHeisenberg(_))));
        let engel =
            json!({"model": "carnot", "step": 3, "layers": [2, 1, 1], "brackets": [[0, 1, 2, 1], [0, 2, 3, 1]]});
        assert!(matches!(build(engel), Ok(BuiltModel::Carnot(_))));
        let pb = json!({"model": "pullback", "base": {"model": "euclidean", "n": 2}, "chart": "cubic"});
        match build(pb).unwrap() {
            BuiltModel::Pullback(p) => assert_eq!(p.chart(), ChartFamily::CubicCentered),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_fields_and_models() {
        assert!(build(json!({"model": "heisenberg", "n": 1, "m": 2})).is_err());
        assert!(build(json!({"model": "sphere"})).is_err());
        assert!(build(json!({"model": "heisenberg", "n": 0})).is_err());
        let bad_base = json!({"model": "pullback", "base": {"model": "heisenberg", "n": 1}, "chart": "cubic"});
        assert!(matches!(build(bad_base), Err(LabError::Model(_))));
    }
}
