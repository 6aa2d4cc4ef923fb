//! Experiment configuration files.
//!
//! A config is one JSON object: `model` (a model description), `command`
//! (one of the subcommands), an optional `output` path and the command's own
//! parameters at the top level. Unknown fields are rejected.

use std::path::PathBuf;

use dilatation_core::emergent::TangentOp;
use dilatation_core::models::spec::ModelSpec;
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;

/// A scale: a real number, or `[re, im]` for complex scales.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ScaleValue {
    Real(f64),
    Complex([f64; 2]),
}

/// Either `{"kmin": a, "kmax": b}` for ν = 2^-a .. 2^-b or an explicit list
/// of strictly decreasing valuations.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Dyadic { kmin: i32, kmax: i32 },
    Values(Vec<f64>),
}

/// One axiom name, a list of them, or `"all"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AxiomSelection {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    #[default]
    Inflin,
    Plin1,
}

/// Maps tested by `affinemap`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Identity,
    /// v ↦ Mv + b on ℝⁿ.
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
    /// v ↦ w·v in a group model.
    LeftTranslation {
        by: Value,
    },
    /// v ↦ δ^c_λ v.
    Dilatation {
        center: Value,
        scale: ScaleValue,
    },
    /// (v₁, v₂, …) ↦ (v₁², v₂, …) on ℝⁿ.
    SquareFirst,
    /// t ↦ t + t³ in every coordinate of ℝⁿ.
    Cubic,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case", deny_unknown_fields)]
pub enum Command {
    Axioms {
        which: AxiomSelection,
        seed: u64,
        #[serde(default)]
        samples: Option<usize>,
        #[serde(default)]
        grid: Option<GridSpec>,
        #[serde(default)]
        tolerance: Option<f64>,
        #[serde(default)]
        center: Option<Value>,
        #[serde(default)]
        radius: Option<f64>,
    },
    Tangent {
        x: Value,
        u: Value,
        #[serde(default)]
        v: Option<Value>,
        op: TangentOp,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
    Menelaos {
        x: Value,
        y: Value,
        eps: ScaleValue,
        mu: ScaleValue,
        #[serde(default)]
        tol: Option<f64>,
        #[serde(default)]
        max_iter: Option<usize>,
    },
    Ratio {
        x: Value,
        y: Value,
        eps: ScaleValue,
        mu: ScaleValue,
        #[serde(default)]
        order: Option<usize>,
        #[serde(default)]
        tol: Option<f64>,
    },
    Linscan {
        x: Value,
        y: Value,
        z: Value,
        #[serde(default)]
        grid: Option<GridSpec>,
        #[serde(default)]
        scan: ScanKind,
    },
    Barycentric {
        seed: u64,
        #[serde(default)]
        samples: Option<usize>,
        #[serde(default)]
        eps: Option<Vec<f64>>,
        #[serde(default)]
        center: Option<Value>,
        #[serde(default)]
        radius: Option<f64>,
        #[serde(default)]
        tolerance: Option<f64>,
    },
    Counterexample {
        eps: f64,
        y: Value,
        seed: u64,
        #[serde(default)]
        mu: Option<ScaleValue>,
        #[serde(default)]
        radius: Option<f64>,
    },
    Affinemap {
        map: MapSpec,
        seed: u64,
        #[serde(default)]
        samples: Option<usize>,
        #[serde(default)]
        eps: Option<Vec<f64>>,
        #[serde(default)]
        center: Option<Value>,
        #[serde(default)]
        radius: Option<f64>,
        #[serde(default)]
        tolerance: Option<f64>,
        #[serde(default)]
        triples: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Axioms { .. } => "axioms",
            Command::Tangent { .. } => "tangent",
            Command::Menelaos { .. } => "menelaos",
            Command::Ratio { .. } => "ratio",
            Command::Linscan { .. } => "linscan",
            Command::Barycentric { .. } => "barycentric",
            Command::Counterexample { .. } => "counterexample",
            Command::Affinemap { .. } => "affinemap",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Axioms { seed, .. }
            | Command::Barycentric { seed, .. }
            | Command::Counterexample { seed, .. }
            | Command::Affinemap { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

/// Commands whose sweeps are randomized; they require a seed.
const SEEDED: [&str; 4] = ["axioms", "barycentric", "counterexample", "affinemap"];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub command: Command,
    pub output: Option<PathBuf>,
    /// The effective configuration after overrides, in canonical form.
    pub canonical: String,
}

impl ExperimentConfig {
    /// Parses a config; `seed` replaces the config's seed for randomized
    /// commands.
    pub fn parse(text: &str, seed: Option<u64>) -> Result<Self, CliError> {
        let mut value: Value =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed JSON: {e}")))?;
        let obj = value.as_object_mut().ok_or_else(|| CliError::Config("a config must be a JSON object".into()))?;
        if let Some(seed) = seed {
            let randomized = obj.get("command").and_then(Value::as_str).is_some_and(|c| SEEDED.contains(&c));
            if randomized {
                obj.insert("seed".into(), Value::from(seed));
            }
        }
        let canonical = serde_json::to_string(&value).expect("a JSON value serializes");
        let mut rest = value.as_object().cloned().expect("checked above");
        let model = rest.remove("model").ok_or_else(|| CliError::Config("missing field `model`".into()))?;
        let model = ModelSpec::from_json(&model).map_err(|e| CliError::Model(e.to_string()))?;
        let output = match rest.remove("output") {
            None | Some(Value::Null) => None,
            Some(Value::String(p)) => Some(PathBuf::from(p)),
            Some(other) => return Err(CliError::Config(format!("`output` must be a path string, got {other}"))),
        };
        let command: Command =
            serde_json::from_value(Value::Object(rest)).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Self { model, command, output, canonical })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_an_axiom_sweep() {
        let c = ExperimentConfig::parse(
            r#"{"model":{"model":"euclidean","n":2},"command":"axioms","which":"A4","seed":7}"#,
            None,
        )
        .unwrap();
        assert_eq!(c.command.name(), "axioms");
        assert_eq!(c.command.seed(), Some(7));
        assert_eq!(c.model, ModelSpec::Euclidean { n: 2, norm_exponent: None });
    }

    #[test]
    fn rejects_unknown_fields_and_missing_seeds() {
        let extra = r#"{"model":{"model":"euclidean","n":2},"command":"axioms","which":"A1","seed":1,"colour":3}"#;
        assert!(matches!(ExperimentConfig::parse(extra, None), Err(CliError::Config(_))));
        let unseeded = r#"{"model":{"model":"euclidean","n":2},"command":"axioms","which":"A1"}"#;
        assert!(matches!(ExperimentConfig::parse(unseeded, None), Err(CliError::Config(_))));
        assert!(ExperimentConfig::parse(unseeded, Some(3)).is_ok());
        let bad_model = r#"{"model":{"model":"sphere"},"command":"axioms","which":"A1","seed":1}"#;
        assert!(matches!(ExperimentConfig::parse(bad_model, None), Err(CliError::Model(_))));
    }

    #[test]
    fn seed_override_changes_the_canonical_form() {
        let text = r#"{"model":{"model":"heisenberg","n":1},"command":"barycentric","seed":1}"#;
        let a = ExperimentConfig::parse(text, None).unwrap();
        let b = ExperimentConfig::parse(text, Some(2)).unwrap();
        assert_eq!(b.command.seed(), Some(2));
        assert_ne!(a.canonical, b.canonical);
        let menelaos =
            r#"{"model":{"model":"euclidean","n":1},"command":"menelaos","x":[0],"y":[1],"eps":0.5,"mu":0.5}"#;
        assert!(ExperimentConfig::parse(menelaos, Some(4)).is_ok());
    }
}
