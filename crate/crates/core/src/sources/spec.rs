use serde::{Deserialize, Serialize};

use super::SourceModel;
use crate::error::{Error, Result};

/// JSON form of a source model:
/// `{ "kind": "iid"|"markov"|"constant"|"periodic", "pmf": [...], "transition": [[...]], "pattern": [...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pmf: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Vec<u8>>,
    /// Emitted symbol of a constant source (default 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<u8>,
}

impl ModelSpec {
    pub const PRESETS: &'static [&'static str] =
        &["uniform-binary", "bernoulli-0.3", "flip-0.1", "markov-0.9-0.5", "two-cycle", "constant", "periodic-01"];

    pub fn iid(pmf: Vec<f64>) -> Self {
        Self { kind: "iid".into(), pmf: Some(pmf), transition: None, pattern: None, symbol: None }
    }

    pub fn markov(transition: Vec<Vec<f64>>) -> Self {
        Self { kind: "markov".into(), pmf: None, transition: Some(transition), pattern: None, symbol: None }
    }

    pub fn preset(name: &str) -> Option<Self> {
        Some(match name {
            "uniform-binary" => Self::iid(vec![0.5, 0.5]),
            "bernoulli-0.3" => Self::iid(vec![0.7, 0.3]),
            "flip-0.1" => Self::markov(vec![vec![0.9, 0.1], vec![0.1, 0.9]]),
            "markov-0.9-0.5" => Self::markov(vec![vec![0.9, 0.1], vec![0.5, 0.5]]),
            "two-cycle" => Self::markov(vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
            "constant" => Self { kind: "constant".into(), pmf: None, transition: None, pattern: None, symbol: Some(0) },
            "periodic-01" => {
                Self { kind: "periodic".into(), pmf: None, transition: None, pattern: Some(vec![0, 1]), symbol: None }
            }
            _ => return None,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidModel(format!("model JSON: {e}")))
    }

    pub fn build(&self) -> Result<SourceModel> {
        let missing = |field: &str| Error::InvalidModel(format!("kind \"{}\" requires field \"{field}\"", self.kind));
        match self.kind.as_str() {
            "iid" => SourceModel::iid(self.pmf.clone().ok_or_else(|| missing("pmf"))?),
            "markov" => SourceModel::markov(self.transition.clone().ok_or_else(|| missing("transition"))?),
            "constant" => Ok(SourceModel::constant(self.symbol.unwrap_or(0))),
            "periodic" => SourceModel::periodic(self.pattern.clone().ok_or_else(|| missing("pattern"))?),
            other => Err(Error::InvalidModel(format!(
                "unknown kind \"{other}\" (expected iid, markov, constant or periodic)"
            ))),
        }
    }
}

impl From<&SourceModel> for ModelSpec {
    fn from(model: &SourceModel) -> Self {
        match model {
            SourceModel::Iid(s) => Self::iid(s.pmf().to_vec()),
            SourceModel::Markov(m) => Self::markov(m.transition().to_vec()),
            SourceModel::Constant { symbol } => {
                Self { kind: "constant".into(), pmf: None, transition: None, pattern: None, symbol: Some(*symbol) }
            }
            SourceModel::Periodic { pattern } => Self {
                kind: "periodic".into(),
                pmf: None,
                transition: None,
                pattern: Some(pattern.clone()),
                symbol: None,
            },
        }
    }
}
