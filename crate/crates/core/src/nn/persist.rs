use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Activation, Dense, LayerSpec, MlpModel, OutputMode};
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// On-disk form of an [`MlpModel`]. Floats are written in shortest round-trip form, so a
/// save/load cycle reproduces every parameter bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: u32,
    pub output_mode: OutputMode,
    pub seed: u64,
    pub layers: Vec<LayerDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerDocument {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
    /// Row-major, `out_dim x in_dim`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl From<&MlpModel> for ModelDocument {
    fn from(model: &MlpModel) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            output_mode: model.output_mode,
            seed: model.seed,
            layers: model
                .layers
                .iter()
                .map(|l| LayerDocument {
                    in_dim: l.spec.in_dim,
                    out_dim: l.spec.out_dim,
                    activation: l.spec.activation,
                    weights: l.weights.clone(),
                    bias: l.bias.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<ModelDocument> for MlpModel {
    type Error = Error;

    fn try_from(doc: ModelDocument) -> Result<Self> {
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::FormatVersion {
                found: doc.format_version,
                expected: MODEL_FORMAT_VERSION,
            });
        }
        let layers = doc
            .layers
            .into_iter()
            .map(|l| {
                Dense::from_parts(
                    LayerSpec {
                        in_dim: l.in_dim,
                        out_dim: l.out_dim,
                        activation: l.activation,
                    },
                    l.weights,
                    l.bias,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let model = MlpModel::from_layers(layers, doc.output_mode, doc.seed)?;
        model.check_parameters()?;
        Ok(model)
    }
}

impl MlpModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelDocument::from(self))?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        // read the version first so a newer layout reports a version error, not a parse error
        let raw: serde_json::Value = serde_json::from_str(json)?;
        if let Some(v) = raw.get("format_version").and_then(|v| v.as_u64()) {
            if v != MODEL_FORMAT_VERSION as u64 {
                return Err(Error::FormatVersion {
                    found: v as u32,
                    expected: MODEL_FORMAT_VERSION,
                });
            }
        }
        let doc: ModelDocument = serde_json::from_value(raw)?;
        doc.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
