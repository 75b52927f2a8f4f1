//! Dense feed-forward networks trained from scratch.
//!
//! Everything is `f64`. Weight matrices are stored row-major with shape
//! `out_dim x in_dim`. Hidden layers use a leaky ReLU; the output layer's activation is
//! fixed by the [`OutputMode`]: a sigmoid for population codes, nothing otherwise (one-hot
//! logits go through a softmax inside the cross-entropy loss).

mod backprop;
mod model;
mod persist;
mod train;

use serde::{Deserialize, Serialize};

pub use backprop::{loss_and_grad, batch_loss_and_grad, Gradients, LayerGradient};
pub use model::{BiasInit, Dense, ForwardPass, LayerSpec, MlpModel};
pub(crate) use model::Scratch;
pub use persist::{ModelDocument, MODEL_FORMAT_VERSION};
pub use train::{train, AdamParams, Optimizer, TrainConfig, TrainReport};

/// Negative-side slope of the leaky ReLU.
pub const LEAKY_SLOPE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    None,
    LeakyRelu,
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::None => z,
            Activation::LeakyRelu => {
                if z >= 0.0 {
                    z
                } else {
                    LEAKY_SLOPE * z
                }
            }
            Activation::Sigmoid => sigmoid(z),
        }
    }

    /// Derivative expressed through the pre-activation `z` and the output `y = f(z)`.
    #[inline]
    pub fn derivative(self, z: f64, y: f64) -> f64 {
        match self {
            Activation::None => 1.0,
            Activation::LeakyRelu => {
                if z >= 0.0 {
                    1.0
                } else {
                    LEAKY_SLOPE
                }
            }
            Activation::Sigmoid => y * (1.0 - y),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::None => "none",
            Activation::LeakyRelu => "leaky_relu",
            Activation::Sigmoid => "sigmoid",
        }
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// How the network's output represents the encoded position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputMode {
    SingleVariable,
    OneHot,
    PopulationCode,
}

impl OutputMode {
    pub const ALL: [OutputMode; 3] = [
        OutputMode::SingleVariable,
        OutputMode::OneHot,
        OutputMode::PopulationCode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OutputMode::SingleVariable => "single_variable",
            OutputMode::OneHot => "one_hot",
            OutputMode::PopulationCode => "population_code",
        }
    }

    pub fn output_activation(self) -> Activation {
        match self {
            OutputMode::PopulationCode => Activation::Sigmoid,
            _ => Activation::None,
        }
    }

    /// Loss used for this mode in the robustness experiments.
    pub fn default_loss(self) -> LossKind {
        match self {
            OutputMode::OneHot => LossKind::CrossEntropy,
            _ => LossKind::Mse,
        }
    }
}

impl std::fmt::Display for OutputMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for OutputMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.replace('-', "_").as_str() {
            "single_variable" | "single" => Ok(OutputMode::SingleVariable),
            "one_hot" | "onehot" => Ok(OutputMode::OneHot),
            "population_code" | "popcode" | "population" => Ok(OutputMode::PopulationCode),
            other => Err(crate::error::domain(format!("unknown output mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// Mean over output neurons of the squared error.
    Mse,
    /// Softmax cross-entropy against a one-hot target; the network emits logits.
    CrossEntropy,
}

/// One training example.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Vec<f64>,
    pub target: Vec<f64>,
}
