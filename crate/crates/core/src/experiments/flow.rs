use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::nn::MlpModel;

/// Connections whose absolute flow is at most this fraction of the layer maximum are unused.
pub const UNUSED_FLOW_FRACTION: f64 = 1.0 / 30.0;

/// Per-connection flow `weight[o][i] * sender_activation[i]` of one layer, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerFlow {
    pub out_dim: usize,
    pub in_dim: usize,
    pub values: Vec<f64>,
}

impl LayerFlow {
    pub fn get(&self, o: usize, i: usize) -> f64 {
        self.values[o * self.in_dim + i]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn unused_count(&self, threshold_fraction: f64) -> usize {
        let max = self.max_abs();
        if max == 0.0 {
            return self.values.len();
        }
        let cut = threshold_fraction * max;
        self.values.iter().filter(|v| v.abs() <= cut).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowMatrix {
    pub layers: Vec<LayerFlow>,
}

/// Flow through every connection for one input. The sender of layer 1 is the input itself;
/// deeper layers use the previous layer's post-activation output.
pub fn compute_flow(model: &MlpModel, input: &[f64]) -> Result<FlowMatrix> {
    let pass = model.forward(input)?;
    let layers = model
        .layers()
        .iter()
        .enumerate()
        .map(|(k, layer)| {
            let spec = layer.spec();
            let sender = &pass.activations[k];
            let mut values = Vec::with_capacity(spec.in_dim * spec.out_dim);
            for o in 0..spec.out_dim {
                values.extend(layer.row(o).iter().zip(sender).map(|(w, a)| w * a));
            }
            LayerFlow {
                out_dim: spec.out_dim,
                in_dim: spec.in_dim,
                values,
            }
        })
        .collect();
    Ok(FlowMatrix { layers })
}

/// Fraction of unused connections, pooled over layers with a per-layer threshold.
/// A layer carrying no flow at all counts every connection as unused.
pub fn flow_sparsity(flow: &FlowMatrix, threshold_fraction: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&threshold_fraction) {
        return Err(domain(format!("threshold fraction {threshold_fraction} outside [0, 1]")));
    }
    let total: usize = flow.layers.iter().map(|l| l.values.len()).sum();
    if total == 0 {
        return Err(domain("flow matrix is empty"));
    }
    let unused: usize = flow.layers.iter().map(|l| l.unused_count(threshold_fraction)).sum();
    Ok(unused as f64 / total as f64)
}

/// [`flow_sparsity`] averaged over several inputs.
pub fn mean_flow_sparsity(model: &MlpModel, inputs: &[Vec<f64>], threshold_fraction: f64) -> Result<f64> {
    if inputs.is_empty() {
        return Err(domain("no inputs to measure flow on"));
    }
    let mut sum = 0.0;
    for x in inputs {
        sum += flow_sparsity(&compute_flow(model, x)?, threshold_fraction)?;
    }
    Ok(sum / inputs.len() as f64)
}
