use serde::{Deserialize, Serialize};

use super::stats::{mean_sd, MeanSd};
use crate::error::{domain, Result};
use crate::nn::MlpModel;

/// Across-model statistics of the largest and smallest final-linear-layer outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivationExtremes {
    pub max: MeanSd,
    pub min: MeanSd,
}

/// Largest and smallest pre-sigmoid / pre-softmax output over all neurons and inputs.
pub fn final_layer_extremes(model: &MlpModel, inputs: &[Vec<f64>]) -> Result<(f64, f64)> {
    if inputs.is_empty() {
        return Err(domain("no inputs to evaluate"));
    }
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for x in inputs {
        let pass = model.forward(x)?;
        for &z in pass.final_linear() {
            hi = hi.max(z);
            lo = lo.min(z);
        }
    }
    Ok((hi, lo))
}

/// Pools max and min over neurons and inputs per model, then averages across models.
pub fn activation_extremes(models: &[&MlpModel], inputs: &[Vec<f64>]) -> Result<ActivationExtremes> {
    if models.is_empty() {
        return Err(domain("no models to evaluate"));
    }
    let per_model = models
        .iter()
        .map(|m| final_layer_extremes(m, inputs))
        .collect::<Result<Vec<_>>>()?;
    let maxes: Vec<f64> = per_model.iter().map(|p| p.0).collect();
    let mins: Vec<f64> = per_model.iter().map(|p| p.1).collect();
    Ok(ActivationExtremes {
        max: mean_sd(&maxes),
        min: mean_sd(&mins),
    })
}
