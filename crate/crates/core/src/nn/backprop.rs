use super::model::Scratch;
use super::{Activation, LossKind, MlpModel, OutputMode, Sample};
use crate::error::{domain, Error, Result};

/// Gradient of the loss with respect to one layer's parameters, same layout as the layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradient>,
}

impl Gradients {
    pub fn zeros_like(model: &MlpModel) -> Self {
        Self {
            layers: model
                .layers
                .iter()
                .map(|l| LayerGradient {
                    weights: vec![0.0; l.weights.len()],
                    bias: vec![0.0; l.bias.len()],
                })
                .collect(),
        }
    }

    pub(crate) fn fill_zero(&mut self) {
        for l in &mut self.layers {
            l.weights.fill(0.0);
            l.bias.fill(0.0);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.bias).all(|g| g.is_finite()))
    }
}

/// Loss and analytic parameter gradients for a single example.
pub fn loss_and_grad(
    model: &MlpModel,
    input: &[f64],
    target: &[f64],
    loss: LossKind,
) -> Result<(f64, Gradients)> {
    validate_example(model, input, target, loss)?;
    model.check_parameters()?;
    let mut ws = Workspace::new(model);
    let mut grads = Gradients::zeros_like(model);
    let value = ws.accumulate(model, input, target, loss, &mut grads, 1.0);
    Ok((value, grads))
}

/// Mean loss over `samples` and the gradient of that mean.
pub fn batch_loss_and_grad(
    model: &MlpModel,
    samples: &[Sample],
    loss: LossKind,
) -> Result<(f64, Gradients)> {
    if samples.is_empty() {
        return Err(domain("batch is empty"));
    }
    for s in samples {
        validate_example(model, &s.input, &s.target, loss)?;
    }
    model.check_parameters()?;
    let mut ws = Workspace::new(model);
    let mut grads = Gradients::zeros_like(model);
    let scale = 1.0 / samples.len() as f64;
    let total: f64 = samples
        .iter()
        .map(|s| ws.accumulate(model, &s.input, &s.target, loss, &mut grads, scale))
        .sum();
    Ok((total * scale, grads))
}

pub(crate) fn validate_example(
    model: &MlpModel,
    input: &[f64],
    target: &[f64],
    loss: LossKind,
) -> Result<()> {
    model.check_input(input)?;
    if target.len() != model.output_dim() {
        return Err(domain(format!(
            "target has {} values, model emits {}",
            target.len(),
            model.output_dim()
        )));
    }
    if loss == LossKind::CrossEntropy {
        if model.output_mode != OutputMode::OneHot {
            return Err(domain(format!(
                "cross-entropy needs one-hot logits, model output is {}",
                model.output_mode
            )));
        }
        let ones = target.iter().filter(|&&t| t == 1.0).count();
        let zeros = target.iter().filter(|&&t| t == 0.0).count();
        if ones != 1 || ones + zeros != target.len() {
            return Err(domain("cross-entropy target must be a one-hot vector"));
        }
    }
    Ok(())
}

/// Buffers for forward and backward passes over one example at a time.
pub(crate) struct Workspace {
    scratch: Scratch,
    delta: Vec<f64>,
    delta_prev: Vec<f64>,
}

impl Workspace {
    pub fn new(model: &MlpModel) -> Self {
        let widest = model
            .layers
            .iter()
            .map(|l| l.spec.out_dim.max(l.spec.in_dim))
            .max()
            .unwrap_or(0);
        Self {
            scratch: Scratch::for_model(model),
            delta: vec![0.0; widest],
            delta_prev: vec![0.0; widest],
        }
    }

    /// Runs one example forward and backward, adds `scale * dLoss/dParam` into `grads`,
    /// and returns the unscaled loss. Inputs are assumed validated.
    pub fn accumulate(
        &mut self,
        model: &MlpModel,
        input: &[f64],
        target: &[f64],
        loss: LossKind,
        grads: &mut Gradients,
        scale: f64,
    ) -> f64 {
        model.predict_into(input, &mut self.scratch);
        let depth = model.layers.len();
        let last = &model.layers[depth - 1];
        let out_dim = last.spec.out_dim;
        let z = &self.scratch.pre[depth - 1];
        let y = &self.scratch.post[depth - 1];

        let value = match loss {
            LossKind::Mse => {
                let m = out_dim as f64;
                let mut sum = 0.0;
                for o in 0..out_dim {
                    let e = y[o] - target[o];
                    sum += e * e;
                    self.delta[o] = scale * 2.0 * e / m * last.spec.activation.derivative(z[o], y[o]);
                }
                sum / m
            }
            LossKind::CrossEntropy => {
                // d/dz of logsumexp(z) - z_target is softmax(z) - target
                let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let denom: f64 = z.iter().map(|&v| (v - max).exp()).sum();
                let lse = max + denom.ln();
                let mut value = 0.0;
                for o in 0..out_dim {
                    let p = (z[o] - max).exp() / denom;
                    self.delta[o] = scale * (p - target[o]);
                    value += target[o] * (lse - z[o]);
                }
                value
            }
        };

        for k in (0..depth).rev() {
            let layer = &model.layers[k];
            let n_in = layer.spec.in_dim;
            let n_out = layer.spec.out_dim;
            let x: &[f64] = if k == 0 { input } else { &self.scratch.post[k - 1] };
            let g = &mut grads.layers[k];
            for o in 0..n_out {
                let d = self.delta[o];
                g.bias[o] += d;
                let grow = &mut g.weights[o * n_in..(o + 1) * n_in];
                for (gw, xi) in grow.iter_mut().zip(x) {
                    *gw += d * xi;
                }
            }
            if k == 0 {
                break;
            }
            let prev = &mut self.delta_prev[..n_in];
            prev.fill(0.0);
            for o in 0..n_out {
                let d = self.delta[o];
                if d == 0.0 {
                    continue;
                }
                for (p, w) in prev.iter_mut().zip(layer.row(o)) {
                    *p += d * w;
                }
            }
            let below = &model.layers[k - 1];
            let (zp, yp) = (&self.scratch.pre[k - 1], &self.scratch.post[k - 1]);
            let act: Activation = below.spec.activation;
            for i in 0..n_in {
                prev[i] *= act.derivative(zp[i], yp[i]);
            }
            std::mem::swap(&mut self.delta, &mut self.delta_prev);
        }
        value
    }
}

pub(crate) fn non_finite_gradient(grads: &Gradients) -> Option<Error> {
    grads.layers.iter().enumerate().find_map(|(k, l)| {
        (!l.weights.iter().chain(&l.bias).all(|g| g.is_finite())).then(|| Error::Numerical {
            layer: k + 1,
            what: "gradient".to_string(),
        })
    })
}
