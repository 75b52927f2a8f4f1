use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::backprop::{non_finite_gradient, validate_example, Gradients, Workspace};
use super::{LossKind, MlpModel, Sample};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamParams {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    Adam(AdamParams),
    /// Plain gradient descent, `p -= lr * g`.
    Sgd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub optimizer: Optimizer,
    pub loss: LossKind,
    /// Standard deviation of Gaussian noise added to every input component each epoch.
    pub augment_noise_sd: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.005,
            epochs: 5000,
            optimizer: Optimizer::Adam(AdamParams::default()),
            loss: LossKind::Mse,
            augment_noise_sd: 0.0,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(domain(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        if self.epochs == 0 {
            return Err(domain("epochs must be at least 1"));
        }
        if !(self.augment_noise_sd >= 0.0 && self.augment_noise_sd.is_finite()) {
            return Err(domain(format!(
                "augmentation SD must be non-negative, got {}",
                self.augment_noise_sd
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean loss of each epoch's batch, measured before that epoch's update.
    pub loss_history: Vec<f64>,
    /// Mean loss on the clean dataset after the last update.
    pub final_loss: f64,
}

struct AdamState {
    m: Gradients,
    v: Gradients,
    t: i32,
}

/// Full-batch training: one gradient over the whole dataset per epoch.
pub fn train(model: &mut MlpModel, data: &[Sample], config: &TrainConfig) -> Result<TrainReport> {
    config.validate()?;
    if data.is_empty() {
        return Err(domain("training set is empty"));
    }
    for s in data {
        validate_example(model, &s.input, &s.target, config.loss)?;
    }
    model.check_parameters()?;

    let mut noise_rng = ChaCha8Rng::seed_from_u64(config.seed);
    noise_rng.set_stream(1);
    let noise = (config.augment_noise_sd > 0.0)
        .then(|| Normal::new(0.0, config.augment_noise_sd).expect("validated SD"));
    let mut noisy_input = vec![0.0; model.input_dim()];

    let mut ws = Workspace::new(model);
    let mut grads = Gradients::zeros_like(model);
    let mut adam = match config.optimizer {
        Optimizer::Adam(_) => Some(AdamState {
            m: Gradients::zeros_like(model),
            v: Gradients::zeros_like(model),
            t: 0,
        }),
        Optimizer::Sgd => None,
    };
    let scale = 1.0 / data.len() as f64;
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        grads.fill_zero();
        let mut total = 0.0;
        for s in data {
            let input: &[f64] = match &noise {
                Some(dist) => {
                    for (dst, &x) in noisy_input.iter_mut().zip(&s.input) {
                        *dst = x + dist.sample(&mut noise_rng);
                    }
                    &noisy_input
                }
                None => &s.input,
            };
            total += ws.accumulate(model, input, &s.target, config.loss, &mut grads, scale);
        }
        let loss = total * scale;
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch, loss });
        }
        if let Some(err) = non_finite_gradient(&grads) {
            return Err(match err {
                Error::Numerical { .. } => Error::Diverged { epoch, loss },
                other => other,
            });
        }
        history.push(loss);
        match (&mut adam, config.optimizer) {
            (Some(state), Optimizer::Adam(p)) => adam_step(model, &grads, state, p, config.learning_rate),
            _ => sgd_step(model, &grads, config.learning_rate),
        }
    }

    let final_loss = data
        .iter()
        .map(|s| ws.accumulate(model, &s.input, &s.target, config.loss, &mut grads, 0.0))
        .sum::<f64>()
        * scale;
    if !final_loss.is_finite() {
        return Err(Error::Diverged {
            epoch: config.epochs,
            loss: final_loss,
        });
    }
    Ok(TrainReport {
        loss_history: history,
        final_loss,
    })
}

fn sgd_step(model: &mut MlpModel, grads: &Gradients, lr: f64) {
    for (layer, g) in model.layers.iter_mut().zip(&grads.layers) {
        for (w, gw) in layer.weights.iter_mut().zip(&g.weights) {
            *w -= lr * gw;
        }
        for (b, gb) in layer.bias.iter_mut().zip(&g.bias) {
            *b -= lr * gb;
        }
    }
}

fn adam_step(model: &mut MlpModel, grads: &Gradients, state: &mut AdamState, p: AdamParams, lr: f64) {
    state.t += 1;
    let c1 = 1.0 - p.beta1.powi(state.t);
    let c2 = 1.0 - p.beta2.powi(state.t);
    let update = |param: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
        for k in 0..param.len() {
            m[k] = p.beta1 * m[k] + (1.0 - p.beta1) * g[k];
            v[k] = p.beta2 * v[k] + (1.0 - p.beta2) * g[k] * g[k];
            let m_hat = m[k] / c1;
            let v_hat = v[k] / c2;
            param[k] -= lr * m_hat / (v_hat.sqrt() + p.eps);
        }
    };
    for (((layer, g), m), v) in model
        .layers
        .iter_mut()
        .zip(&grads.layers)
        .zip(&mut state.m.layers)
        .zip(&mut state.v.layers)
    {
        update(&mut layer.weights, &g.weights, &mut m.weights, &mut v.weights);
        update(&mut layer.bias, &g.bias, &mut m.bias, &mut v.bias);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{BiasInit, OutputMode};
    use crate::tuning::{encode_gaussian, encode_onehot, PopulationCodeSpec};

    fn delta_task(n: usize, mode: OutputMode) -> Vec<Sample> {
        let spec = PopulationCodeSpec::new(n, 0.1).unwrap();
        (0..n)
            .map(|i| {
                let mut input = vec![0.0; n];
                input[i] = 1.0;
                let target = match mode {
                    OutputMode::SingleVariable => vec![i as f64 / n as f64],
                    OutputMode::OneHot => encode_onehot(i, n).unwrap().into_inner(),
                    OutputMode::PopulationCode => encode_gaussian(i as f64 / n as f64, &spec).unwrap().into_inner(),
                };
                Sample { input, target }
            })
            .collect()
    }

    #[test]
    fn single_variable_converges_to_fixed_point() {
        let n = 20;
        let data = delta_task(n, OutputMode::SingleVariable);
        let mut model = MlpModel::stacked(n, 1, OutputMode::SingleVariable, 3).unwrap();
        let report = train(&mut model, &data, &TrainConfig::default()).unwrap();
        assert!(report.final_loss < 1e-6, "final loss {}", report.final_loss);
        let layer = &model.layers()[0];
        let b = layer.bias()[0];
        for i in 0..n {
            assert!((layer.weight(0, i) + b - i as f64 / n as f64).abs() < 1e-3);
        }
    }

    #[test]
    fn onehot_mse_converges_to_identity_fixed_point() {
        let n = 20;
        let data = delta_task(n, OutputMode::OneHot);
        let mut model = MlpModel::stacked(n, 1, OutputMode::OneHot, 4).unwrap();
        let report = train(&mut model, &data, &TrainConfig::default()).unwrap();
        assert!(report.final_loss < 1e-6, "final loss {}", report.final_loss);
        let layer = &model.layers()[0];
        for o in 0..n {
            for i in 0..n {
                let expect = if o == i { 1.0 } else { 0.0 };
                assert!((layer.weight(o, i) + layer.bias()[o] - expect).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn linear_outputs_reach_tiny_loss() {
        for mode in [OutputMode::SingleVariable, OutputMode::OneHot] {
            let data = delta_task(20, mode);
            let mut model = MlpModel::stacked(20, 1, mode, 8).unwrap();
            let report = train(&mut model, &data, &TrainConfig::default()).unwrap();
            assert!(report.final_loss < 1e-6, "{mode}: {}", report.final_loss);
            assert_eq!(report.loss_history.len(), 5000);
        }
    }

    #[test]
    fn sigmoid_population_output_fits_targets() {
        // a peak target of exactly 1 needs an unbounded logit, so the loss plateaus
        let data = delta_task(20, OutputMode::PopulationCode);
        for seed in [8, 9, 10] {
            let mut model = MlpModel::stacked(20, 1, OutputMode::PopulationCode, seed).unwrap();
            let report = train(&mut model, &data, &TrainConfig::default()).unwrap();
            assert!(report.final_loss < 1e-3, "{}", report.final_loss);
            for (i, s) in data.iter().enumerate() {
                let out = model.predict(&s.input).unwrap();
                assert_eq!(crate::tuning::argmax(&out), Some(i));
                assert!(out.iter().zip(&s.target).all(|(y, t)| (y - t).abs() < 0.1));
            }
        }
    }

    #[test]
    fn one_layer_cross_entropy_learns_the_identity() {
        // softmax margins grow slowly once gradients shrink, so the loss only gets small,
        // not tiny, within the default budget
        let data = delta_task(20, OutputMode::OneHot);
        let mut model = MlpModel::stacked(20, 1, OutputMode::OneHot, 8).unwrap();
        let config = TrainConfig { loss: LossKind::CrossEntropy, ..TrainConfig::default() };
        let report = train(&mut model, &data, &config).unwrap();
        assert!(report.final_loss < 1e-2, "{}", report.final_loss);
        assert!(report.final_loss < report.loss_history[0] / 100.0);
        for (i, s) in data.iter().enumerate() {
            let out = model.predict(&s.input).unwrap();
            assert_eq!(crate::tuning::argmax(&out), Some(i));
        }
    }

    #[test]
    fn sgd_step_matches_delta_rule() {
        // With squared error (y - t)^2 the gradient carries a factor 2, so a step of eta/2
        // is the textbook update w_i += eta (i/n - w_i - b).
        let n = 20;
        let eta = 0.01;
        let mut model = MlpModel::stacked_zeros(n, 1, OutputMode::SingleVariable).unwrap();
        model.init_weights_with(12, BiasInit::Uniform);
        let before = model.clone();
        let i = 7;
        let sample = delta_task(n, OutputMode::SingleVariable)[i].clone();
        let config = TrainConfig {
            learning_rate: eta / 2.0,
            epochs: 1,
            optimizer: Optimizer::Sgd,
            ..TrainConfig::default()
        };
        train(&mut model, std::slice::from_ref(&sample), &config).unwrap();
        let (w0, b0) = (before.layers()[0].weights(), before.layers()[0].bias()[0]);
        let (w1, b1) = (model.layers()[0].weights(), model.layers()[0].bias()[0]);
        let step = eta * (i as f64 / n as f64 - w0[i] - b0);
        assert!((w1[i] - w0[i] - step).abs() < 1e-15);
        assert!((b1 - b0 - step).abs() < 1e-15);
        for j in (0..n).filter(|&j| j != i) {
            assert_eq!(w1[j], w0[j]);
        }
    }

    #[test]
    fn training_is_deterministic() {
        let data = delta_task(20, OutputMode::PopulationCode);
        let config = TrainConfig { epochs: 200, augment_noise_sd: 0.1, seed: 77, ..TrainConfig::default() };
        let mut a = MlpModel::stacked(20, 3, OutputMode::PopulationCode, 5).unwrap();
        let mut b = a.clone();
        let ra = train(&mut a, &data, &config).unwrap();
        let rb = train(&mut b, &data, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        let mut c = MlpModel::stacked(20, 3, OutputMode::PopulationCode, 5).unwrap();
        train(&mut c, &data, &TrainConfig { seed: 78, ..config }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn divergence_is_reported_with_epoch() {
        let data = delta_task(4, OutputMode::SingleVariable);
        let mut model = MlpModel::stacked(4, 3, OutputMode::SingleVariable, 1).unwrap();
        let config = TrainConfig {
            learning_rate: 1e200,
            epochs: 50,
            optimizer: Optimizer::Sgd,
            ..TrainConfig::default()
        };
        match train(&mut model, &data, &config) {
            Err(Error::Diverged { epoch, .. }) => assert!(epoch < 50),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let data = delta_task(4, OutputMode::OneHot);
        let mut model = MlpModel::stacked(4, 1, OutputMode::OneHot, 1).unwrap();
        assert!(train(&mut model, &[], &TrainConfig::default()).is_err());
        for bad in [
            TrainConfig { learning_rate: 0.0, ..TrainConfig::default() },
            TrainConfig { epochs: 0, ..TrainConfig::default() },
            TrainConfig { augment_noise_sd: -0.1, ..TrainConfig::default() },
        ] {
            assert!(train(&mut model, &data, &bad).is_err());
        }
    }
}
