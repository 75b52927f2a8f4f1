use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Activation, OutputMode};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
}

/// A fully connected layer `y = f(W x + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub(crate) spec: LayerSpec,
    /// Row-major, `out_dim x in_dim`.
    pub(crate) weights: Vec<f64>,
    pub(crate) bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(spec: LayerSpec) -> Result<Self> {
        if spec.in_dim == 0 || spec.out_dim == 0 {
            return Err(domain(format!(
                "layer dimensions must be positive, got {}x{}",
                spec.out_dim, spec.in_dim
            )));
        }
        Ok(Self {
            spec,
            weights: vec![0.0; spec.in_dim * spec.out_dim],
            bias: vec![0.0; spec.out_dim],
        })
    }

    pub fn from_parts(spec: LayerSpec, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        let mut layer = Self::zeros(spec)?;
        if weights.len() != layer.weights.len() || bias.len() != layer.bias.len() {
            return Err(domain(format!(
                "parameter shapes do not match a {}x{} layer ({} weights, {} biases)",
                spec.out_dim,
                spec.in_dim,
                weights.len(),
                bias.len()
            )));
        }
        layer.weights = weights;
        layer.bias = bias;
        Ok(layer)
    }

    pub fn spec(&self) -> LayerSpec {
        self.spec
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    #[inline]
    pub fn weight(&self, o: usize, i: usize) -> f64 {
        self.weights[o * self.spec.in_dim + i]
    }

    pub fn row(&self, o: usize) -> &[f64] {
        let n = self.spec.in_dim;
        &self.weights[o * n..(o + 1) * n]
    }

    /// Writes `W x + b` into `pre` and `f(pre)` into `post`.
    #[inline]
    pub(crate) fn forward_into(&self, x: &[f64], pre: &mut [f64], post: &mut [f64]) {
        let n = self.spec.in_dim;
        let act = self.spec.activation;
        for (o, (z, y)) in pre.iter_mut().zip(post.iter_mut()).enumerate() {
            let row = &self.weights[o * n..(o + 1) * n];
            let mut acc = self.bias[o];
            for (w, xi) in row.iter().zip(x) {
                acc += w * xi;
            }
            *z = acc;
            *y = act.apply(acc);
        }
    }

    fn first_non_finite(&self) -> Option<&'static str> {
        if self.weights.iter().any(|v| !v.is_finite()) {
            Some("weights")
        } else if self.bias.iter().any(|v| !v.is_finite()) {
            Some("bias")
        } else {
            None
        }
    }
}

/// How biases are drawn by [`MlpModel::init_weights_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BiasInit {
    /// Same uniform distribution as the weights.
    #[default]
    Uniform,
    Zero,
}

/// Cached per-layer values of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardPass {
    /// `activations[0]` is the input, `activations[l + 1]` the output of layer `l`.
    pub activations: Vec<Vec<f64>>,
    /// Pre-activation `W x + b` of every layer.
    pub pre: Vec<Vec<f64>>,
}

impl ForwardPass {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("forward pass has at least the input")
    }

    /// Output of the last linear map, before any sigmoid or softmax.
    pub fn final_linear(&self) -> &[f64] {
        self.pre.last().expect("model has at least one layer")
    }
}

/// A stack of dense layers plus the output representation it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub(crate) layers: Vec<Dense>,
    pub(crate) output_mode: OutputMode,
    pub(crate) seed: u64,
}

impl MlpModel {
    /// Checks dimension chaining and that the final layer suits `output_mode`.
    pub fn from_layers(layers: Vec<Dense>, output_mode: OutputMode, seed: u64) -> Result<Self> {
        let last = layers.last().ok_or_else(|| domain("a model needs at least one layer"))?;
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[0].spec.out_dim != pair[1].spec.in_dim {
                return Err(domain(format!(
                    "layer {k} emits {} values but layer {} expects {}",
                    pair[0].spec.out_dim,
                    k + 1,
                    pair[1].spec.in_dim
                )));
            }
        }
        if output_mode == OutputMode::SingleVariable && last.spec.out_dim != 1 {
            return Err(domain(format!(
                "single-variable output needs a 1-neuron final layer, got {}",
                last.spec.out_dim
            )));
        }
        if last.spec.activation != output_mode.output_activation() {
            return Err(domain(format!(
                "{output_mode} output requires final activation '{}', got '{}'",
                output_mode.output_activation().name(),
                last.spec.activation.name()
            )));
        }
        Ok(Self {
            layers,
            output_mode,
            seed,
        })
    }

    /// `depth` linear layers of width `n`, leaky ReLU between them, initialized from `seed`.
    pub fn stacked(n: usize, depth: usize, output_mode: OutputMode, seed: u64) -> Result<Self> {
        let mut model = Self::stacked_zeros(n, depth, output_mode)?;
        model.init_weights(seed);
        Ok(model)
    }

    /// Same architecture as [`MlpModel::stacked`] with every parameter zero.
    pub fn stacked_zeros(n: usize, depth: usize, output_mode: OutputMode) -> Result<Self> {
        if depth == 0 {
            return Err(domain("depth must be at least 1"));
        }
        let out = match output_mode {
            OutputMode::SingleVariable => 1,
            _ => n,
        };
        let layers = (0..depth)
            .map(|k| {
                let last = k + 1 == depth;
                Dense::zeros(LayerSpec {
                    in_dim: n,
                    out_dim: if last { out } else { n },
                    activation: if last {
                        output_mode.output_activation()
                    } else {
                        Activation::LeakyRelu
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_layers(layers, output_mode, 0)
    }

    /// Uniform `[-1/sqrt(in_dim), 1/sqrt(in_dim)]` for weights and biases.
    pub fn init_weights(&mut self, seed: u64) {
        self.init_weights_with(seed, BiasInit::Uniform);
    }

    pub fn init_weights_with(&mut self, seed: u64, bias_init: BiasInit) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in &mut self.layers {
            let bound = 1.0 / (layer.spec.in_dim as f64).sqrt();
            for w in &mut layer.weights {
                *w = rng.random_range(-bound..=bound);
            }
            for b in &mut layer.bias {
                *b = match bias_init {
                    BiasInit::Uniform => rng.random_range(-bound..=bound),
                    BiasInit::Zero => 0.0,
                };
            }
        }
        self.seed = seed;
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn output_mode(&self) -> OutputMode {
        self.output_mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].spec.in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map(|l| l.spec.out_dim).unwrap_or(0)
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Layer index (1-based, 0 = input) of the first non-finite parameter, if any.
    pub(crate) fn check_parameters(&self) -> Result<()> {
        for (k, layer) in self.layers.iter().enumerate() {
            if let Some(what) = layer.first_non_finite() {
                return Err(Error::Numerical {
                    layer: k + 1,
                    what: what.to_string(),
                });
            }
        }
        Ok(())
    }

    pub(crate) fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_dim() {
            return Err(domain(format!(
                "input has {} values, model expects {}",
                input.len(),
                self.input_dim()
            )));
        }
        if input.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical {
                layer: 0,
                what: "input".to_string(),
            });
        }
        Ok(())
    }

    /// Full forward pass with every intermediate value cached.
    pub fn forward(&self, input: &[f64]) -> Result<ForwardPass> {
        self.check_input(input)?;
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        let mut pre = Vec::with_capacity(self.layers.len());
        activations.push(input.to_vec());
        for (k, layer) in self.layers.iter().enumerate() {
            let mut z = vec![0.0; layer.spec.out_dim];
            let mut y = vec![0.0; layer.spec.out_dim];
            layer.forward_into(&activations[k], &mut z, &mut y);
            if y.iter().any(|v| !v.is_finite()) {
                self.check_parameters()?;
                return Err(Error::Numerical {
                    layer: k + 1,
                    what: "output".to_string(),
                });
            }
            pre.push(z);
            activations.push(y);
        }
        Ok(ForwardPass { activations, pre })
    }

    pub fn predict(&self, input: &[f64]) -> Result<Vec<f64>> {
        let mut pass = self.forward(input)?;
        Ok(pass.activations.pop().expect("non-empty"))
    }

    /// Forward pass reusing caller-owned buffers; skips validation. The output ends up in
    /// `scratch.output()`.
    pub(crate) fn predict_into(&self, input: &[f64], scratch: &mut Scratch) {
        for (k, layer) in self.layers.iter().enumerate() {
            let (done, rest) = scratch.post.split_at_mut(k);
            let x = if k == 0 { input } else { &done[k - 1] };
            layer.forward_into(x, &mut scratch.pre[k], &mut rest[0]);
        }
    }
}

/// Reusable per-layer buffers for allocation-free forward passes.
#[derive(Debug, Clone)]
pub(crate) struct Scratch {
    pub pre: Vec<Vec<f64>>,
    pub post: Vec<Vec<f64>>,
}

impl Scratch {
    pub fn for_model(model: &MlpModel) -> Self {
        Self {
            pre: model.layers.iter().map(|l| vec![0.0; l.spec.out_dim]).collect(),
            post: model.layers.iter().map(|l| vec![0.0; l.spec.out_dim]).collect(),
        }
    }

    pub fn output(&self) -> &[f64] {
        self.post.last().expect("non-empty")
    }
}
