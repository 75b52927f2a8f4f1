//! Closed-form noise-robustness results for single-layer linear networks.
//!
//! Setting: an `n`-pixel input with a single active pixel at index `i`, target position
//! `i / n`, and a perturbation of amplitude `a` added to one pixel `k`. A decoded
//! position more than `1.5 / n` away from the target counts as a failure.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Default positional tolerance in pixels: one pixel off is accepted, two are not.
pub const DEFAULT_TOLERANCE_PIXELS: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub n: usize,
    pub a: f64,
    pub sigma: f64,
    pub tolerance_pixels: f64,
}

impl TheoryParams {
    pub fn new(n: usize, a: f64, sigma: f64) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("n must be at least 2, got {n}")));
        }
        if !(a > 0.0) {
            return Err(domain(format!("perturbation amplitude must be positive, got {a}")));
        }
        if !(sigma > 0.0) {
            return Err(domain(format!("tuning width must be positive, got {sigma}")));
        }
        Ok(Self {
            n,
            a,
            sigma,
            tolerance_pixels: DEFAULT_TOLERANCE_PIXELS,
        })
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance_pixels / self.n as f64
    }
}

/// Failure rate of the single-output network, `max(0, 1 - 3 / (a n))`.
///
/// Assumes the trained weights spread uniformly over a unit-width range centred on zero,
/// so the tolerated fraction is `|w_k| < 1.5 / (a n)` over that range.
pub fn single_variable_failure_rate(n: usize, a: f64) -> f64 {
    (1.0 - 3.0 / (a * n as f64)).max(0.0)
}

/// Perturbation amplitude above which a one-hot network can misclassify, given the trained
/// biases of the perturbed neuron `b_k` and of the target neuron `b_i`.
pub fn onehot_failure_threshold(b_k: f64, b_i: f64) -> Result<f64> {
    let denom = 1.0 - b_k + b_i;
    if !(denom > 0.0) {
        return Err(domain(format!(
            "1 - b_k + b_i must be positive for the threshold to exist, got {denom}"
        )));
    }
    Ok(1.0 / denom)
}

/// Necessary perturbation amplitude for a Gaussian population code of width `sigma` to
/// shift its argmax by two or more neurons.
pub fn popcode_failure_threshold(n: usize, sigma: f64) -> Result<f64> {
    let scale = (n as f64 * sigma).powi(2);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(domain(format!("n^2 sigma^2 must be positive and finite, got {scale}")));
    }
    let near = (-2.0 / scale).exp();
    let far = (-8.0 / scale).exp();
    let denom = near - far;
    if !(denom > 0.0) {
        return Err(domain("threshold denominator vanished (sigma too small for f64)"));
    }
    Ok((1.0 - near) / denom)
}

/// Sum of the target Gaussian (peak at 0) and the perturbation Gaussian (peak at `4/n`,
/// height `a`), evaluated at displacement `x`.
pub fn gaussian_pair_sum(n: usize, sigma: f64, a: f64, x: f64) -> f64 {
    let two_s2 = 2.0 * sigma * sigma;
    let sep = 4.0 / n as f64;
    (-(x * x) / two_s2).exp() + a * (-((sep - x) * (sep - x)) / two_s2).exp()
}

/// Whether the summed response at displacement `x` beats the response at the target,
/// i.e. `1 + a exp(-(4/n)^2 / 2s^2) < exp(-x^2 / 2s^2) + a exp(-(4/n - x)^2 / 2s^2)`.
///
/// Only meaningful for `x >= 2/n`; smaller displacements stay inside the tolerance.
pub fn gaussian_shift_condition(n: usize, sigma: f64, a: f64, x: f64) -> bool {
    gaussian_pair_sum(n, sigma, a, 0.0) < gaussian_pair_sum(n, sigma, a, x)
}
