//! One-dimensional population codes.
//!
//! A code of size `n` has one neuron per preferred value `j / n`, `j = 0..n`. The Gaussian
//! encoder is linear (no wraparound at the ends of `[0, 1)`); the one-hot encoder is the
//! `sigma -> 0` limit of it.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Preferred values and tuning width of a 1D Gaussian population code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationCodeSpec {
    n: usize,
    sigma: f64,
}

impl PopulationCodeSpec {
    pub fn new(n: usize, sigma: f64) -> Result<Self> {
        if n == 0 {
            return Err(domain("population code needs at least one neuron"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(domain(format!("tuning width must be positive, got {sigma}")));
        }
        Ok(Self { n, sigma })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn preferred_value(&self, j: usize) -> f64 {
        j as f64 / self.n as f64
    }

    pub fn preferred_values(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.preferred_value(j)).collect()
    }

    pub fn encode(&self, value: f64) -> Result<CodeVector> {
        encode_gaussian(value, self)
    }
}

/// Activations of a population of neurons, either an encoder target or raw network output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CodeVector(Vec<f64>);

impl CodeVector {
    pub fn new(activations: Vec<f64>) -> Self {
        Self(activations)
    }

    pub fn activations(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for CodeVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for CodeVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// `activations[j] = exp(-(value - j/n)^2 / (2 sigma^2))`.
pub fn encode_gaussian(value: f64, spec: &PopulationCodeSpec) -> Result<CodeVector> {
    if !(0.0..1.0).contains(&value) {
        return Err(domain(format!("value {value} outside [0, 1)")));
    }
    let denom = 2.0 * spec.sigma * spec.sigma;
    Ok(CodeVector(
        (0..spec.n)
            .map(|j| {
                let d = value - spec.preferred_value(j);
                (-(d * d) / denom).exp()
            })
            .collect(),
    ))
}

pub fn encode_onehot(index: usize, n: usize) -> Result<CodeVector> {
    if index >= n {
        return Err(domain(format!("one-hot index {index} out of range 0..{n}")));
    }
    let mut v = vec![0.0; n];
    v[index] = 1.0;
    Ok(CodeVector(v))
}

/// Index of the most active neuron; ties go to the lowest index. `None` for an empty slice.
pub fn argmax(activations: &[f64]) -> Option<usize> {
    let mut iter = activations.iter().enumerate();
    let (mut best, mut best_val) = iter.next().map(|(i, &v)| (i, v))?;
    for (i, &v) in iter {
        if v > best_val || (best_val.is_nan() && !v.is_nan()) {
            best = i;
            best_val = v;
        }
    }
    Some(best)
}

/// Preferred value `argmax / n` of the most active neuron.
pub fn decode_argmax(code: &[f64]) -> Result<f64> {
    argmax(code)
        .map(|i| i as f64 / code.len() as f64)
        .ok_or_else(|| domain("cannot decode an empty code"))
}

/// `true` when the decoded value misses `target` by more than `tolerance`.
pub fn decode_error(code: &[f64], target: f64, tolerance: f64) -> Result<bool> {
    if !(tolerance > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tolerance}")));
    }
    Ok((decode_argmax(code)? - target).abs() > tolerance)
}
