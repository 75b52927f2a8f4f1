//! Population codes as neural-network output layers.
//!
//! The crate is organised around five pieces:
//!
//! - [`tuning`]: 1D Gaussian population codes and one-hot vectors, with argmax decoding.
//! - [`nn`]: a small dense-network engine (forward, backprop, MSE / cross-entropy, Adam)
//!   in 64-bit floats, with a versioned JSON model format.
//! - [`theory`]: closed-form failure rates and thresholds for single-layer linear networks
//!   perturbed by a single-pixel input impulse.
//! - [`experiments`]: the synthetic 1-pixel localisation task, perturbation sweeps,
//!   information-flow sparsity and final-layer activation extremes.
//! - [`so3`]: a symmetry-aware population code over rotations built from a spherical
//!   Fibonacci lattice of axes and a circle of angles.

pub mod error;
pub mod experiments;
pub mod nn;
pub mod so3;
pub mod theory;
pub mod tuning;

pub use error::{Error, Result};
pub use tuning::{CodeVector, PopulationCodeSpec};
