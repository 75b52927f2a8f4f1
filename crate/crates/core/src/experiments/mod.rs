//! Synthetic 1-pixel localisation experiments.
//!
//! A network sees an `n`-pixel image with one active pixel and must report its position,
//! either as a single scalar, a one-hot vector or a Gaussian population code. Trained
//! networks are then probed with single-pixel impulses of varying amplitude, and their
//! internals are summarised by information-flow sparsity and final-layer extremes.

mod dataset;
mod extremes;
mod flow;
pub mod output;
mod robustness;
mod stats;

pub use dataset::{build_task_dataset, unit_input};
pub use extremes::{activation_extremes, final_layer_extremes, ActivationExtremes};
pub use flow::{compute_flow, flow_sparsity, mean_flow_sparsity, FlowMatrix, LayerFlow, UNUSED_FLOW_FRACTION};
pub use robustness::{
    analyze_models, default_amplitudes, derive_seed, evaluate_perturbations, run_robustness, ExperimentGrid,
    FailureCounts, GroupAnalysis, RobustnessReport, RobustnessRow, RobustnessRun, RunFailure, TrainedModel,
};
pub use stats::{mean_sd, pooled_sd, MeanSd};
