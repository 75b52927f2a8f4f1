use crate::error::{domain, Result};
use crate::nn::{OutputMode, Sample};
use crate::tuning::{encode_gaussian, encode_onehot, PopulationCodeSpec};

/// Basis vector `e_index` of length `n`.
pub fn unit_input(n: usize, index: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    x[index] = 1.0;
    x
}

/// The `n` clean examples: input `e_j`, target position `j / n` in the requested form.
pub fn build_task_dataset(n: usize, mode: OutputMode, spec: &PopulationCodeSpec) -> Result<Vec<Sample>> {
    if n < 2 {
        return Err(domain(format!("task needs at least 2 pixels, got {n}")));
    }
    if mode == OutputMode::PopulationCode && spec.n() != n {
        return Err(domain(format!("code has {} neurons but the task has {n} positions", spec.n())));
    }
    (0..n)
        .map(|j| {
            let target = match mode {
                OutputMode::SingleVariable => vec![j as f64 / n as f64],
                OutputMode::OneHot => encode_onehot(j, n)?.into_inner(),
                OutputMode::PopulationCode => encode_gaussian(j as f64 / n as f64, spec)?.into_inner(),
            };
            Ok(Sample {
                input: unit_input(n, j),
                target,
            })
        })
        .collect()
}
