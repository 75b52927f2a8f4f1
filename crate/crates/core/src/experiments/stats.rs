use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
    pub sd: f64,
    pub count: usize,
}

pub fn mean_sd(values: &[f64]) -> MeanSd {
    let count = values.len();
    if count == 0 {
        return MeanSd { mean: f64::NAN, sd: f64::NAN, count };
    }
    let mean = values.iter().sum::<f64>() / count as f64;
    let sd = if count > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
    } else {
        0.0
    };
    MeanSd { mean, sd, count }
}

/// Root mean square of two standard deviations.
pub fn pooled_sd(a: f64, b: f64) -> f64 {
    ((a * a + b * b) / 2.0).sqrt()
}
