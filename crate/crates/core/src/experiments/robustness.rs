use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{build_task_dataset, unit_input};
use super::extremes::{activation_extremes, ActivationExtremes};
use super::flow::{mean_flow_sparsity, UNUSED_FLOW_FRACTION};
use super::stats::{mean_sd, MeanSd};
use crate::error::{domain, Result};
use crate::nn::{train, MlpModel, OutputMode, Scratch, TrainConfig};
use crate::theory::DEFAULT_TOLERANCE_PIXELS;
use crate::tuning::{argmax, PopulationCodeSpec};

/// `{0.05, 0.10, ..., 1.00}`.
pub fn default_amplitudes() -> Vec<f64> {
    (1..=20).map(|k| k as f64 / 20.0).collect()
}

/// Independent 64-bit seed for a tagged sub-task of a seeded run.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(tag.wrapping_add(1));
    rng.next_u64()
}

fn model_tag(method: OutputMode, depth: usize) -> u64 {
    ((method as u64) << 32) | depth as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub n: usize,
    pub sigma: f64,
    pub methods: Vec<OutputMode>,
    pub depths: Vec<usize>,
    pub runs: usize,
    pub amplitudes: Vec<f64>,
    pub perturbations_per_input: usize,
    pub augment: bool,
    /// SD of the training-input noise when `augment` is set.
    pub augment_sd: f64,
    pub master_seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub tolerance_pixels: f64,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        Self {
            n: 20,
            sigma: 0.1,
            methods: OutputMode::ALL.to_vec(),
            depths: vec![1, 3, 5, 8],
            runs: 20,
            amplitudes: default_amplitudes(),
            perturbations_per_input: 1000,
            augment: false,
            augment_sd: 0.1,
            master_seed: 0,
            epochs: 5000,
            learning_rate: 0.005,
            tolerance_pixels: DEFAULT_TOLERANCE_PIXELS,
        }
    }
}

impl ExperimentGrid {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(domain(format!("n must be at least 2, got {}", self.n)));
        }
        if !(self.sigma > 0.0) {
            return Err(domain(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.methods.is_empty() || self.depths.is_empty() || self.amplitudes.is_empty() {
            return Err(domain("methods, depths and amplitudes must be non-empty"));
        }
        if self.depths.contains(&0) {
            return Err(domain("depths must be at least 1"));
        }
        if self.runs == 0 || self.perturbations_per_input == 0 || self.epochs == 0 {
            return Err(domain("runs, perturbations per input and epochs must be at least 1"));
        }
        if let Some(a) = self.amplitudes.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
            return Err(domain(format!("amplitude {a} outside (0, 1]")));
        }
        if !(self.learning_rate > 0.0) || !(self.tolerance_pixels > 0.0) || !(self.augment_sd >= 0.0) {
            return Err(domain("learning rate and tolerance must be positive, augmentation SD non-negative"));
        }
        Ok(())
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.master_seed.wrapping_add(run as u64)
    }

    pub fn model_seed(&self, run: usize, method: OutputMode, depth: usize) -> u64 {
        derive_seed(self.run_seed(run), model_tag(method, depth))
    }

    pub fn train_config(&self, method: OutputMode, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            loss: method.default_loss(),
            augment_noise_sd: if self.augment { self.augment_sd } else { 0.0 },
            seed,
            ..TrainConfig::default()
        }
    }

    fn code_spec(&self) -> Result<PopulationCodeSpec> {
        PopulationCodeSpec::new(self.n, self.sigma)
    }
}

/// Per-amplitude failure and trial counts from one model's perturbation sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureCounts {
    pub failures: Vec<u64>,
    pub trials: Vec<u64>,
}

impl FailureCounts {
    /// `None` for amplitudes that were never drawn.
    pub fn rates(&self) -> Vec<Option<f64>> {
        self.failures
            .iter()
            .zip(&self.trials)
            .map(|(&f, &t)| (t > 0).then(|| f as f64 / t as f64))
            .collect()
    }
}

/// For every clean input `e_i`, draws `perturbations_per_input` pairs of (pixel `k`,
/// amplitude `a`) uniformly, feeds `e_i + a e_k`, and counts decodes that miss `i / n` by
/// more than `tolerance`. Amplitude 0 is accepted here as a control.
pub fn evaluate_perturbations<R: Rng>(
    model: &MlpModel,
    amplitudes: &[f64],
    perturbations_per_input: usize,
    tolerance: f64,
    rng: &mut R,
) -> Result<FailureCounts> {
    if amplitudes.is_empty() {
        return Err(domain("no amplitudes to sample from"));
    }
    let n = model.input_dim();
    let mut counts = FailureCounts {
        failures: vec![0; amplitudes.len()],
        trials: vec![0; amplitudes.len()],
    };
    let mut scratch = Scratch::for_model(model);
    let mut x = vec![0.0; n];
    for i in 0..n {
        let target = i as f64 / n as f64;
        for _ in 0..perturbations_per_input {
            let k = rng.random_range(0..n);
            let bin = rng.random_range(0..amplitudes.len());
            x.fill(0.0);
            x[i] = 1.0;
            x[k] += amplitudes[bin];
            model.predict_into(&x, &mut scratch);
            let out = scratch.output();
            let decoded = match model.output_mode() {
                OutputMode::SingleVariable => out[0],
                _ => argmax(out).unwrap_or(0) as f64 / out.len() as f64,
            };
            counts.trials[bin] += 1;
            // NaN output never lands inside the tolerance
            if !((decoded - target).abs() <= tolerance) {
                counts.failures[bin] += 1;
            }
        }
    }
    Ok(counts)
}

/// A network trained inside a robustness run, kept for later analysis.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub method: OutputMode,
    pub depth: usize,
    pub run: usize,
    pub model: MlpModel,
    pub final_loss: f64,
    pub counts: FailureCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub method: OutputMode,
    pub depth: usize,
    pub run: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub method: OutputMode,
    pub depth: usize,
    pub amplitude: f64,
    pub mean_failure_rate: f64,
    pub sd: f64,
    /// Runs contributing to this row.
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub grid: ExperimentGrid,
    pub run_seeds: Vec<u64>,
    pub rows: Vec<RobustnessRow>,
    /// Runs excluded from the means because training diverged.
    pub failures: Vec<RunFailure>,
}

impl RobustnessReport {
    pub fn row(&self, method: OutputMode, depth: usize, amplitude: f64) -> Option<&RobustnessRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.depth == depth && (r.amplitude - amplitude).abs() < 1e-12)
    }

    pub fn series(&self, method: OutputMode, depth: usize) -> Vec<&RobustnessRow> {
        self.rows.iter().filter(|r| r.method == method && r.depth == depth).collect()
    }
}

#[derive(Debug, Clone)]
pub struct RobustnessRun {
    pub report: RobustnessReport,
    pub models: Vec<TrainedModel>,
}

/// Trains a fresh model per (run, method, depth) and sweeps perturbations over it.
///
/// Every job is seeded from `master_seed + run`, so the result is independent of how
/// many threads execute it. All models of one run see the same perturbation draws.
pub fn run_robustness(grid: &ExperimentGrid) -> Result<RobustnessRun> {
    grid.validate()?;
    let spec = grid.code_spec()?;
    let tolerance = grid.tolerance_pixels / grid.n as f64;
    let datasets = grid
        .methods
        .iter()
        .map(|&m| build_task_dataset(grid.n, m, &spec).map(|d| (m, d)))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, OutputMode, usize)> = (0..grid.runs)
        .flat_map(|run| {
            grid.methods
                .iter()
                .flat_map(move |&m| grid.depths.iter().map(move |&d| (run, m, d)))
        })
        .collect();

    let outcomes: Vec<std::result::Result<TrainedModel, RunFailure>> = jobs
        .par_iter()
        .map(|&(run, method, depth)| {
            let data = &datasets.iter().find(|(m, _)| *m == method).expect("dataset per method").1;
            let seed = grid.model_seed(run, method, depth);
            let fail = |reason: String| RunFailure { method, depth, run, reason };
            let mut model = MlpModel::stacked(grid.n, depth, method, seed).map_err(|e| fail(e.to_string()))?;
            let report = train(&mut model, data, &grid.train_config(method, seed)).map_err(|e| fail(e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(grid.run_seed(run));
            let counts = evaluate_perturbations(&model, &grid.amplitudes, grid.perturbations_per_input, tolerance, &mut rng)
                .map_err(|e| fail(e.to_string()))?;
            Ok(TrainedModel { method, depth, run, model, final_loss: report.final_loss, counts })
        })
        .collect();

    let mut models = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(m) => models.push(m),
            Err(f) => failures.push(f),
        }
    }

    let mut rows = Vec::new();
    for &method in &grid.methods {
        for &depth in &grid.depths {
            let group: Vec<Vec<Option<f64>>> = models
                .iter()
                .filter(|m| m.method == method && m.depth == depth)
                .map(|m| m.counts.rates())
                .collect();
            for (bin, &amplitude) in grid.amplitudes.iter().enumerate() {
                let rates: Vec<f64> = group.iter().filter_map(|r| r[bin]).collect();
                let stats = mean_sd(&rates);
                rows.push(RobustnessRow {
                    method,
                    depth,
                    amplitude,
                    mean_failure_rate: stats.mean,
                    sd: stats.sd,
                    runs: stats.count,
                });
            }
        }
    }

    Ok(RobustnessRun {
        report: RobustnessReport {
            grid: grid.clone(),
            run_seeds: (0..grid.runs).map(|r| grid.run_seed(r)).collect(),
            rows,
            failures,
        },
        models,
    })
}

/// Sparsity and activation-extreme summary for one (method, depth) group of models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAnalysis {
    pub method: OutputMode,
    pub depth: usize,
    pub runs: usize,
    /// Unused-connection fraction, averaged over the clean inputs per model.
    pub sparsity: MeanSd,
    pub extremes: ActivationExtremes,
}

/// Summarises models by (output mode, depth), measured on the `n` clean inputs.
pub fn analyze_models<'a>(models: impl IntoIterator<Item = &'a MlpModel>) -> Result<Vec<GroupAnalysis>> {
    let models: Vec<&MlpModel> = models.into_iter().collect();
    let mut keys: Vec<(OutputMode, usize)> = models.iter().map(|m| (m.output_mode(), m.depth())).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(method, depth)| {
            let group: Vec<&MlpModel> = models
                .iter()
                .copied()
                .filter(|m| m.output_mode() == method && m.depth() == depth)
                .collect();
            let n = group[0].input_dim();
            if group.iter().any(|m| m.input_dim() != n) {
                return Err(domain(format!("{method} depth-{depth} models disagree on the input size")));
            }
            let inputs: Vec<Vec<f64>> = (0..n).map(|i| unit_input(n, i)).collect();
            let sparsities = group
                .iter()
                .map(|m| mean_flow_sparsity(m, &inputs, UNUSED_FLOW_FRACTION))
                .collect::<Result<Vec<_>>>()?;
            Ok(GroupAnalysis {
                method,
                depth,
                runs: group.len(),
                sparsity: mean_sd(&sparsities),
                extremes: activation_extremes(&group, &inputs)?,
            })
        })
        .collect()
}
