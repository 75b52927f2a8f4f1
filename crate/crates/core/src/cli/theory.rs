use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;

use popcode::experiments::default_amplitudes;
use popcode::theory::{onehot_failure_threshold, popcode_failure_threshold, single_variable_failure_rate, TheoryParams};

use super::common::{write_table, Context};
use super::Outcome;

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Number of input pixels and output neurons.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Population-code tuning width.
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    /// Perturbation amplitudes (default 0.05, 0.10, ..., 1.00).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub amplitudes: Option<Vec<f64>>,
    /// Trained bias of the perturbed one-hot neuron.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b_k: f64,
    /// Trained bias of the target one-hot neuron.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b_i: f64,
    /// Output file (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    amplitude: f64,
    single_variable_failure_rate: f64,
    one_hot_can_fail: bool,
    population_code_can_fail: bool,
}

pub fn run(args: &Args, ctx: &Context) -> Result<Outcome> {
    let amplitudes = args.amplitudes.clone().unwrap_or_else(default_amplitudes);
    let popcode = popcode_failure_threshold(args.n, args.sigma)?;
    let onehot = onehot_failure_threshold(args.b_k, args.b_i)?;
    let rows = amplitudes
        .iter()
        .map(|&a| {
            TheoryParams::new(args.n, a, args.sigma)?;
            Ok(Row {
                amplitude: a,
                single_variable_failure_rate: single_variable_failure_rate(args.n, a),
                one_hot_can_fail: a > onehot,
                population_code_can_fail: a > popcode,
            })
        })
        .collect::<popcode::Result<Vec<_>>>()?;
    let mut meta = ctx.metadata(args);
    meta.push(("popcode_failure_threshold".into(), popcode.to_string()));
    meta.push(("onehot_failure_threshold".into(), onehot.to_string()));
    write_table(args.out.as_deref(), ctx.format, &meta, &rows)?;
    Ok(Outcome::Complete)
}
