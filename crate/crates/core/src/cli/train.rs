use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;

use popcode::experiments::{build_task_dataset, unit_input};
use popcode::nn::{train, AdamParams, MlpModel, Optimizer, OutputMode, TrainConfig};
use popcode::tuning::{argmax, PopulationCodeSpec};

use super::common::{write_table, Context};
use super::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerArg {
    Adam,
    Sgd,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// single_variable, one_hot or population_code.
    #[arg(long)]
    pub method: OutputMode,
    /// Number of stacked linear layers.
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Tuning width of population-code targets.
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    #[arg(long, default_value_t = 5000)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.005)]
    pub lr: f64,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Adam)]
    pub optimizer: OptimizerArg,
    /// Add Gaussian noise to the training inputs every epoch.
    #[arg(long)]
    pub augment: bool,
    #[arg(long, default_value_t = 0.1)]
    pub augment_sd: f64,
    /// Where to save the trained model (JSON).
    #[arg(long, default_value = "model.json")]
    pub out: PathBuf,
    /// Optional per-epoch loss table.
    #[arg(long)]
    pub loss_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct LossRow {
    epoch: usize,
    loss: f64,
}

/// Position decoded from the network's output for a clean input.
pub fn decode_output(model: &MlpModel, output: &[f64]) -> f64 {
    match model.output_mode() {
        OutputMode::SingleVariable => output[0],
        _ => argmax(output).unwrap_or(0) as f64 / output.len() as f64,
    }
}

pub fn run(args: &Args, ctx: &Context) -> Result<Outcome> {
    let spec = PopulationCodeSpec::new(args.n, args.sigma)?;
    let data = build_task_dataset(args.n, args.method, &spec)?;
    let mut model = MlpModel::stacked(args.n, args.depth, args.method, ctx.seed)?;
    let config = TrainConfig {
        learning_rate: args.lr,
        epochs: args.epochs,
        optimizer: match args.optimizer {
            OptimizerArg::Adam => Optimizer::Adam(AdamParams::default()),
            OptimizerArg::Sgd => Optimizer::Sgd,
        },
        loss: args.method.default_loss(),
        augment_noise_sd: if args.augment { args.augment_sd } else { 0.0 },
        seed: ctx.seed,
    };
    let report = train(&mut model, &data, &config)?;
    model.save(&args.out)?;

    if let Some(path) = &args.loss_out {
        let rows: Vec<LossRow> =
            report.loss_history.iter().enumerate().map(|(epoch, &loss)| LossRow { epoch, loss }).collect();
        write_table(Some(path), ctx.format, &ctx.metadata(args), &rows)?;
    }

    let tolerance = 1.5 / args.n as f64;
    let correct = (0..args.n)
        .filter(|&i| {
            let out = model.predict(&unit_input(args.n, i)).expect("valid input");
            (decode_output(&model, &out) - i as f64 / args.n as f64).abs() <= tolerance
        })
        .count();
    println!(
        "trained {} depth {} (seed {}): final loss {:.6e}, {}/{} clean inputs decoded within tolerance, saved to {}",
        args.method,
        args.depth,
        ctx.seed,
        report.final_loss,
        correct,
        args.n,
        args.out.display()
    );
    Ok(Outcome::Complete)
}
