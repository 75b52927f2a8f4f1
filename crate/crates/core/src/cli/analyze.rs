use std::path::PathBuf;

use anyhow::{bail, Context as _, Result};
use serde::Serialize;

use popcode::experiments::output::{write_analysis_csv, write_comments};
use popcode::experiments::{
    analyze_models, compute_flow, final_layer_extremes, flow_sparsity, mean_flow_sparsity, unit_input,
    UNUSED_FLOW_FRACTION,
};
use popcode::nn::{MlpModel, OutputMode};

use super::common::{create, metadata_json, write_json, write_table, Context, Format};
use super::Outcome;

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Saved model files.
    #[arg(required = true)]
    pub models: Vec<PathBuf>,
    /// Active input pixel for the flow dump.
    #[arg(long, default_value_t = 10)]
    pub input_index: usize,
    /// Fraction of a layer's largest flow at or below which a connection is unused.
    #[arg(long, default_value_t = UNUSED_FLOW_FRACTION)]
    pub threshold: f64,
    #[arg(long, default_value = "analysis_out")]
    pub out_dir: PathBuf,
}

#[derive(Serialize)]
struct FlowRow<'a> {
    model: &'a str,
    layer: usize,
    out: usize,
    #[serde(rename = "in")]
    input: usize,
    flow: f64,
    unused: bool,
}

#[derive(Serialize)]
struct ModelRow<'a> {
    model: &'a str,
    method: OutputMode,
    depth: usize,
    sparsity_at_input: f64,
    sparsity_all_inputs: f64,
    final_max: f64,
    final_min: f64,
}

pub fn run(args: &Args, ctx: &Context) -> Result<Outcome> {
    let mut models = Vec::new();
    for path in &args.models {
        let model = MlpModel::load(path).with_context(|| format!("loading {}", path.display()))?;
        if args.input_index >= model.input_dim() {
            bail!("input index {} out of range for {} ({} inputs)", args.input_index, path.display(), model.input_dim());
        }
        models.push((path.display().to_string(), model));
    }

    let mut flow_rows = Vec::new();
    let mut model_rows = Vec::new();
    for (name, model) in &models {
        let n = model.input_dim();
        let input = unit_input(n, args.input_index);
        let flow = compute_flow(model, &input)?;
        for (k, layer) in flow.layers.iter().enumerate() {
            let cut = args.threshold * layer.max_abs();
            for o in 0..layer.out_dim {
                for i in 0..layer.in_dim {
                    let v = layer.get(o, i);
                    // `+ 0.0` turns the -0.0 of negative weights times silent inputs into 0.0
                    flow_rows.push(FlowRow { model: name, layer: k + 1, out: o, input: i, flow: v + 0.0, unused: v.abs() <= cut });
                }
            }
        }
        let all: Vec<Vec<f64>> = (0..n).map(|i| unit_input(n, i)).collect();
        let (max, min) = final_layer_extremes(model, &all)?;
        model_rows.push(ModelRow {
            model: name,
            method: model.output_mode(),
            depth: model.depth(),
            sparsity_at_input: flow_sparsity(&flow, args.threshold)?,
            sparsity_all_inputs: mean_flow_sparsity(model, &all, args.threshold)?,
            final_max: max,
            final_min: min,
        });
    }
    let groups = analyze_models(models.iter().map(|(_, m)| m))?;

    let meta = ctx.metadata(args);
    let dir = &args.out_dir;
    std::fs::create_dir_all(dir)?;
    let ext = ctx.format.extension();
    let paths = [dir.join(format!("flow.{ext}")), dir.join(format!("models.{ext}")), dir.join(format!("groups.{ext}"))];
    write_table(Some(&paths[0]), ctx.format, &meta, &flow_rows)?;
    write_table(Some(&paths[1]), ctx.format, &meta, &model_rows)?;
    match ctx.format {
        Format::Csv => {
            let mut w = create(Some(&paths[2]))?;
            write_comments(&mut w, &meta)?;
            write_analysis_csv(&mut w, &groups)?;
        }
        Format::Json => write_json(Some(&paths[2]), &serde_json::json!({ "metadata": metadata_json(&meta), "groups": groups }))?,
    }
    for p in &paths {
        println!("wrote {}", p.display());
    }
    for g in &groups {
        println!(
            "{:>16} depth {}: sparsity {:.4} (sd {:.4}), final-layer max {:.3}, min {:.3} over {} model(s)",
            g.method, g.depth, g.sparsity.mean, g.sparsity.sd, g.extremes.max.mean, g.extremes.min.mean, g.runs
        );
    }
    Ok(Outcome::Complete)
}
