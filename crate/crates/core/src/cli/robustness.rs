use std::path::PathBuf;

use anyhow::{bail, Result};
use serde::Serialize;

use popcode::experiments::output::{robustness_metadata, write_analysis_csv, write_comments, write_robustness_csv};
use popcode::experiments::{analyze_models, default_amplitudes, run_robustness, ExperimentGrid};
use popcode::nn::OutputMode;

use super::common::{create, metadata_json, write_json, Context, Format};
use super::Outcome;

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    /// Comma-separated output modes, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub methods: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1,3,5,8")]
    pub depths: Vec<usize>,
    /// Independent training runs per method and depth.
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// Use 100 runs, as in a full-scale study.
    #[arg(long, conflicts_with = "runs")]
    pub full: bool,
    /// Perturbation amplitudes (default 0.05, 0.10, ..., 1.00).
    #[arg(long, value_delimiter = ',')]
    pub amplitudes: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1000)]
    pub perturbations: usize,
    /// Train with Gaussian input noise.
    #[arg(long)]
    pub augment: bool,
    #[arg(long, default_value_t = 0.1)]
    pub augment_sd: f64,
    #[arg(long, default_value_t = 5000)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.005)]
    pub lr: f64,
    #[arg(long, default_value_t = 1.5)]
    pub tolerance_pixels: f64,
    /// Directory for result files.
    #[arg(long, default_value = "robustness_out")]
    pub out_dir: PathBuf,
    /// Also write every trained model as JSON.
    #[arg(long)]
    pub save_models: bool,
    /// Also write flow-sparsity and activation-extreme summaries.
    #[arg(long)]
    pub analysis: bool,
}

pub fn parse_methods(items: &[String]) -> Result<Vec<OutputMode>> {
    let mut methods = Vec::new();
    for item in items {
        if item.trim().eq_ignore_ascii_case("all") {
            methods.extend(OutputMode::ALL);
        } else {
            methods.push(item.trim().parse::<OutputMode>()?);
        }
    }
    let mut seen = Vec::new();
    methods.retain(|m| {
        let first = !seen.contains(m);
        seen.push(*m);
        first
    });
    if methods.is_empty() {
        bail!("no methods selected");
    }
    Ok(methods)
}

pub fn run(args: &Args, ctx: &Context) -> Result<Outcome> {
    let grid = ExperimentGrid {
        n: args.n,
        sigma: args.sigma,
        methods: parse_methods(&args.methods)?,
        depths: args.depths.clone(),
        runs: if args.full { 100 } else { args.runs },
        amplitudes: args.amplitudes.clone().unwrap_or_else(default_amplitudes),
        perturbations_per_input: args.perturbations,
        augment: args.augment,
        augment_sd: args.augment_sd,
        master_seed: ctx.seed,
        epochs: args.epochs,
        learning_rate: args.lr,
        tolerance_pixels: args.tolerance_pixels,
    };
    grid.validate()?;
    let run = run_robustness(&grid)?;
    let report = &run.report;
    let mut meta = ctx.metadata(args);
    meta.extend(robustness_metadata(report));
    let dir = &args.out_dir;
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    match ctx.format {
        Format::Csv => {
            for &m in &grid.methods {
                let path = dir.join(format!("robustness_{m}.csv"));
                let mut w = create(Some(&path))?;
                write_comments(&mut w, &meta)?;
                write_robustness_csv(&mut w, report, Some(m))?;
                written.push(path);
            }
            let path = dir.join("plot_data.csv");
            let mut w = create(Some(&path))?;
            write_comments(&mut w, &meta)?;
            let mut out = csv::Writer::from_writer(&mut w);
            // header written by hand so the column order follows the method list
            let mut header = vec!["depth".to_string(), "amplitude".to_string()];
            for m in &grid.methods {
                header.push(format!("{m}_mean"));
                header.push(format!("{m}_sd"));
            }
            out.write_record(&header)?;
            for &d in &grid.depths {
                for &a in &grid.amplitudes {
                    let mut rec = vec![d.to_string(), a.to_string()];
                    for &m in &grid.methods {
                        let row = report.row(m, d, a).expect("row per grid point");
                        rec.push(row.mean_failure_rate.to_string());
                        rec.push(row.sd.to_string());
                    }
                    out.write_record(&rec)?;
                }
            }
            out.flush()?;
            drop(out);
            written.push(path);
        }
        Format::Json => {
            let path = dir.join("robustness.json");
            write_json(Some(&path), &serde_json::json!({ "metadata": metadata_json(&meta), "report": report }))?;
            written.push(path);
        }
    }

    if args.analysis {
        let groups = analyze_models(run.models.iter().map(|m| &m.model))?;
        let path = dir.join(format!("analysis.{}", ctx.format.extension()));
        match ctx.format {
            Format::Csv => {
                let mut w = create(Some(&path))?;
                write_comments(&mut w, &meta)?;
                write_analysis_csv(&mut w, &groups)?;
            }
            Format::Json => {
                write_json(Some(&path), &serde_json::json!({ "metadata": metadata_json(&meta), "groups": groups }))?;
            }
        }
        written.push(path);
    }

    if args.save_models {
        let models_dir = dir.join("models");
        std::fs::create_dir_all(&models_dir)?;
        for m in &run.models {
            m.model.save(models_dir.join(format!("{}_d{}_r{}.json", m.method, m.depth, m.run)))?;
        }
        written.push(models_dir);
    }

    for p in &written {
        println!("wrote {}", p.display());
    }
    for &m in &grid.methods {
        for &d in &grid.depths {
            let series = report.series(m, d);
            let mean = series.iter().map(|r| r.mean_failure_rate).sum::<f64>() / series.len() as f64;
            println!("{m:>16} depth {d}: failure rate averaged over amplitudes {mean:.4}");
        }
    }
    if report.failures.is_empty() {
        Ok(Outcome::Complete)
    } else {
        for f in &report.failures {
            eprintln!("excluded run: method {} depth {} run {}: {}", f.method, f.depth, f.run, f.reason);
        }
        Ok(Outcome::Partial)
    }
}
