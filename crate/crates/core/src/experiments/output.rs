//! CSV serialisation of experiment results.
//!
//! Every file starts with `#`-prefixed metadata lines (parameters, seeds, timestamp)
//! followed by a plain CSV table. Only the metadata may differ between two runs with the
//! same seed; [`csv_body`] strips it for comparisons.

use std::io::Write;

use serde::Serialize;

use super::robustness::{GroupAnalysis, RobustnessReport};
use crate::error::Result;
use crate::nn::OutputMode;

/// Writes `# key: value` lines.
pub fn write_comments<W: Write>(w: &mut W, lines: &[(String, String)]) -> Result<()> {
    for (k, v) in lines {
        for (i, part) in v.lines().enumerate() {
            if i == 0 {
                writeln!(w, "# {k}: {part}")?;
            } else {
                writeln!(w, "#   {part}")?;
            }
        }
    }
    Ok(())
}

/// The non-comment lines of a CSV file.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

/// Metadata lines describing a robustness run.
pub fn robustness_metadata(report: &RobustnessReport) -> Vec<(String, String)> {
    let mut lines = vec![
        ("grid".to_string(), serde_json::to_string(&report.grid).expect("grid serialises")),
        (
            "run_seeds".to_string(),
            report.run_seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
        ),
    ];
    for f in &report.failures {
        lines.push((
            "excluded".to_string(),
            format!("method={} depth={} run={} reason={}", f.method, f.depth, f.run, f.reason),
        ));
    }
    lines
}

#[derive(Serialize)]
struct RobustnessRecord {
    method: OutputMode,
    depth: usize,
    amplitude: f64,
    mean_failure_rate: f64,
    sd: f64,
    runs: usize,
    augment: bool,
    seed: u64,
}

/// Writes the rows of `report`, optionally restricted to one method.
pub fn write_robustness_csv<W: Write>(w: W, report: &RobustnessReport, method: Option<OutputMode>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in report.rows.iter().filter(|r| method.is_none_or(|m| m == r.method)) {
        out.serialize(RobustnessRecord {
            method: r.method,
            depth: r.depth,
            amplitude: r.amplitude,
            mean_failure_rate: r.mean_failure_rate,
            sd: r.sd,
            runs: r.runs,
            augment: report.grid.augment,
            seed: report.grid.master_seed,
        })?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct AnalysisRecord {
    method: OutputMode,
    depth: usize,
    runs: usize,
    sparsity_mean: f64,
    sparsity_sd: f64,
    max_mean: f64,
    max_sd: f64,
    min_mean: f64,
    min_sd: f64,
}

pub fn write_analysis_csv<W: Write>(w: W, groups: &[GroupAnalysis]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for g in groups {
        out.serialize(AnalysisRecord {
            method: g.method,
            depth: g.depth,
            runs: g.runs,
            sparsity_mean: g.sparsity.mean,
            sparsity_sd: g.sparsity.sd,
            max_mean: g.extremes.max.mean,
            max_sd: g.extremes.max.sd,
            min_mean: g.extremes.min.mean,
            min_sd: g.extremes.min.sd,
        })?;
    }
    out.flush()?;
    Ok(())
}
