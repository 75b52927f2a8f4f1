use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context as _, Result};
use clap::ValueEnum;
use serde::Serialize;

use super::Command;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub struct Context<'a> {
    pub seed: u64,
    pub format: Format,
    pub command: &'a Command,
}

impl Context<'_> {
    /// Provenance lines shared by every output file.
    pub fn metadata(&self, params: &impl Serialize) -> Vec<(String, String)> {
        let generated = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        vec![
            ("tool".into(), format!("popcode {}", env!("CARGO_PKG_VERSION"))),
            ("command".into(), command_name(self.command).into()),
            ("seed".into(), self.seed.to_string()),
            ("params".into(), serde_json::to_string(params).expect("parameters serialise")),
            ("generated_unix".into(), generated.to_string()),
        ]
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Theory(_) => "theory",
        Command::Train(_) => "train",
        Command::Robustness(_) => "robustness",
        Command::Analyze(_) => "analyze",
        Command::So3(_) => "so3",
    }
}

/// A file, or stdout when no path is given.
pub fn create(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes `rows` as `#`-commented CSV, or as a JSON object with `metadata` and `rows`.
pub fn write_table<R: Serialize>(
    path: Option<&Path>,
    format: Format,
    metadata: &[(String, String)],
    rows: &[R],
) -> Result<()> {
    let mut w = create(path)?;
    match format {
        Format::Csv => {
            popcode::experiments::output::write_comments(&mut w, metadata)?;
            let mut out = csv::Writer::from_writer(&mut w);
            for r in rows {
                out.serialize(r)?;
            }
            out.flush()?;
        }
        Format::Json => {
            let doc = serde_json::json!({ "metadata": metadata_json(metadata), "rows": rows });
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Metadata as a JSON object; values that are themselves JSON are embedded as such.
pub fn metadata_json(metadata: &[(String, String)]) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (k, v) in metadata {
        let value = serde_json::from_str(v).unwrap_or_else(|_| serde_json::Value::String(v.clone()));
        match map.get_mut(k) {
            Some(serde_json::Value::Array(items)) => items.push(value),
            Some(existing) => *existing = serde_json::Value::Array(vec![existing.clone(), value]),
            None => {
                map.insert(k.clone(), value);
            }
        }
    }
    serde_json::Value::Object(map)
}

pub fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
