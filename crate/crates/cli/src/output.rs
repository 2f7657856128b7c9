//! CSV/JSON writers. Column order in CSV is the field order of the row
//! type; JSON keys are the field names.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{Context, Result};
use modgauss::sampler::MCResult;
use serde::Serialize;

use crate::config::{ExperimentConfig, OutputFormat};

#[derive(Debug, Serialize)]
pub struct Report<R: Serialize> {
    pub command: &'static str,
    pub ensemble: String,
    pub beta: f64,
    pub seed: u64,
    pub passed: bool,
    pub rows: Vec<R>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub mc_results: Vec<MCResult>,
}

impl<R: Serialize> Report<R> {
    pub fn new(command: &'static str, cfg: &ExperimentConfig) -> Self {
        Self {
            command,
            ensemble: cfg.kind.to_string(),
            beta: cfg.beta,
            seed: cfg.seed,
            passed: true,
            rows: Vec::new(),
            mc_results: Vec::new(),
        }
    }
}

pub fn write_report<R: Serialize>(
    report: &Report<R>,
    format: OutputFormat,
    path: Option<&std::path::Path>,
) -> Result<()> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut sink, report)?;
            writeln!(sink)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink);
            for row in &report.rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
    }
    sink.flush()?;
    Ok(())
}
