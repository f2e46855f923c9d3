use std::fs;
use std::io::{self, Write};
use std::path::Path;

use expsmooth::{Backend, ExecMode};
use serde::Serialize;
use serde_json::Value;

use crate::args::{Command, Format, GlobalOpts};
use crate::error::CliError;

/// Everything that determines a report, embedded in each one.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub args: Command,
    pub order: u64,
    #[serde(flatten)]
    pub backend: Backend,
    pub precision: usize,
    pub kappa: f64,
    pub delta: f64,
    pub format: Format,
    pub output: Option<String>,
    pub jobs: usize,
    pub tool_version: &'static str,
}

impl RunConfig {
    pub fn mode(&self) -> ExecMode {
        if self.jobs == 1 || !cfg!(feature = "parallel") {
            ExecMode::Sequential
        } else {
            ExecMode::Parallel
        }
    }
}

pub fn run_config(global: &GlobalOpts, command: &Command, backend: Backend) -> RunConfig {
    RunConfig {
        command: command.name(),
        args: command.clone(),
        order: global.order.unwrap_or_else(|| command.default_order()),
        backend,
        precision: global.precision,
        kappa: global.kappa,
        delta: global.delta,
        format: global.format,
        output: global.output.as_ref().map(|p| p.display().to_string()),
        jobs: global.jobs,
        tool_version: env!("CARGO_PKG_VERSION"),
    }
}

/// A finished pipeline: the JSON result plus a flat table for CSV output.
pub struct Report {
    pub result: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(
        result: impl Serialize,
        header: &[&str],
        rows: Vec<Vec<String>>,
    ) -> Result<Self, CliError> {
        Ok(Report {
            result: serde_json::to_value(result).map_err(|e| CliError::Io(e.to_string()))?,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        })
    }

    pub fn render(&self, config: &RunConfig) -> Result<String, CliError> {
        let io_err = |e: &dyn std::fmt::Display| CliError::Io(e.to_string());
        match config.format {
            Format::Json => {
                let doc = serde_json::json!({ "config": config, "result": self.result });
                let mut s = serde_json::to_string_pretty(&doc).map_err(|e| io_err(&e))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).map_err(|e| io_err(&e))?;
                for row in &self.rows {
                    w.write_record(row).map_err(|e| io_err(&e))?;
                }
                let body = w.into_inner().map_err(|e| io_err(&e))?;
                let cfg = serde_json::to_string(config).map_err(|e| io_err(&e))?;
                Ok(format!(
                    "# config: {cfg}\n{}",
                    String::from_utf8_lossy(&body)
                ))
            }
        }
    }
}

pub fn emit(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}
