use std::fmt;

use clap::ValueEnum;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

/// A command's result in both output shapes.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub params: Value,
    pub result: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// False when a verification inside the command failed.
    pub ok: bool,
}

impl Report {
    pub fn new(command: &'static str, params: Value, result: Value) -> Report {
        Report { command, params, result, header: Vec::new(), rows: Vec::new(), ok: true }
    }

    pub fn table<S: ToString>(mut self, header: &[&str], rows: impl IntoIterator<Item = Vec<S>>) -> Report {
        self.header = header.iter().map(|h| h.to_string()).collect();
        self.rows = rows.into_iter().map(|r| r.into_iter().map(|c| c.to_string()).collect()).collect();
        self
    }

    pub fn with_status(mut self, ok: bool) -> Report {
        self.ok = ok;
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let doc = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": self.command,
                    "params": self.params,
                    "result": self.result,
                    "ok": self.ok,
                });
                serde_json::to_string_pretty(&doc).expect("json values always serialize") + "\n"
            }
            Format::Tsv => {
                let mut out = self.header.join("\t") + "\n";
                for row in &self.rows {
                    out += &row.iter().map(|c| c.replace(['\t', '\n'], " ")).collect::<Vec<_>>().join("\t");
                    out.push('\n');
                }
                out
            }
        }
    }
}

/// Exit status 2 with the flag at fault, or 1 for a failed run.
#[derive(Debug)]
pub enum CliError {
    Usage { flag: String, message: String },
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage { flag, message } => write!(f, "invalid value for {flag}: {message}"),
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

pub fn usage<E: fmt::Display>(flag: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Usage { flag: flag.to_string(), message: e.to_string() }
}
