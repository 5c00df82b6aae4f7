use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// What a run records about itself. No timestamps or thread counts, so that
/// equal flags give byte-identical files.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub flags: String,
}

impl Provenance {
    fn lines(&self) -> Vec<String> {
        vec![
            format!("tool: paircorr {}", env!("CARGO_PKG_VERSION")),
            format!("command: {}", self.command),
            format!("seed: {}", self.seed.map_or("none".to_string(), |s| s.to_string())),
            format!("flags: {}", self.flags),
        ]
    }

    fn to_json(&self) -> Value {
        json!({
            "tool": "paircorr",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "seed": self.seed,
            "flags": self.flags,
        })
    }
}

/// A result in both renderings; commands fill in what they support.
pub struct Report {
    pub csv: Option<Vec<String>>,
    pub json: Value,
    /// Extra `# key: value` lines appended after the CSV body.
    pub csv_footer: Vec<String>,
}

impl Report {
    pub fn new(csv: Vec<String>, json: Value) -> Self {
        Report { csv: Some(csv), json, csv_footer: Vec::new() }
    }

    pub fn json_only(json: Value) -> Self {
        Report { csv: None, json, csv_footer: Vec::new() }
    }

    pub fn render(&self, prov: &Provenance, format: Format) -> anyhow::Result<String> {
        match (format, &self.csv) {
            (Format::Csv, Some(rows)) => {
                let mut out = String::new();
                for l in prov.lines() {
                    writeln!(out, "# {l}")?;
                }
                for r in rows {
                    writeln!(out, "{r}")?;
                }
                for l in &self.csv_footer {
                    writeln!(out, "# {l}")?;
                }
                Ok(out)
            }
            (Format::Csv, None) => Err(paircorr_core::Error::InvalidParameter(format!("{} has no CSV form; use --format json", prov.command)).into()),
            (Format::Json, _) => {
                let v = json!({ "provenance": prov.to_json(), "result": self.json });
                Ok(serde_json::to_string_pretty(&v)? + "\n")
            }
        }
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
