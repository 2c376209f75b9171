use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;

pub const FORMAT_VERSION: u32 = 1;
pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub format_version: u32,
    pub command: String,
    pub config_hash: String,
    pub library_version: String,
    pub rng: String,
    pub wall_clock_seconds: f64,
    pub config: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, Value>,
}

impl ResultRecord {
    pub fn new(cfg: &RunConfig) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            command: cfg.command.clone(),
            config_hash: cfg.hash(),
            library_version: LIBRARY_VERSION.to_string(),
            rng: wallgrowth::dynamics::RNG_NAME.to_string(),
            wall_clock_seconds: 0.0,
            config: cfg.values().clone(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn put<T: Serialize>(&mut self, key: &str, value: T) {
        let v = serde_json::to_value(value).expect("output values serialize");
        self.outputs.insert(key.to_string(), v);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Writes to `path`, or to stdout when absent.
    pub fn emit(&self, path: Option<&Path>) -> Result<()> {
        let mut w = open_output(path)?;
        writeln!(w, "{}", self.to_json()).with_context(|| describe(path))?;
        w.flush().with_context(|| describe(path))
    }
}

fn describe(path: Option<&Path>) -> String {
    match path {
        Some(p) => format!("writing {}", p.display()),
        None => "writing stdout".to_string(),
    }
}

pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Line-delimited JSON writer that keeps the path for error messages.
pub struct JsonLines {
    w: Box<dyn Write>,
    label: String,
}

impl JsonLines {
    pub fn create(path: Option<&Path>) -> Result<Self> {
        Ok(Self { w: open_output(path)?, label: describe(path) })
    }

    pub fn line<T: Serialize>(&mut self, v: &T) -> Result<()> {
        serde_json::to_writer(&mut self.w, v).with_context(|| self.label.clone())?;
        self.w.write_all(b"\n").with_context(|| self.label.clone())
    }

    pub fn finish(mut self) -> Result<()> {
        self.w.flush().with_context(|| self.label.clone())
    }
}
