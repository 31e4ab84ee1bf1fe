//! Output envelope: every run renders its resolved configuration plus data
//! rows as CSV (with a `#`-prefixed header block) or as a single JSON
//! object. Outputs carry no timestamps or machine identifiers, so a rerun
//! with the same flags reproduces them byte for byte.

use std::fs;
use std::io::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

use digit_spectra_core::{Error, Result};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A finite float as a JSON number; non-finite values degrade to strings.
pub fn num(v: f64) -> Value {
    Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(format!("{v}")))
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        other => other.to_string(),
    }
}

/// One run's report: configuration echo, summary values, and data rows.
pub struct Output {
    command: &'static str,
    /// `(flag, value)` pairs in flag order; `"true"`/`"false"` mark boolean
    /// flags. These reconstruct the exact command line in `# args:`.
    config: Vec<(String, String)>,
    extras: Vec<(String, Value)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
    /// Set for reports that are JSON-shaped regardless of `--format`.
    force_json: bool,
}

impl Output {
    pub fn new(command: &'static str) -> Self {
        Output {
            command,
            config: Vec::new(),
            extras: Vec::new(),
            columns: Vec::new(),
            rows: Vec::new(),
            force_json: false,
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn config_flag(&mut self, key: &str, on: bool) -> &mut Self {
        self.config.push((key.to_string(), on.to_string()));
        self
    }

    pub fn extra(&mut self, key: &str, value: Value) -> &mut Self {
        self.extras.push((key.to_string(), value));
        self
    }

    pub fn columns(&mut self, cols: &[&'static str]) -> &mut Self {
        self.columns = cols.to_vec();
        self
    }

    pub fn row(&mut self, row: Vec<Value>) -> &mut Self {
        self.rows.push(row);
        self
    }

    pub fn force_json(&mut self) -> &mut Self {
        self.force_json = true;
        self
    }

    /// The resolved command line, minus execution-only flags (`--threads`,
    /// `--output`): rerunning these tokens reproduces the data rows.
    fn args_line(&self) -> String {
        let mut tokens = vec![self.command.to_string()];
        for (k, v) in &self.config {
            match v.as_str() {
                "true" => tokens.push(format!("--{k}")),
                "false" => {}
                "" => tokens.push(format!("--{k}=")),
                _ => {
                    tokens.push(format!("--{k}"));
                    tokens.push(v.clone());
                }
            }
        }
        tokens.join(" ")
    }

    pub fn render(&self, format: Format) -> String {
        if self.force_json || format == Format::Json {
            self.render_json()
        } else {
            self.render_csv()
        }
    }

    fn render_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# digit-spectra {VERSION}\n"));
        s.push_str(&format!("# args: {}\n", self.args_line()));
        for (k, v) in &self.config {
            s.push_str(&format!("# {k}: {v}\n"));
        }
        for (k, v) in &self.extras {
            s.push_str(&format!("# {k}: {}\n", csv_cell(v)));
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    fn render_json(&self) -> String {
        let mut root = Map::new();
        root.insert("tool".into(), Value::String("digit-spectra".into()));
        root.insert("version".into(), Value::String(VERSION.into()));
        root.insert("command".into(), Value::String(self.command.into()));
        root.insert("args".into(), Value::String(self.args_line()));
        let mut cfg = Map::new();
        for (k, v) in &self.config {
            cfg.insert(k.clone(), Value::String(v.clone()));
        }
        root.insert("config".into(), Value::Object(cfg));
        for (k, v) in &self.extras {
            root.insert(k.clone(), v.clone());
        }
        if !self.columns.is_empty() {
            root.insert(
                "columns".into(),
                Value::Array(
                    self.columns
                        .iter()
                        .map(|c| Value::String((*c).into()))
                        .collect(),
                ),
            );
            root.insert(
                "rows".into(),
                Value::Array(self.rows.iter().cloned().map(Value::Array).collect()),
            );
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(root))
            .expect("report serialization cannot fail");
        s.push('\n');
        s
    }

    /// Write to `path`, with `-` meaning stdout.
    pub fn write(&self, path: &str, format: Format) -> Result<()> {
        let content = self.render(format);
        if path == "-" {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::invalid(format!("cannot write to stdout: {e}")))
        } else {
            fs::write(path, content)
                .map_err(|e| Error::invalid(format!("cannot write {path}: {e}")))
        }
    }
}
