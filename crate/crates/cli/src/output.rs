//! Table model and writers.
//!
//! Every command renders one table. CSV output is comma-separated with LF
//! line endings and a '.' decimal point, the full run configuration echoed
//! in '#'-prefixed comment lines, and fit/validation footers as comments.
//! JSON output follows the fixed schema
//! `{"config": ..., "rows": [...], "fit": ... | null, "validation": ... | null}`.
//! Floats are serialized with 17 significant digits so they round-trip
//! exactly; identical runs produce byte-identical artifacts.

use serde_json::{json, Map, Value as Json};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    U64(u64),
    F64(f64),
    Str(String),
    Bool(bool),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::U64(v) => v.to_string(),
            Value::F64(v) => fmt_f64(*v),
            Value::Str(v) => v.clone(),
            Value::Bool(v) => v.to_string(),
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Value::U64(v) => json!(v),
            // Serialized as a string to keep the 17-digit round-trip contract
            // independent of the JSON library's float formatting.
            Value::F64(v) => json!(fmt_f64(*v)),
            Value::Str(v) => json!(v),
            Value::Bool(v) => json!(v),
        }
    }
}

/// 17 significant digits: lossless round-trip for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitRecord {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationRecord {
    pub pass: bool,
    pub max_z: f64,
}

/// A rendered command result.
#[derive(Debug, Clone, Default)]
pub struct Table {
    /// Configuration echo, in insertion order.
    pub config: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub fit: Option<FitRecord>,
    pub validation: Option<ValidationRecord>,
}

impl Table {
    pub fn push_config(&mut self, key: &str, value: impl ToString) {
        self.config.push((key.to_string(), value.to_string()));
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.config {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        if let Some(fit) = &self.fit {
            out.push_str(&format!(
                "# fit: slope = {}, intercept = {}, r2 = {}\n",
                fmt_f64(fit.slope),
                fmt_f64(fit.intercept),
                fmt_f64(fit.r2)
            ));
        }
        if let Some(v) = &self.validation {
            out.push_str(&format!(
                "# validation: pass = {}, max_z = {}\n",
                v.pass,
                fmt_f64(v.max_z)
            ));
        }
        out
    }

    pub fn to_json(&self) -> Json {
        let mut config = Map::new();
        for (k, v) in &self.config {
            config.insert(k.clone(), json!(v));
        }
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    obj.insert((*col).to_string(), cell.to_json());
                }
                Json::Object(obj)
            })
            .collect();
        json!({
            "config": Json::Object(config),
            "rows": rows,
            "fit": self.fit.map(|f| json!({
                "slope": fmt_f64(f.slope),
                "intercept": fmt_f64(f.intercept),
                "r2": fmt_f64(f.r2),
            })),
            "validation": self.validation.map(|v| json!({
                "pass": v.pass,
                "max_z": fmt_f64(v.max_z),
            })),
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json())
                    .expect("table serialization cannot fail");
                s.push('\n');
                s
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}
