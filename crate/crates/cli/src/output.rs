//! Record encoding shared by the CSV and JSON writers.
//!
//! Floats are printed with 17 significant digits in both encodings, so the
//! two carry bit-identical numbers. Non-finite floats become `null` in JSON
//! and `inf`/`-inf`/`nan` in CSV.

use std::fmt::Write as _;

use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::value::RawValue;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    UInt(u64),
    Float(f64),
    Text(String),
    Null,
}

impl Value {
    pub fn opt_float(v: Option<f64>) -> Self {
        v.map_or(Value::Null, Value::Float)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::UInt(v)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_owned())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

/// 17 significant digits, scientific notation.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Value {
    fn csv_cell(&self) -> String {
        match self {
            Value::UInt(v) => v.to_string(),
            Value::Float(v) if v.is_finite() => format_float(*v),
            Value::Float(v) if v.is_nan() => "nan".to_owned(),
            Value::Float(v) if *v > 0.0 => "inf".to_owned(),
            Value::Float(_) => "-inf".to_owned(),
            Value::Text(s) => csv_escape(s),
            Value::Null => String::new(),
        }
    }

    fn echo(&self) -> String {
        match self {
            Value::Text(s) => s.clone(),
            Value::Null => "none".to_owned(),
            other => other.csv_cell(),
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::UInt(v) => serializer.serialize_u64(*v),
            Value::Float(v) if v.is_finite() => {
                let raw =
                    RawValue::from_string(format_float(*v)).map_err(serde::ser::Error::custom)?;
                raw.serialize(serializer)
            }
            Value::Float(_) | Value::Null => serializer.serialize_none(),
            Value::Text(s) => serializer.serialize_str(s),
        }
    }
}

/// Ordered `(column, value)` pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Record(pub Vec<(&'static str, Value)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &'static str, value: impl Into<Value>) -> Self {
        self.0.push((key, value.into()));
        self
    }

    pub fn columns(&self) -> Vec<&'static str> {
        self.0.iter().map(|(k, _)| *k).collect()
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitSummary {
    pub quantity: String,
    pub exponent: f64,
    pub log_prefactor: f64,
    pub r_squared: f64,
    pub points: u64,
}

impl FitSummary {
    fn record(&self) -> Record {
        Record::new()
            .with("quantity", self.quantity.as_str())
            .with("exponent", self.exponent)
            .with("log_prefactor", self.log_prefactor)
            .with("r_squared", self.r_squared)
            .with("points", self.points)
    }
}

/// Everything one run emits.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub config: Record,
    pub records: Vec<Record>,
    pub fit: Option<FitSummary>,
}

#[derive(serde::Serialize)]
struct JsonDocument<'a> {
    config: &'a Record,
    records: &'a [Record],
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<Record>,
}

impl Output {
    pub fn to_json(&self) -> String {
        let doc = JsonDocument {
            config: &self.config,
            records: &self.records,
            fit: self.fit.as_ref().map(FitSummary::record),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("records always serialize");
        text.push('\n');
        text
    }

    /// `#` lines echo the config, then a header and one line per record.
    /// A fit, when present, follows as a `fit,...` row under its own
    /// `#` column line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.config.0 {
            let _ = writeln!(out, "# {k}={}", v.echo());
        }
        if let Some(first) = self.records.first() {
            out.push_str(&first.columns().join(","));
            out.push('\n');
        }
        for record in &self.records {
            let cells: Vec<String> = record.0.iter().map(|(_, v)| v.csv_cell()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        if let Some(fit) = &self.fit {
            let rec = fit.record();
            let _ = writeln!(out, "# fit,{}", rec.columns().join(","));
            let cells: Vec<String> = rec.0.iter().map(|(_, v)| v.csv_cell()).collect();
            let _ = writeln!(out, "fit,{}", cells.join(","));
        }
        out
    }
}

/// Structural check of a parsed JSON document: `config` object, `records`
/// array of flat objects sharing one key order, optional `fit` object with
/// numeric `exponent`, `log_prefactor` and `r_squared`.
pub fn validate_json(doc: &serde_json::Value) -> Result<(), String> {
    let obj = doc.as_object().ok_or("top level is not an object")?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "config" | "records" | "fit") {
            return Err(format!("unexpected top-level key {key:?}"));
        }
    }
    let config = obj.get("config").ok_or("missing config")?;
    if !config
        .as_object()
        .is_some_and(|c| c.contains_key("command"))
    {
        return Err("config must be an object naming the command".into());
    }
    let records = obj
        .get("records")
        .and_then(|r| r.as_array())
        .ok_or("records must be an array")?;
    let mut columns: Option<Vec<&String>> = None;
    for (i, r) in records.iter().enumerate() {
        let r = r
            .as_object()
            .ok_or(format!("record {i} is not an object"))?;
        if r.values().any(|v| v.is_object() || v.is_array()) {
            return Err(format!("record {i} is not flat"));
        }
        let keys: Vec<&String> = r.keys().collect();
        match &columns {
            None => columns = Some(keys),
            Some(c) if *c == keys => {}
            Some(_) => return Err(format!("record {i} has different columns")),
        }
    }
    if let Some(fit) = obj.get("fit") {
        let fit = fit.as_object().ok_or("fit must be an object")?;
        for key in ["exponent", "log_prefactor", "r_squared"] {
            if !fit.get(key).is_some_and(serde_json::Value::is_number) {
                return Err(format!("fit.{key} must be a number"));
            }
        }
        let r2 = fit["r_squared"].as_f64().unwrap_or(f64::NAN);
        if !(0.0..=1.0).contains(&r2) {
            return Err(format!("fit.r_squared = {r2} outside [0, 1]"));
        }
    }
    Ok(())
}
