//! Stable CSV/JSON emission of result tables.
//!
//! CSV output starts with `#` comment lines carrying the command and the
//! resolved configuration, then a header row `n,functional,value,stderr,
//! samples,seed`. JSON output holds the same rows plus any structured extras.
//! Floats print with 12 significant digits and exact values as `num/den`.

use std::fmt::Write as _;
use std::path::Path;

use num_rational::BigRational;
use serde::ser::{Serialize, SerializeStruct, Serializer};
use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::rational::format_big;

pub const CSV_HEADER: [&str; 6] = ["n", "functional", "value", "stderr", "samples", "seed"];

/// `%.12g`: 12 significant digits, trailing zeros dropped.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds through the 12-digit text form, so CSV and JSON agree.
fn rounded(x: f64) -> f64 {
    format_float(x).parse().unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Exact(BigRational),
}

impl Value {
    fn text(&self) -> String {
        match self {
            Value::Float(x) => format_float(*x),
            Value::Exact(r) => format_big(r),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Float(x) => float_json(*x),
            Value::Exact(r) => Json::String(format_big(r)),
        }
    }
}

fn float_json(x: f64) -> Json {
    serde_json::Number::from_f64(rounded(x)).map_or_else(|| Json::String(format_float(x)), Json::Number)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: usize,
    pub functional: String,
    pub value: Value,
    pub stderr: Option<f64>,
    pub samples: Option<u64>,
    pub seed: u64,
}

impl Serialize for Row {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Row", 6)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("functional", &self.functional)?;
        st.serialize_field("value", &self.value.json())?;
        st.serialize_field("stderr", &self.stderr.map(float_json))?;
        st.serialize_field("samples", &self.samples)?;
        st.serialize_field("seed", &self.seed)?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(text: &str) -> Result<Format> {
        match text {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::param("format", format!("expected csv or json, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: Json,
    pub rows: Vec<Row>,
    /// Structured results beyond the table (lemma reports, trends, …).
    pub extra: Json,
}

impl Report {
    pub fn new(command: impl Into<String>, config: Json) -> Report {
        Report {
            command: command.into(),
            config,
            rows: Vec::new(),
            extra: Json::Null,
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        if self.rows.is_empty() {
            return Err(Error::EmptyInput("results"));
        }
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => {
                let doc = json!({
                    "command": self.command,
                    "config": self.config,
                    "rows": self.rows,
                    "extra": self.extra,
                });
                let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))?;
                text.push('\n');
                Ok(text)
            }
        }
    }

    fn render_csv(&self) -> Result<String> {
        let mut out = String::new();
        let compact = |v: &Json| serde_json::to_string(v).map_err(|e| Error::Parse(e.to_string()));
        writeln!(out, "# command: {}", self.command).expect("string write");
        writeln!(out, "# config: {}", compact(&self.config)?).expect("string write");
        if !self.extra.is_null() {
            writeln!(out, "# extra: {}", compact(&self.extra)?).expect("string write");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(CSV_HEADER).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                r.functional.clone(),
                r.value.text(),
                r.stderr.map(format_float).unwrap_or_default(),
                r.samples.map(|s| s.to_string()).unwrap_or_default(),
                r.seed.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).expect("utf-8 csv"));
        Ok(out)
    }

    pub fn write(&self, format: Format, path: &Path) -> Result<()> {
        let text = self.render(format)?;
        std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

/// Parses a rendered CSV table back into `(header, rows)`, skipping the
/// comment lines.
pub fn read_csv_rows(text: &str) -> Result<Vec<Vec<String>>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    if header != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    r.records()
        .map(|rec| {
            rec.map(|r| r.iter().map(String::from).collect())
                .map_err(|e| Error::Parse(e.to_string()))
        })
        .collect()
}
