//! Deterministic TSV and JSON rendering of command results.
//!
//! TSV lines have the form `key\tvalue`. Vectors are space separated, vertex
//! sets are written as `{1,2}`, and a matrix takes one line per row,
//! `key\trow\tvalues`. Records take one line each with tab-separated fields.

use serde_json::{Map, Number, Value as Json};

use crate::Matrix;

pub const DEFAULT_PRECISION: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
    Reals(Vec<f64>),
    /// 1-based vertex ids.
    Vertices(Vec<usize>),
    /// 1-based vertex sets.
    VertexSets(Vec<Vec<usize>>),
    Matrix(Matrix),
    Records(Vec<Vec<(String, Value)>>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputDocument {
    pub entries: Vec<(String, Value)>,
}

impl OutputDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: Value) -> &mut Self {
        self.entries.push((key.to_string(), value));
        self
    }

    pub fn render_tsv(&self, precision: usize) -> String {
        let mut out = String::new();
        for (key, value) in &self.entries {
            match value {
                Value::Matrix(m) => {
                    for (i, row) in m.row_iter().enumerate() {
                        let cells: Vec<String> = row.iter().map(|x| format_number(*x, precision)).collect();
                        out.push_str(&format!("{key}\t{}\t{}\n", i + 1, cells.join(" ")));
                    }
                }
                Value::Records(rows) => {
                    for row in rows {
                        let cells: Vec<String> = row.iter().map(|(_, v)| tsv_scalar(v, precision)).collect();
                        out.push_str(&format!("{key}\t{}\n", cells.join("\t")));
                    }
                }
                v => out.push_str(&format!("{key}\t{}\n", tsv_scalar(v, precision))),
            }
        }
        out
    }

    pub fn to_json(&self, precision: usize) -> Json {
        let mut map = Map::new();
        for (key, value) in &self.entries {
            map.insert(key.clone(), json_value(value, precision));
        }
        Json::Object(map)
    }

    pub fn render_json(&self, precision: usize) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json(precision)).expect("serializable");
        s.push('\n');
        s
    }
}

fn set_text(set: &[usize]) -> String {
    let ids: Vec<String> = set.iter().map(usize::to_string).collect();
    format!("{{{}}}", ids.join(","))
}

fn tsv_scalar(v: &Value, precision: usize) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Real(x) => format_number(*x, precision),
        Value::Bool(b) => b.to_string(),
        Value::Text(s) => s.clone(),
        Value::Reals(xs) => xs
            .iter()
            .map(|x| format_number(*x, precision))
            .collect::<Vec<_>>()
            .join(" "),
        Value::Vertices(vs) => vs.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
        Value::VertexSets(sets) => sets.iter().map(|s| set_text(s)).collect::<Vec<_>>().join(" "),
        Value::Matrix(m) => m
            .row_iter()
            .map(|r| {
                r.iter()
                    .map(|x| format_number(*x, precision))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join(";"),
        Value::Records(rows) => rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|(_, v)| tsv_scalar(v, precision))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join(";"),
    }
}

fn json_number(x: f64, precision: usize) -> Json {
    let text = format_number(x, precision);
    text.parse::<f64>()
        .ok()
        .and_then(Number::from_f64)
        .map_or(Json::Null, Json::Number)
}

fn json_value(v: &Value, precision: usize) -> Json {
    match v {
        Value::Int(i) => Json::from(*i),
        Value::Real(x) => json_number(*x, precision),
        Value::Bool(b) => Json::Bool(*b),
        Value::Text(s) => Json::String(s.clone()),
        Value::Reals(xs) => Json::Array(xs.iter().map(|x| json_number(*x, precision)).collect()),
        Value::Vertices(vs) => Json::Array(vs.iter().map(|v| Json::from(*v)).collect()),
        Value::VertexSets(sets) => Json::Array(
            sets.iter()
                .map(|s| Json::Array(s.iter().map(|v| Json::from(*v)).collect()))
                .collect(),
        ),
        Value::Matrix(m) => Json::Array(
            m.row_iter()
                .map(|r| Json::Array(r.iter().map(|x| json_number(*x, precision)).collect()))
                .collect(),
        ),
        Value::Records(rows) => Json::Array(
            rows.iter()
                .map(|r| {
                    let mut map = Map::new();
                    for (k, v) in r {
                        map.insert(k.clone(), json_value(v, precision));
                    }
                    Json::Object(map)
                })
                .collect(),
        ),
    }
}

/// Formats `x` with `precision` significant digits in the style of C's `%g`,
/// without locale effects; negative zero prints as `0`.
pub fn format_number(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = precision.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= p as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        let fixed = trim_fraction(&format!("{:.*}", decimals, x)).to_string();
        if fixed == "-0" {
            "0".into()
        } else {
            fixed
        }
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
