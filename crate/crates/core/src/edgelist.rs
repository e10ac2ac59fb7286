//! Tab-separated edge-list files.
//!
//! ```text
//! # comment
//! n 3
//! 1<TAB>2<TAB>1
//! 2<TAB>3<TAB>0.5
//! ```
//!
//! The first non-comment line is the header `n <count>`; each later non-empty
//! line is `<tail>\t<head>\t<weight>` with 1-based vertex ids.

use std::fmt::Write;

use crate::digraph::WeightedDigraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeListDocument {
    pub n: usize,
    /// 1-based `(tail, head, weight)` records in file order.
    pub records: Vec<(usize, usize, f64)>,
}

impl EdgeListDocument {
    pub fn to_digraph(&self) -> Result<WeightedDigraph> {
        WeightedDigraph::build(self.n, &self.records)
    }
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn at_line(line: usize, e: Error) -> Error {
    Error::AtLine {
        line,
        source: Box::new(e),
    }
}

fn parse_header(body: &str, line: usize) -> Result<usize> {
    let rest = body
        .strip_prefix("n ")
        .ok_or_else(|| parse_error(line, 1, "expected header \"n <count>\""))?;
    let n: usize = rest
        .parse()
        .map_err(|_| parse_error(line, 3, format!("invalid vertex count {rest:?}")))?;
    if n < 2 {
        return Err(at_line(line, Error::TooFewVertices(n)));
    }
    Ok(n)
}

fn parse_record(body: &str, line: usize, n: usize) -> Result<(usize, usize, f64)> {
    let mut fields = Vec::with_capacity(3);
    let mut column = 1;
    for field in body.split('\t') {
        fields.push((column, field));
        column += field.chars().count() + 1;
    }
    if fields.len() != 3 {
        return Err(parse_error(
            line,
            1,
            format!("expected 3 tab-separated fields, found {}", fields.len()),
        ));
    }
    let vertex = |(col, text): (usize, &str)| -> Result<usize> {
        let v: usize = text
            .parse()
            .map_err(|_| parse_error(line, col, format!("invalid vertex id {text:?}")))?;
        if v == 0 || v > n {
            return Err(at_line(line, Error::VertexOutOfRange { vertex: v, n }));
        }
        Ok(v)
    };
    let tail = vertex(fields[0])?;
    let head = vertex(fields[1])?;
    let (wcol, wtext) = fields[2];
    let weight: f64 = wtext
        .parse()
        .map_err(|_| parse_error(line, wcol, format!("invalid weight {wtext:?}")))?;
    if tail == head {
        return Err(at_line(line, Error::LoopArc(tail)));
    }
    if !(weight.is_finite() && weight > 0.0) {
        return Err(at_line(line, Error::NonpositiveWeight { tail, head, weight }));
    }
    Ok((tail, head, weight))
}

pub fn parse_edge_list(text: &str) -> Result<EdgeListDocument> {
    let mut n = None;
    let mut records = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let body = body.trim_end_matches([' ', '\r']);
        if body.is_empty() {
            continue;
        }
        match n {
            None => {
                if !body.starts_with('n') {
                    return Err(Error::MissingHeader);
                }
                n = Some(parse_header(body, line)?);
            }
            Some(count) => {
                if body.starts_with("n ") {
                    return Err(Error::DuplicateHeader { line });
                }
                records.push(parse_record(body, line, count)?);
            }
        }
    }
    let n = n.ok_or(Error::MissingHeader)?;
    Ok(EdgeListDocument { n, records })
}

pub fn parse_digraph(text: &str) -> Result<WeightedDigraph> {
    parse_edge_list(text)?.to_digraph()
}

/// Writes `g` in the edge-list grammar; arcs in (tail, head) order, weights in
/// shortest round-trip decimal form.
pub fn serialize(g: &WeightedDigraph) -> String {
    let mut out = format!("n {}\n", g.n());
    for a in g.arcs() {
        writeln!(out, "{}\t{}\t{}", a.tail + 1, a.head + 1, a.weight).expect("writing to a String");
    }
    out
}
