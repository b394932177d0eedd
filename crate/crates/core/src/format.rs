//! Coloring files.
//!
//! The text format ("RRCOL v1") is a header line
//! `RRCOL 1 k=<arity> b=<bound> n=<domain>` followed by exactly `C(n, k)` data
//! lines `x0 x1 ... x_{k-1} c` in colex order of the tuples. `#` starts a
//! comment that runs to the end of the line; blank lines are ignored.
//!
//! The JSON mirror is `{"version":1,"arity":k,"bound":b,"n":n,"entries":[[x0,...,c],...]}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::tuple::ColexTuples;

pub const RRCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Rrcol,
    Json,
}

pub fn to_rrcol(f: &Coloring) -> String {
    let mut out = String::with_capacity(f.colors().len() * 12 + 64);
    writeln!(out, "RRCOL {} k={} b={} n={}", RRCOL_VERSION, f.arity(), f.bound(), f.n()).unwrap();
    for (t, c) in f.entries() {
        for x in &t {
            write!(out, "{x} ").unwrap();
        }
        writeln!(out, "{c}").unwrap();
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonColoring {
    version: u32,
    arity: usize,
    bound: usize,
    n: usize,
    entries: Vec<Vec<u64>>,
}

pub fn to_json(f: &Coloring) -> String {
    let doc = JsonColoring {
        version: RRCOL_VERSION,
        arity: f.arity(),
        bound: f.bound(),
        n: f.n(),
        entries: f
            .entries()
            .map(|(t, c)| t.into_iter().map(|x| x as u64).chain([c]).collect())
            .collect(),
    };
    serde_json::to_string(&doc).expect("plain data serializes")
}

pub fn write_coloring(f: &Coloring, format: Format) -> String {
    match format {
        Format::Rrcol => to_rrcol(f),
        Format::Json => {
            let mut s = to_json(f);
            s.push('\n');
            s
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn header_field(tok: Option<&str>, key: &str, line: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {key}=")))?;
    let v = tok
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| parse_err(line, format!("expected {key}=<value>, found {tok:?}")))?;
    v.parse()
        .map_err(|_| parse_err(line, format!("bad value for {key}: {v:?}")))
}

pub fn parse_rrcol(text: &str) -> Result<Coloring> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("RRCOL") {
        return Err(parse_err(hline, "header must start with RRCOL"));
    }
    match toks.next() {
        Some("1") => {}
        other => return Err(parse_err(hline, format!("unsupported version {other:?}"))),
    }
    let arity = header_field(toks.next(), "k", hline)?;
    let bound = header_field(toks.next(), "b", hline)?;
    let n = header_field(toks.next(), "n", hline)?;
    if let Some(extra) = toks.next() {
        return Err(parse_err(hline, format!("unexpected header token {extra:?}")));
    }
    if arity == 0 || arity > crate::coloring::MAX_ARITY {
        return Err(Error::UnsupportedArity(arity));
    }

    let mut expected = ColexTuples::new(n, arity);
    let mut colors = Vec::new();
    let mut last_line = hline;
    for (ln, l) in lines {
        last_line = ln;
        let nums: Vec<u64> = l
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|_| parse_err(ln, format!("not a natural: {t:?}"))))
            .collect::<Result<_>>()?;
        if nums.len() != arity + 1 {
            return Err(parse_err(ln, format!("expected {} fields, found {}", arity + 1, nums.len())));
        }
        let want = expected
            .next()
            .ok_or_else(|| parse_err(ln, "more data lines than C(n,k)"))?;
        if nums[..arity].iter().zip(&want).any(|(&a, &b)| a != b as u64) {
            return Err(parse_err(
                ln,
                format!("tuple {:?} out of colex order, expected {want:?}", &nums[..arity]),
            ));
        }
        colors.push(nums[arity]);
    }
    if expected.next().is_some() {
        return Err(parse_err(last_line, "fewer data lines than C(n,k)"));
    }
    Coloring::new(arity, bound, n, colors)
}

pub fn parse_json(text: &str) -> Result<Coloring> {
    let doc: JsonColoring = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    if doc.version != RRCOL_VERSION {
        return Err(parse_err(1, format!("unsupported version {}", doc.version)));
    }
    if doc.arity == 0 || doc.arity > crate::coloring::MAX_ARITY {
        return Err(Error::UnsupportedArity(doc.arity));
    }
    let mut expected = ColexTuples::new(doc.n, doc.arity);
    let mut colors = Vec::with_capacity(doc.entries.len());
    for (i, e) in doc.entries.iter().enumerate() {
        if e.len() != doc.arity + 1 {
            return Err(parse_err(1, format!("entry {i} has {} fields", e.len())));
        }
        let want = expected
            .next()
            .ok_or_else(|| parse_err(1, "more entries than C(n,k)"))?;
        if e[..doc.arity].iter().zip(&want).any(|(&a, &b)| a != b as u64) {
            return Err(parse_err(1, format!("entry {i} out of colex order, expected {want:?}")));
        }
        colors.push(e[doc.arity]);
    }
    if expected.next().is_some() {
        return Err(parse_err(1, "fewer entries than C(n,k)"));
    }
    Coloring::new(doc.arity, doc.bound, doc.n, colors)
}

/// Parses either format, choosing JSON when the first non-blank character is `{`.
pub fn parse_coloring(text: &str) -> Result<Coloring> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_rrcol(text)
    }
}
