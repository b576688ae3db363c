//! Plain-text matrix and triple files.
//!
//! A matrix file holds the point count on its first data line followed by
//! `n` rows of `n` decimals. A triple file appends a `weights:` line and `n`
//! decimals; without it the weights are uniform. `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use crate::metric::{validate, DistanceMatrix, FiniteMetricTriple, ProbabilityVector};
use crate::{Error, Result};

struct Tokens<'a> {
    lines: Vec<(usize, &'a str)>,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Tokens { lines }
    }
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| Error::Parse { line, msg: format!("cannot parse '{tok}' as a number") })
}

fn parse_rows(tok: &Tokens<'_>) -> Result<(Vec<Vec<f64>>, usize)> {
    let Some(&(hline, head)) = tok.lines.first() else {
        return Err(Error::Parse { line: 1, msg: "empty input".into() });
    };
    let n: usize = head
        .parse()
        .map_err(|_| Error::Parse { line: hline, msg: format!("expected point count, found '{head}'") })?;
    if n == 0 {
        return Err(Error::Parse { line: hline, msg: "point count must be positive".into() });
    }
    let mut rows = Vec::with_capacity(n);
    for r in 0..n {
        let Some(&(line, body)) = tok.lines.get(1 + r) else {
            return Err(Error::Parse { line: hline, msg: format!("expected {n} rows, found {r}") });
        };
        if body.starts_with("weights:") {
            return Err(Error::Parse { line, msg: format!("expected {n} rows, found {r}") });
        }
        let row = body.split_whitespace().map(|t| parse_num(t, line)).collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            return Err(Error::Parse { line, msg: format!("row has {} entries, expected {n}", row.len()) });
        }
        rows.push(row);
    }
    Ok((rows, 1 + n))
}

/// Parses a matrix file body. The result is validated as a semimetric.
pub fn parse_matrix(text: &str) -> Result<DistanceMatrix> {
    let tok = Tokens::new(text);
    let (rows, used) = parse_rows(&tok)?;
    if let Some(&(line, _)) = tok.lines.get(used) {
        return Err(Error::Parse { line, msg: "unexpected trailing content".into() });
    }
    DistanceMatrix::from_rows(rows)
}

/// Parses only the raw rows of a matrix file, without semimetric checks.
pub fn parse_raw_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let tok = Tokens::new(text);
    Ok(parse_rows(&tok)?.0)
}

pub fn parse_triple(text: &str) -> Result<FiniteMetricTriple> {
    let tok = Tokens::new(text);
    let (rows, used) = parse_rows(&tok)?;
    let n = rows.len();
    let dist = DistanceMatrix::from_rows(rows)?;
    let rest = &tok.lines[used..];
    if rest.is_empty() {
        return Ok(FiniteMetricTriple::uniform(dist));
    }
    let (wline, first) = rest[0];
    let Some(after) = first.strip_prefix("weights:") else {
        return Err(Error::Parse { line: wline, msg: "expected 'weights:'".into() });
    };
    let mut w = Vec::with_capacity(n);
    for t in after.split_whitespace() {
        w.push(parse_num(t, wline)?);
    }
    for &(line, body) in &rest[1..] {
        for t in body.split_whitespace() {
            w.push(parse_num(t, line)?);
        }
    }
    if w.len() != n {
        return Err(Error::Parse { line: wline, msg: format!("expected {n} weights, found {}", w.len()) });
    }
    FiniteMetricTriple::new(dist, ProbabilityVector::new(w)?)
}

fn write_rows(out: &mut String, d: &DistanceMatrix) {
    let _ = writeln!(out, "{}", d.n());
    for i in 0..d.n() {
        let row: Vec<String> = d.row(i).iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

/// Serializes with shortest round-trip decimals.
pub fn format_matrix(d: &DistanceMatrix) -> String {
    let mut s = String::new();
    write_rows(&mut s, d);
    s
}

pub fn format_triple(t: &FiniteMetricTriple) -> String {
    let mut s = String::new();
    write_rows(&mut s, t.dist());
    let w: Vec<String> = t.w().iter().map(|v| format!("{v:?}")).collect();
    let _ = writeln!(s, "weights: {}", w.join(" "));
    s
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

pub fn load_triple(path: &Path) -> Result<FiniteMetricTriple> {
    parse_triple(&read(path)?)
}

pub fn load_matrix(path: &Path) -> Result<DistanceMatrix> {
    parse_matrix(&read(path)?)
}

/// Raw validation of a matrix file, reporting instead of rejecting
/// invariant violations.
pub fn validate_file(path: &Path, strict: bool) -> Result<crate::metric::ValidationReport> {
    let rows = parse_raw_rows(&read(path)?)?;
    validate(&rows, strict)
}
