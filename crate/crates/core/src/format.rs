//! Plain-text instance format.
//!
//! ```text
//! # comment
//! n m
//! tail head      (m lines, 0-based)
//! S: i j k       (optional)
//! ```
//!
//! Blank lines and `#` comments may appear anywhere. A repeated arc line is
//! a parse error.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::digraph::{Arc, Digraph, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub digraph: Digraph,
    pub s: Option<Vec<VertexId>>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected a non-negative integer, found {tok:?}")))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut header: Option<(usize, usize)> = None;
    let mut arcs: Vec<Arc> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut s: Option<Vec<VertexId>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        if let Some(rest) = body.strip_prefix("S:") {
            if s.is_some() {
                return Err(parse_err(line, "more than one S: line"));
            }
            let (n, _) = header.ok_or_else(|| parse_err(line, "S: line before the header"))?;
            let mut verts = Vec::new();
            for tok in rest.split_whitespace() {
                let v = parse_usize(tok, line)?;
                if v >= n {
                    return Err(parse_err(line, format!("S vertex {v} out of range (n = {n})")));
                }
                verts.push(v);
            }
            let set: BTreeSet<_> = verts.iter().copied().collect();
            if set.len() != verts.len() {
                return Err(parse_err(line, "repeated vertex in S"));
            }
            s = Some(set.into_iter().collect());
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(line, format!("expected two integers, found {body:?}")));
        }
        let a = parse_usize(toks[0], line)?;
        let b = parse_usize(toks[1], line)?;
        match header {
            None => header = Some((a, b)),
            Some((n, m)) => {
                if arcs.len() == m {
                    return Err(parse_err(line, format!("more than the declared {m} arcs")));
                }
                if a >= n || b >= n {
                    return Err(parse_err(line, format!("arc ({a}, {b}) out of range (n = {n})")));
                }
                if a == b {
                    return Err(parse_err(line, format!("loop at vertex {a}")));
                }
                if !seen.insert((a, b)) {
                    return Err(parse_err(line, format!("duplicate arc ({a}, {b})")));
                }
                arcs.push(Arc::new(a, b));
            }
        }
    }

    let (n, m) = header.ok_or_else(|| parse_err(0, "missing \"n m\" header"))?;
    if arcs.len() != m {
        return Err(parse_err(
            0,
            format!("header declares {m} arcs but {} were given", arcs.len()),
        ));
    }
    let digraph = Digraph::new(n, arcs)?;
    Ok(Instance { digraph, s })
}

pub fn parse_digraph(text: &str) -> Result<Digraph> {
    parse_instance(text).map(|i| i.digraph)
}

/// Canonical encoding: header, arcs in lexicographic order, optional `S:` line.
pub fn write_instance(d: &Digraph, s: Option<&[VertexId]>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", d.vertex_count(), d.arc_count());
    for a in d.arcs() {
        let _ = writeln!(out, "{} {}", a.tail, a.head);
    }
    if let Some(s) = s {
        let sorted: BTreeSet<_> = s.iter().collect();
        let list: Vec<String> = sorted.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "S: {}", list.join(" "));
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the canonical encoding of `d` (without S).
pub fn digraph_sha256(d: &Digraph) -> String {
    sha256_hex(write_instance(d, None).as_bytes())
}
