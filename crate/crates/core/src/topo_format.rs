//! Line-oriented topology text format.
//!
//! ```text
//! gabriel v=3 seed=7
//! node 0 1.0000000000000000e-1 2.5000000000000000e-1
//! node 1 ...
//! edge 0 1
//! ```
//!
//! Coordinates carry 17 significant digits, which round-trips every `f64`.
//! Edge lengths are recomputed from the coordinates on load; an optional
//! third field on an `edge` line is checked against the recomputed length.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use crate::topology::{Point, Topology};
use crate::Error;

/// Relative tolerance for an explicit edge length.
pub const LENGTH_TOLERANCE: f64 = 1e-9;

pub fn to_text(topo: &Topology) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "gabriel v={} seed={}",
        topo.vertex_count(),
        topo.seed()
    );
    for (i, p) in topo.points().iter().enumerate() {
        let _ = writeln!(out, "node {i} {:.16e} {:.16e}", p.x, p.y);
    }
    for e in topo.edges() {
        let _ = writeln!(out, "edge {} {}", e.u, e.v);
    }
    out
}

fn err(line: usize, msg: impl ToString) -> Error {
    Error::Parse {
        line,
        msg: msg.to_string(),
    }
}

fn field<T: core::str::FromStr>(line: usize, name: &str, tok: Option<&str>) -> Result<T, Error> {
    let tok = tok.ok_or_else(|| err(line, format!("missing field `{name}`")))?;
    tok.parse()
        .map_err(|_| err(line, format!("field `{name}`: cannot parse {tok:?}")))
}

fn keyed<T: core::str::FromStr>(line: usize, key: &str, tok: Option<&str>) -> Result<T, Error> {
    let tok = tok.ok_or_else(|| err(line, format!("missing `{key}=`")))?;
    let val = tok
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| err(line, format!("expected `{key}=...`, got {tok:?}")))?;
    val.parse()
        .map_err(|_| err(line, format!("`{key}`: cannot parse {val:?}")))
}

pub fn from_text(text: &str) -> Result<Topology, Error> {
    let mut header: Option<(usize, u64)> = None;
    let mut points: Vec<Point> = Vec::new();
    let mut pairs: Vec<(u32, u32)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let kind = toks.next().unwrap_or_default();
        match kind {
            "gabriel" => {
                if header.is_some() {
                    return Err(err(line, "duplicate header"));
                }
                let n: usize = keyed(line, "v", toks.next())?;
                let seed: u64 = keyed(line, "seed", toks.next())?;
                header = Some((n, seed));
            }
            "node" if header.is_some() => {
                let id: usize = field(line, "id", toks.next())?;
                if id != points.len() {
                    return Err(err(
                        line,
                        format!("expected node id {}, got {id}", points.len()),
                    ));
                }
                let x: f64 = field(line, "x", toks.next())?;
                let y: f64 = field(line, "y", toks.next())?;
                if !x.is_finite() || !y.is_finite() {
                    return Err(err(line, "non-finite coordinate"));
                }
                points.push(Point::new(x, y));
            }
            "edge" if header.is_some() => {
                let u: u32 = field(line, "u", toks.next())?;
                let v: u32 = field(line, "v", toks.next())?;
                for w in [u, v] {
                    if w as usize >= points.len() {
                        return Err(err(line, format!("edge references unknown node {w}")));
                    }
                }
                if u == v {
                    return Err(err(line, format!("self-loop at node {u}")));
                }
                let key = (u.min(v), u.max(v));
                if pairs.contains(&key) {
                    return Err(err(line, format!("duplicate edge {} {}", key.0, key.1)));
                }
                if let Some(tok) = toks.next() {
                    let given: f64 = field(line, "length", Some(tok))?;
                    let d = points[u as usize].dist(&points[v as usize]);
                    if (given - d).abs() > LENGTH_TOLERANCE * d.max(f64::MIN_POSITIVE) {
                        return Err(err(
                            line,
                            format!("edge length {given} disagrees with coordinates ({d})"),
                        ));
                    }
                }
                pairs.push(key);
            }
            "node" | "edge" => return Err(err(line, "record before header")),
            other => return Err(err(line, format!("unknown record {other:?}"))),
        }
        if toks.next().is_some() {
            return Err(err(line, "trailing fields"));
        }
    }
    let (n, seed) = header.ok_or_else(|| err(1, "missing header"))?;
    if points.len() != n {
        return Err(err(
            text.lines().count(),
            format!("header declares {n} nodes, file has {}", points.len()),
        ));
    }
    Topology::new(points, &pairs)
        .map(|t| t.with_seed(seed))
        .map_err(|e| err(0, e))
}
