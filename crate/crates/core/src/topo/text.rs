//! Line-oriented text format.
//!
//! ```text
//! dim=2
//! v 0
//! v 1
//! v 2
//! s 2 0 1 2            # top simplex, vertex order gives the orientation
//! s 1 0 1 len2=-3/2    # edge length (on a top simplex when dim=1)
//! s 0 4 sign=-         # negatively oriented point (dim=0)
//! b 0 1 lower          # boundary face given by its vertices
//! ```
//!
//! `#` starts a comment. Edges without a `len2` get squared length 1.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num::BigRational;

use super::triangulation::{edge, BoundarySide, Cell, Edge, Triangulation, VertexId};
use crate::error::{Error, Result};
use crate::formal::parse_rational;

pub fn parse_triangulation(src: &str) -> Result<Triangulation> {
    let mut dim: Option<usize> = None;
    let mut declared: BTreeSet<VertexId> = BTreeSet::new();
    let mut cells = Vec::new();
    let mut lens: BTreeMap<Edge, BigRational> = BTreeMap::new();
    let mut marks = Vec::new();

    for (i, raw) in src.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| Error::parse(line_no, msg);
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(d) = line.strip_prefix("dim=") {
            if dim.is_some() {
                return Err(err("repeated dim header".into()));
            }
            let d: usize = d.trim().parse().map_err(|_| err(format!("bad dimension {d:?}")))?;
            if d > 2 {
                return Err(Error::Unsupported(format!("dimension {d} > 2")));
            }
            dim = Some(d);
            continue;
        }
        let d = dim.ok_or_else(|| err("missing dim=<d> header".into()))?;
        let mut tok = line.split_whitespace();
        let head = tok.next().unwrap_or_default();
        let words: Vec<&str> = tok.collect();
        let vertex = |w: &str, declared: &BTreeSet<VertexId>| -> Result<VertexId> {
            let v: VertexId = w.parse().map_err(|_| err(format!("bad vertex id {w:?}")))?;
            if !declared.contains(&v) {
                return Err(err(format!("undeclared vertex {v}")));
            }
            Ok(v)
        };
        match head {
            "v" => {
                let [w] = words.as_slice() else {
                    return Err(err("expected `v <id>`".into()));
                };
                let v: VertexId = w.parse().map_err(|_| err(format!("bad vertex id {w:?}")))?;
                if !declared.insert(v) {
                    return Err(err(format!("vertex {v} declared twice")));
                }
            }
            "s" => {
                let (k, rest) = words
                    .split_first()
                    .ok_or_else(|| err("expected `s <dim> <vertices...>`".into()))?;
                let k: usize = k.parse().map_err(|_| err(format!("bad simplex dimension {k:?}")))?;
                let mut verts = Vec::new();
                let mut len2 = None;
                let mut positive = true;
                for w in rest {
                    if let Some(l) = w.strip_prefix("len2=") {
                        len2 = Some(parse_rational(l).map_err(|_| err(format!("bad length {l:?}")))?);
                    } else if let Some(s) = w.strip_prefix("sign=") {
                        positive = match s {
                            "+" => true,
                            "-" => false,
                            _ => return Err(err(format!("bad sign {s:?}"))),
                        };
                    } else {
                        verts.push(vertex(w, &declared)?);
                    }
                }
                if verts.len() != k + 1 {
                    return Err(err(format!("a {k}-simplex needs {} vertices", k + 1)));
                }
                if len2.is_some() && k != 1 {
                    return Err(err("len2 is only allowed on edges".into()));
                }
                if !positive && k != 0 {
                    return Err(err("sign is only allowed on points".into()));
                }
                if let Some(l) = len2 {
                    lens.insert(edge(verts[0], verts[1]), l);
                }
                if k == d {
                    cells.push(Cell { verts, positive });
                } else if k != 1 {
                    return Err(err(format!("only {d}-simplices and edges may be listed")));
                }
            }
            "b" => {
                let (side, vs) = words
                    .split_last()
                    .ok_or_else(|| err("expected `b <vertices...> <lower|upper>`".into()))?;
                let side = match *side {
                    "lower" => BoundarySide::Lower,
                    "upper" => BoundarySide::Upper,
                    s => return Err(err(format!("bad boundary side {s:?}"))),
                };
                let face = vs.iter().map(|w| vertex(w, &declared)).collect::<Result<Vec<_>>>()?;
                if d == 0 || face.len() != d {
                    return Err(err(format!("a boundary face of a {d}-complex has {d} vertices")));
                }
                marks.push((face, side));
            }
            other => return Err(err(format!("unknown record {other:?}"))),
        }
    }
    let d = dim.ok_or_else(|| Error::parse(0, "missing dim=<d> header"))?;
    let used: BTreeSet<VertexId> = cells.iter().flat_map(|c: &Cell| c.verts.clone()).collect();
    if let Some(v) = declared.difference(&used).next() {
        return Err(Error::Structure(format!("vertex {v} is not in any {d}-simplex")));
    }
    for e in lens.keys() {
        if !cells.iter().any(|c| c.verts.contains(&e.0) && c.verts.contains(&e.1)) {
            return Err(Error::Structure(format!("edge {e:?} is not in any {d}-simplex")));
        }
    }
    Triangulation::new(d, cells, lens)?.with_boundary(marks)
}

pub fn write_triangulation(t: &Triangulation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dim={}", t.dim());
    for v in t.vertices() {
        let _ = writeln!(out, "v {v}");
    }
    for c in t.cells() {
        let vs: Vec<String> = c.verts.iter().map(ToString::to_string).collect();
        let _ = write!(out, "s {} {}", t.dim(), vs.join(" "));
        if t.dim() == 0 && !c.positive {
            out.push_str(" sign=-");
        }
        if t.dim() == 1 {
            let l = t.len2(c.verts[0], c.verts[1]).cloned().unwrap_or_default();
            let _ = write!(out, " len2={l}");
        }
        out.push('\n');
    }
    if t.dim() == 2 {
        for ((u, v), l) in t.edge_len2() {
            let _ = writeln!(out, "s 1 {u} {v} len2={l}");
        }
    }
    for (f, s) in t.boundary_marks() {
        let vs: Vec<String> = f.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "b {} {}", vs.join(" "), s.as_str());
    }
    out
}
