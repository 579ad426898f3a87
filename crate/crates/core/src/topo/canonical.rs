//! Canonical codes of closed oriented triangulated surfaces.
//!
//! A code is produced by a breadth-first relabelling that starts at a
//! directed edge and walks each vertex's rotation (the cyclic order of its
//! neighbours induced by the orientation). The canonical code of a component
//! is the least code over all starting darts and both orientations, so two
//! triangulations get the same code exactly when they are isomorphic as
//! unoriented simplicial complexes (with lengths, if requested).

use std::collections::{BTreeMap, VecDeque};

use num::BigRational;

use super::triangulation::{Triangulation, VertexId};
use crate::error::{Error, Result};

type Rotation = BTreeMap<(VertexId, VertexId), VertexId>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Code {
    shape: Vec<u32>,
    lens: Vec<BigRational>,
}

fn rotation(t: &Triangulation, reversed: bool) -> Rotation {
    let mut rot = Rotation::new();
    for c in t.cells() {
        let v = &c.verts;
        for k in 0..3 {
            let (a, b, cc) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
            if reversed {
                rot.insert((a, cc), b);
            } else {
                rot.insert((a, b), cc);
            }
        }
    }
    rot
}

fn code_from(t: &Triangulation, rot: &Rotation, start: (VertexId, VertexId), metric: bool, best: Option<&Code>) -> Option<Code> {
    let mut label: BTreeMap<VertexId, u32> = BTreeMap::new();
    let mut reference: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut queue = VecDeque::new();
    label.insert(start.0, 0);
    reference.insert(start.0, start.1);
    queue.push_back(start.0);
    let mut code = Code {
        shape: Vec::new(),
        lens: Vec::new(),
    };
    while let Some(x) = queue.pop_front() {
        let r = reference[&x];
        let mut y = r;
        let mut ring = Vec::new();
        loop {
            ring.push(y);
            y = *rot.get(&(x, y))?;
            if y == r {
                break;
            }
            if ring.len() > t.vertices().len() {
                return None;
            }
        }
        code.shape.push(u32::MAX - ring.len() as u32);
        for y in ring {
            let l = match label.get(&y) {
                Some(&l) => l,
                None => {
                    let l = label.len() as u32;
                    label.insert(y, l);
                    reference.insert(y, x);
                    queue.push_back(y);
                    l
                }
            };
            code.shape.push(l);
            if metric {
                code.lens.push(t.len2(x, y).cloned().unwrap_or_default());
            }
        }
        // prune: once the shape prefix exceeds the best known code, stop
        if let Some(b) = best {
            let n = code.shape.len().min(b.shape.len());
            if code.shape[..n] > b.shape[..n] {
                return None;
            }
        }
    }
    Some(code)
}

fn component_code(t: &Triangulation, metric: bool) -> Result<Code> {
    let mut best: Option<Code> = None;
    for reversed in [false, true] {
        let rot = rotation(t, reversed);
        for &dart in rot.keys() {
            if let Some(c) = code_from(t, &rot, dart, metric, best.as_ref()) {
                if best.as_ref().is_none_or(|b| c < *b) {
                    best = Some(c);
                }
            }
        }
    }
    best.ok_or_else(|| Error::Structure("surface rotation system is incomplete".to_string()))
}

fn render(codes: &[Code], metric: bool) -> String {
    let parts: Vec<String> = codes
        .iter()
        .map(|c| {
            let mut s: Vec<String> = c
                .shape
                .iter()
                .map(|&x| {
                    if x > u32::MAX / 2 {
                        format!("|{}", u32::MAX - x)
                    } else {
                        x.to_string()
                    }
                })
                .collect();
            if metric {
                s.push(";".to_string());
                s.extend(c.lens.iter().map(ToString::to_string));
            }
            s.join(" ")
        })
        .collect();
    parts.join(" + ")
}

/// Canonical string of a closed oriented surface, up to combinatorial
/// isomorphism (`metric = false`) or isometry of the edge-length data.
pub fn surface_code(t: &Triangulation, metric: bool) -> Result<String> {
    if t.dim() != 2 || !t.is_closed() || !t.is_manifold() {
        return Err(Error::Structure(
            "canonical codes need a closed 2-manifold".to_string(),
        ));
    }
    let t = t.orient()?;
    let mut codes = t
        .components()
        .iter()
        .map(|c| component_code(c, metric))
        .collect::<Result<Vec<_>>>()?;
    codes.sort();
    Ok(render(&codes, metric))
}
