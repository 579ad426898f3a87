//! Closed 1-manifolds as cyclic sequences of squared edge lengths.

use std::fmt;

use num::BigRational;

use super::classes::Closed1Class;
use super::triangulation::{Cell, Triangulation, VertexId};
use crate::error::{Error, Result};
use crate::formal::{parse_rational, CanonicalKey};

/// A disjoint union of loops, each stored as its cyclic sequence of squared
/// edge lengths. Sequences are reduced to their least rotation/reflection
/// and the loops are sorted, so two keys are equal exactly when the loops
/// are isometric as metric graphs.
///
/// Loops with one or two edges are allowed at this level even though they
/// have no simplicial triangulation.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LoopKey {
    loops: Vec<Vec<BigRational>>,
}

fn canonical_cycle(seq: &[BigRational]) -> Vec<BigRational> {
    let n = seq.len();
    let mut best: Option<Vec<BigRational>> = None;
    let mut rev: Vec<BigRational> = seq.to_vec();
    rev.reverse();
    for s in [seq.to_vec(), rev] {
        for k in 0..n {
            let rot: Vec<BigRational> = s[k..].iter().chain(&s[..k]).cloned().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

impl LoopKey {
    pub fn new(loops: Vec<Vec<BigRational>>) -> Result<Self> {
        if loops.iter().any(Vec::is_empty) {
            return Err(Error::Structure("a loop needs at least one edge".to_string()));
        }
        let mut loops: Vec<Vec<BigRational>> = loops.iter().map(|l| canonical_cycle(l)).collect();
        loops.sort();
        Ok(Self { loops })
    }

    /// `count` loops of `edges` edges each, all with squared length `len2`.
    pub fn uniform(count: usize, edges: usize, len2: BigRational) -> Self {
        Self::new(vec![vec![len2; edges]; count]).expect("edges > 0")
    }

    pub fn loops(&self) -> &[Vec<BigRational>] {
        &self.loops
    }

    pub fn circles(&self) -> Closed1Class {
        Closed1Class {
            circles: self.loops.len() as u32,
        }
    }

    pub fn total_edges(&self) -> usize {
        self.loops.iter().map(Vec::len).sum()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut l = self.loops.clone();
        l.extend(other.loops.iter().cloned());
        Self::new(l).expect("loops are nonempty")
    }

    /// Reads the loops of a closed 1-triangulation.
    pub fn from_triangulation(t: &Triangulation) -> Result<Self> {
        if t.dim() != 1 || !t.is_closed() {
            return Err(Error::Structure("loop keys need a closed 1-manifold".to_string()));
        }
        let mut loops = Vec::new();
        for comp in t.components() {
            let comp = comp.orient()?;
            let cells = comp.cells();
            let mut seq = Vec::with_capacity(cells.len());
            let mut v = cells[0].verts[0];
            for _ in 0..cells.len() {
                let c = cells
                    .iter()
                    .find(|c| c.verts[0] == v)
                    .ok_or_else(|| Error::Structure("broken loop".to_string()))?;
                seq.push(comp.len2(c.verts[0], c.verts[1]).cloned().unwrap_or_default());
                v = c.verts[1];
            }
            loops.push(seq);
        }
        Self::new(loops)
    }

    /// A triangulation realising the key; every loop needs at least 3 edges.
    pub fn to_triangulation(&self) -> Result<Triangulation> {
        let mut cells = Vec::new();
        let mut lens = std::collections::BTreeMap::new();
        let mut next: VertexId = 0;
        for l in &self.loops {
            if l.len() < 3 {
                return Err(Error::Structure(format!(
                    "a loop of {} edges is not simplicial",
                    l.len()
                )));
            }
            let n = l.len() as VertexId;
            for (i, len) in l.iter().enumerate() {
                let i = i as VertexId;
                let (u, v) = (next + i, next + (i + 1) % n);
                cells.push(Cell::new(vec![u, v]));
                lens.insert(super::triangulation::edge(u, v), len.clone());
            }
            next += n;
        }
        Triangulation::new(1, cells, lens)
    }

    /// Splits edge `pos` of loop `idx` into two edges with the given lengths.
    pub fn subdivide(&self, idx: usize, pos: usize, l1: BigRational, l2: BigRational) -> Result<Self> {
        let mut loops = self.loops.clone();
        let l = loops
            .get_mut(idx)
            .filter(|l| pos < l.len())
            .ok_or_else(|| Error::Move(format!("no edge {pos} on loop {idx}")))?;
        l.splice(pos..=pos, [l1, l2]);
        Self::new(loops)
    }

    /// Merges edges `pos` and `pos + 1` (cyclically) of loop `idx` into one
    /// edge of squared length `len2`.
    pub fn merge(&self, idx: usize, pos: usize, len2: BigRational) -> Result<Self> {
        let mut loops = self.loops.clone();
        let l = loops
            .get_mut(idx)
            .filter(|l| l.len() >= 2 && pos < l.len())
            .ok_or_else(|| Error::Move(format!("cannot merge at {pos} on loop {idx}")))?;
        let n = l.len();
        if pos + 1 < n {
            l.splice(pos..=pos + 1, [len2]);
        } else {
            l.pop();
            l[0] = len2;
        }
        Self::new(loops)
    }

    /// All keys one subdivision or merge away, with new edges copying the
    /// length of the edge they replace. Loops never drop below `min_edges`.
    pub fn neighbors(&self, min_edges: usize) -> Vec<LoopKey> {
        let mut out = Vec::new();
        for (i, l) in self.loops.iter().enumerate() {
            for p in 0..l.len() {
                if let Ok(k) = self.subdivide(i, p, l[p].clone(), l[p].clone()) {
                    out.push(k);
                }
                if l.len() > min_edges.max(1) && l[p] == l[(p + 1) % l.len()] {
                    if let Ok(k) = self.merge(i, p, l[p].clone()) {
                        out.push(k);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for LoopKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "loops")?;
        for l in &self.loops {
            let s: Vec<String> = l.iter().map(ToString::to_string).collect();
            write!(f, "({})", s.join(","))?;
        }
        Ok(())
    }
}

impl CanonicalKey for LoopKey {
    fn canonical(&self) -> String {
        self.to_string()
    }
}

impl std::str::FromStr for LoopKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse(0, format!("bad loop key {s:?}"));
        let mut rest = s.strip_prefix("loops").ok_or_else(bad)?;
        let mut loops = Vec::new();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let end = body.find(')').ok_or_else(bad)?;
            let seq = body[..end]
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<_>>>()?;
            loops.push(seq);
            rest = &body[end + 1..];
        }
        Self::new(loops)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal::rational;

    fn r(n: i64) -> BigRational {
        rational(n, 1)
    }

    #[test]
    fn rotations_and_reflections_are_identified() {
        let a = LoopKey::new(vec![vec![r(1), r(2), r(3)]]).unwrap();
        let b = LoopKey::new(vec![vec![r(3), r(2), r(1)]]).unwrap();
        let c = LoopKey::new(vec![vec![r(2), r(3), r(1)]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.to_string().parse::<LoopKey>().unwrap(), a);
    }

    #[test]
    fn subdivide_two_and_merge_four_meet_at_three() {
        let l2 = LoopKey::uniform(1, 2, r(1));
        let l4 = LoopKey::uniform(1, 4, r(1));
        let l3 = LoopKey::uniform(1, 3, r(1));
        assert_eq!(l2.subdivide(0, 0, r(1), r(1)).unwrap(), l3);
        assert_eq!(l4.merge(0, 3, r(1)).unwrap(), l3);
        assert!(l2.to_triangulation().is_err());
        let t = l3.to_triangulation().unwrap();
        assert_eq!(LoopKey::from_triangulation(&t).unwrap(), l3);
    }
}
