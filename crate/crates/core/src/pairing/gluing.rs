//! Kets with boundary and the gluing rules that close them up.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::BigRational;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formal::CanonicalKey;
use crate::topo::{Closed0Class, Closed1Class, ClosedSurfaceClass, LoopKey};

pub type Label = u32;

/// Gluing `a` to the mirror of `b` along their common boundary.
pub trait PairingRule {
    type Ket: Ord + Clone;
    type Closed: Ord + Clone;

    fn glue(&self, a: &Self::Ket, b: &Self::Ket) -> Result<Self::Closed>;
}

/// Closed 0-manifolds (empty boundary): `A` united with the orientation
/// reversal of `B`.
#[derive(Clone, Copy, Debug, Default)]
pub struct PointRule;

impl PairingRule for PointRule {
    type Ket = Closed0Class;
    type Closed = Closed0Class;

    fn glue(&self, a: &Closed0Class, b: &Closed0Class) -> Result<Closed0Class> {
        let m = b.mirror();
        Ok(Closed0Class::new(
            a.plus_points + m.plus_points,
            a.minus_points + m.minus_points,
        ))
    }
}

/// A 1-manifold bounding a labelled point set: arcs given by a perfect
/// matching on the labels, plus free circles.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Bounded1Ket {
    matching: Vec<(Label, Label)>,
    free_circles: u32,
}

impl Bounded1Ket {
    pub fn new(matching: Vec<(Label, Label)>, free_circles: u32) -> Result<Self> {
        let mut m: Vec<(Label, Label)> = matching
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        m.sort_unstable();
        let mut seen = BTreeSet::new();
        for &(a, b) in &m {
            if a == b || !seen.insert(a) || !seen.insert(b) {
                return Err(Error::Structure(format!(
                    "matching {m:?} does not cover each label once"
                )));
            }
        }
        Ok(Self {
            matching: m,
            free_circles,
        })
    }

    pub fn matching(&self) -> &[(Label, Label)] {
        &self.matching
    }

    pub fn free_circles(&self) -> u32 {
        self.free_circles
    }

    pub fn boundary(&self) -> BTreeSet<Label> {
        self.matching.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    /// All perfect matchings of the given labels with `free` circles.
    pub fn all_matchings(labels: &[Label], free: u32) -> Vec<Self> {
        fn rec(rest: &[Label], cur: &mut Vec<(Label, Label)>, out: &mut Vec<Vec<(Label, Label)>>) {
            let Some((&first, tail)) = rest.split_first() else {
                out.push(cur.clone());
                return;
            };
            for i in 0..tail.len() {
                cur.push((first, tail[i]));
                let remaining: Vec<Label> = tail
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &l)| l)
                    .collect();
                rec(&remaining, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if labels.len() % 2 == 0 {
            rec(labels, &mut Vec::new(), &mut out);
        }
        out.into_iter()
            .map(|m| Self::new(m, free).expect("valid matching"))
            .collect()
    }
}

impl fmt::Display for Bounded1Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arcs: Vec<String> = self.matching.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "arcs[{}]+{}", arcs.join(","), self.free_circles)
    }
}

impl CanonicalKey for Bounded1Ket {
    fn canonical(&self) -> String {
        self.to_string()
    }
}

impl std::str::FromStr for Bounded1Ket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse(0, format!("bad matching ket {s:?}"));
        let rest = s.strip_prefix("arcs[").ok_or_else(bad)?;
        let (arcs, free) = rest.split_once("]+").ok_or_else(bad)?;
        let mut m = Vec::new();
        for a in arcs.split(',').filter(|a| !a.is_empty()) {
            let (x, y) = a.split_once('-').ok_or_else(bad)?;
            m.push((x.parse().map_err(|_| bad())?, y.parse().map_err(|_| bad())?));
        }
        Self::new(m, free.parse().map_err(|_| bad())?)
    }
}

/// Counts the cycles of the union of two perfect matchings on the same labels.
fn matching_cycles(a: &[(Label, Label)], b: &[(Label, Label)]) -> usize {
    let labels: BTreeMap<Label, usize> = a
        .iter()
        .flat_map(|&(x, y)| [x, y])
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();
    let mut uf = UnionFind::<usize>::new(labels.len());
    for &(x, y) in a.iter().chain(b) {
        uf.union(labels[&x], labels[&y]);
    }
    (0..labels.len()).filter(|&i| uf.find(i) == i).count()
}

/// Topological 1-dimensional kets; mirroring is the identity on matchings.
#[derive(Clone, Copy, Debug, Default)]
pub struct MatchingRule;

pub fn glue_1d(a: &Bounded1Ket, b: &Bounded1Ket) -> Result<Closed1Class> {
    if a.boundary() != b.boundary() {
        return Err(Error::Boundary(format!(
            "{:?} vs {:?}",
            a.boundary(),
            b.boundary()
        )));
    }
    let cycles = matching_cycles(&a.matching, &b.matching) as u32;
    Ok(Closed1Class {
        circles: cycles + a.free_circles + b.free_circles,
    })
}

impl PairingRule for MatchingRule {
    type Ket = Bounded1Ket;
    type Closed = Closed1Class;

    fn glue(&self, a: &Bounded1Ket, b: &Bounded1Ket) -> Result<Closed1Class> {
        glue_1d(a, b)
    }
}

/// One connected component of a bounded surface.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SurfaceComponent {
    pub genus: u32,
    pub boundary: BTreeSet<Label>,
}

impl SurfaceComponent {
    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.boundary.len() as i64
    }
}

/// An orientable surface whose boundary circles carry labels, plus closed
/// components.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BoundedSurfaceKet {
    components: Vec<SurfaceComponent>,
    closed: ClosedSurfaceClass,
}

impl BoundedSurfaceKet {
    pub fn new(mut components: Vec<SurfaceComponent>, closed: ClosedSurfaceClass) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for c in &components {
            for &l in &c.boundary {
                if !seen.insert(l) {
                    return Err(Error::Structure(format!("boundary circle {l} used twice")));
                }
            }
        }
        // bounded components only; closed ones belong in `closed`
        let mut extra = Vec::new();
        components.retain(|c| {
            if c.boundary.is_empty() {
                extra.push(c.genus);
                false
            } else {
                true
            }
        });
        components.sort();
        Ok(Self {
            components,
            closed: closed.union(&ClosedSurfaceClass::new(extra)),
        })
    }

    /// A disk with `n` handles bounding circle `label`.
    pub fn handle(n: u32, label: Label) -> Self {
        Self::new(
            vec![SurfaceComponent {
                genus: n,
                boundary: BTreeSet::from([label]),
            }],
            ClosedSurfaceClass::default(),
        )
        .expect("one component")
    }

    pub fn components(&self) -> &[SurfaceComponent] {
        &self.components
    }

    pub fn closed(&self) -> &ClosedSurfaceClass {
        &self.closed
    }

    pub fn boundary(&self) -> BTreeSet<Label> {
        self.components
            .iter()
            .flat_map(|c| c.boundary.iter().copied())
            .collect()
    }
}

impl fmt::Display for BoundedSurfaceKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| {
                let b: Vec<String> = c.boundary.iter().map(ToString::to_string).collect();
                format!("g{}[{}]", c.genus, b.join(","))
            })
            .collect();
        write!(f, "{}|{}", parts.join(" "), self.closed)
    }
}

impl CanonicalKey for BoundedSurfaceKet {
    fn canonical(&self) -> String {
        self.to_string()
    }
}

/// Glues along all labelled circles; genera follow from additivity of the
/// Euler characteristic (circles contribute zero).
pub fn glue_2d(a: &BoundedSurfaceKet, b: &BoundedSurfaceKet) -> Result<ClosedSurfaceClass> {
    if a.boundary() != b.boundary() {
        return Err(Error::Boundary(format!(
            "{:?} vs {:?}",
            a.boundary(),
            b.boundary()
        )));
    }
    let pieces: Vec<&SurfaceComponent> = a.components.iter().chain(&b.components).collect();
    let mut owner: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
    for (i, p) in pieces.iter().enumerate() {
        for &l in &p.boundary {
            owner.entry(l).or_default().push(i);
        }
    }
    let mut uf = UnionFind::<usize>::new(pieces.len());
    for o in owner.values() {
        uf.union(o[0], o[1]);
    }
    let mut chi: BTreeMap<usize, i64> = BTreeMap::new();
    for (i, p) in pieces.iter().enumerate() {
        *chi.entry(uf.find(i)).or_default() += p.euler_characteristic();
    }
    let genera = chi
        .values()
        .map(|&x| {
            if x > 2 || x % 2 != 0 {
                Err(Error::Structure(format!("glued component has Euler characteristic {x}")))
            } else {
                Ok(((2 - x) / 2) as u32)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClosedSurfaceClass::new(genera)
        .union(&a.closed)
        .union(&b.closed))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SurfaceRule;

impl PairingRule for SurfaceRule {
    type Ket = BoundedSurfaceKet;
    type Closed = ClosedSurfaceClass;

    fn glue(&self, a: &BoundedSurfaceKet, b: &BoundedSurfaceKet) -> Result<ClosedSurfaceClass> {
        glue_2d(a, b)
    }
}

/// A metric arc between two labelled boundary points, read from `ends.0`
/// to `ends.1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub ends: (Label, Label),
    pub len2: Vec<BigRational>,
}

impl Arc {
    pub fn new(a: Label, b: Label, len2: Vec<BigRational>) -> Self {
        if a <= b {
            Self { ends: (a, b), len2 }
        } else {
            let mut len2 = len2;
            len2.reverse();
            Self { ends: (b, a), len2 }
        }
    }
}

/// A metric 1-manifold with labelled boundary: arcs plus closed loops.
/// Gluing two of them gives a [`LoopKey`], so collection is by isometry type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcComplex {
    arcs: Vec<Arc>,
    loops: LoopKey,
}

impl ArcComplex {
    pub fn new(mut arcs: Vec<Arc>, loops: LoopKey) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for a in &arcs {
            if a.len2.is_empty() {
                return Err(Error::Structure("an arc needs at least one edge".to_string()));
            }
            if a.ends.0 == a.ends.1 || !seen.insert(a.ends.0) || !seen.insert(a.ends.1) {
                return Err(Error::Structure(format!("arc endpoints reused at {:?}", a.ends)));
            }
        }
        arcs.sort();
        Ok(Self { arcs, loops })
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn loops(&self) -> &LoopKey {
        &self.loops
    }

    pub fn boundary(&self) -> BTreeSet<Label> {
        self.arcs.iter().flat_map(|a| [a.ends.0, a.ends.1]).collect()
    }
}

impl fmt::Display for ArcComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arcs: Vec<String> = self
            .arcs
            .iter()
            .map(|a| {
                let l: Vec<String> = a.len2.iter().map(ToString::to_string).collect();
                format!("{}-{}({})", a.ends.0, a.ends.1, l.join(","))
            })
            .collect();
        write!(f, "arcs[{}]+{}", arcs.join(" "), self.loops)
    }
}

impl CanonicalKey for ArcComplex {
    fn canonical(&self) -> String {
        self.to_string()
    }
}

pub fn glue_arcs(a: &ArcComplex, b: &ArcComplex) -> Result<LoopKey> {
    if a.boundary() != b.boundary() {
        return Err(Error::Boundary(format!(
            "{:?} vs {:?}",
            a.boundary(),
            b.boundary()
        )));
    }
    let from_a: BTreeMap<Label, &Arc> = a.arcs.iter().flat_map(|x| [(x.ends.0, x), (x.ends.1, x)]).collect();
    let from_b: BTreeMap<Label, &Arc> = b.arcs.iter().flat_map(|x| [(x.ends.0, x), (x.ends.1, x)]).collect();
    let mut visited: BTreeSet<Label> = BTreeSet::new();
    let mut loops = Vec::new();
    for &start in from_a.keys() {
        if visited.contains(&start) {
            continue;
        }
        let mut seq = Vec::new();
        let mut at = start;
        loop {
            // along an arc of `a`, then back along an arc of `b`
            for side in [&from_a, &from_b] {
                visited.insert(at);
                let arc = side[&at];
                if arc.ends.0 == at {
                    seq.extend(arc.len2.iter().cloned());
                    at = arc.ends.1;
                } else {
                    seq.extend(arc.len2.iter().rev().cloned());
                    at = arc.ends.0;
                }
                visited.insert(at);
            }
            if at == start {
                break;
            }
        }
        loops.push(seq);
    }
    Ok(LoopKey::new(loops)?.union(&a.loops).union(&b.loops))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ArcRule;

impl PairingRule for ArcRule {
    type Ket = ArcComplex;
    type Closed = LoopKey;

    fn glue(&self, a: &ArcComplex, b: &ArcComplex) -> Result<LoopKey> {
        glue_arcs(a, b)
    }
}
