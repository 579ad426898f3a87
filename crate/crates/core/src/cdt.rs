//! Causal growth of Lorentzian layers, Wick rotation and mirror doubling.
//!
//! Spacelike edges have squared length `a`, timelike edges `−α·a`. Wick
//! rotation flips the sign of the timelike ones.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigRational, Signed};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::formal::{rational_from_f64, Complex64, Superposition};
use crate::pairing::{Arc, ArcComplex};
use crate::topo::{edge, BoundarySide, Cell, Edge, LoopKey, Triangulation, VertexId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Layer {
    #[default]
    Full,
    Partial,
}

impl std::str::FromStr for Layer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "partial" => Ok(Self::Partial),
            _ => Err(Error::Param(format!("layer must be full or partial, got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthConfig {
    /// Timelike aspect ratio for layers of dimension 1 and 2 (index d−1).
    pub alpha: [f64; 2],
    pub a: f64,
    pub layer: Layer,
    pub topology_change: bool,
    pub p_circle: f64,
    /// Timelike edges per arc (d=1) or stacked layers (d=2).
    pub slices: usize,
    pub retry_cap: usize,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self {
            alpha: [1.0, 1.0],
            a: 1.0,
            layer: Layer::Full,
            topology_change: false,
            p_circle: 0.1,
            slices: 2,
            retry_cap: 64,
        }
    }
}

impl GrowthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alpha.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::Param(format!("alpha must be positive, got {:?}", self.alpha)));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::Param(format!("a must be positive, got {}", self.a)));
        }
        if !(0.0..=1.0).contains(&self.p_circle) {
            return Err(Error::Param(format!("p_circle must lie in [0, 1], got {}", self.p_circle)));
        }
        if self.slices == 0 {
            return Err(Error::Param("slices must be at least 1".to_string()));
        }
        Ok(())
    }

    pub fn alpha(&self, d: usize) -> f64 {
        self.alpha[d.clamp(1, 2) - 1]
    }

    fn space_len2(&self) -> Result<BigRational> {
        rational_from_f64(self.a)
    }

    fn time_len2(&self, d: usize) -> Result<BigRational> {
        Ok(-(rational_from_f64(self.alpha(d))? * self.space_len2()?))
    }
}

/// A Lorentzian d-manifold with lower boundary (the space it grew from)
/// and possibly an upper boundary. `timelike` lists the edges whose stored
/// squared length is negative by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Cobordism {
    x: Triangulation,
    timelike: BTreeSet<Edge>,
}

impl Cobordism {
    /// Checks the marks and the Euler constraint `χ(X) = χ(lower)`.
    pub fn new(x: Triangulation, timelike: BTreeSet<Edge>) -> Result<Self> {
        let lower = x.boundary_subcomplex(BoundarySide::Lower)?;
        let (cx, cy) = (x.euler_characteristic(), lower.euler_characteristic());
        if cx != cy {
            return Err(Error::EulerConstraint { x: cx, y: cy });
        }
        for e in &timelike {
            match x.len2(e.0, e.1) {
                Some(l) if l.is_negative() => {}
                _ => return Err(Error::Geometry(format!("edge {e:?} is not timelike"))),
            }
        }
        Ok(Self { x, timelike })
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn timelike(&self) -> &BTreeSet<Edge> {
        &self.timelike
    }

    pub fn lower(&self) -> Result<Triangulation> {
        self.x.boundary_subcomplex(BoundarySide::Lower)
    }

    pub fn upper(&self) -> Result<Triangulation> {
        self.x.boundary_subcomplex(BoundarySide::Upper)
    }

    pub fn has_upper_boundary(&self) -> bool {
        !self.x.marked(BoundarySide::Upper).is_empty()
    }

    /// Timelike squared lengths back to negative values.
    pub fn from_euclidean(t: &Triangulation, timelike: BTreeSet<Edge>) -> Result<Self> {
        let mut x = t.clone();
        for e in &timelike {
            let l = x
                .len2(e.0, e.1)
                .cloned()
                .ok_or_else(|| Error::Structure(format!("no edge {e:?}")))?;
            x.set_len2(*e, -l.abs())?;
        }
        Self::new(x, timelike)
    }

    /// The arc over lower point `p` runs from label `2p` to label `2p+1`;
    /// lengths are Wick rotated and closed components become loops.
    pub fn to_arc_complex(&self) -> Result<ArcComplex> {
        if self.dim() != 1 {
            return Err(Error::Unsupported("arc complexes are 1-dimensional".to_string()));
        }
        let e = wick_rotate(self)?;
        let marks = e.boundary_marks().clone();
        let mut arcs = Vec::new();
        let mut loops = Vec::new();
        for comp in e.components() {
            let ends: Vec<(VertexId, BoundarySide)> = comp
                .vertices()
                .iter()
                .filter_map(|&v| marks.get(&vec![v]).map(|&s| (v, s)))
                .collect();
            if ends.is_empty() {
                loops.extend(LoopKey::from_triangulation(&comp.without_boundary_marks())?.loops().to_vec());
                continue;
            }
            let (s, t) = match ends[..] {
                [(s, BoundarySide::Lower), (t, BoundarySide::Upper)]
                | [(t, BoundarySide::Upper), (s, BoundarySide::Lower)] => (s, t),
                _ => {
                    return Err(Error::Structure(
                        "arc component needs one lower and one upper end".to_string(),
                    ))
                }
            };
            let mut seq = Vec::new();
            let mut prev = None;
            let mut at = s;
            while at != t {
                let next = *comp
                    .neighbors(at)
                    .iter()
                    .find(|&&n| Some(n) != prev)
                    .ok_or_else(|| Error::Structure("broken arc".to_string()))?;
                seq.push(comp.len2(at, next).cloned().unwrap_or_default());
                prev = Some(at);
                at = next;
            }
            arcs.push(Arc::new(2 * s, 2 * s + 1, seq));
        }
        ArcComplex::new(arcs, LoopKey::new(loops)?)
    }
}

/// Grows one Lorentzian layer (or `cfg.slices` of them) over a closed
/// Euclidean `y` of dimension 0 or 1.
pub fn grow_layer<R: Rng + ?Sized>(y: &Triangulation, cfg: &GrowthConfig, rng: &mut R) -> Result<Cobordism> {
    cfg.validate()?;
    if !y.is_closed() {
        return Err(Error::Structure("growth needs a closed base".to_string()));
    }
    if y.dim() >= 1 {
        y.check_euclidean()?;
    }
    match y.dim() {
        0 => grow_points(y, cfg, rng),
        1 => grow_circles(y, cfg, rng),
        d => Err(Error::Unsupported(format!("growth over dimension {d}"))),
    }
}

fn grow_points<R: Rng + ?Sized>(y: &Triangulation, cfg: &GrowthConfig, rng: &mut R) -> Result<Cobordism> {
    let tl = cfg.time_len2(1)?;
    let mut next = y.next_vertex();
    let mut cells = Vec::new();
    let mut lens = BTreeMap::new();
    let mut marks = Vec::new();
    let mut timelike = BTreeSet::new();
    let mut add = |u: VertexId, v: VertexId, forward: bool, cells: &mut Vec<Cell>| {
        cells.push(Cell::new(if forward { vec![u, v] } else { vec![v, u] }));
        lens.insert(edge(u, v), tl.clone());
        timelike.insert(edge(u, v));
    };
    for c in y.cells() {
        let p = c.verts[0];
        let mut at = p;
        for _ in 0..cfg.slices {
            add(at, next, c.positive, &mut cells);
            at = next;
            next += 1;
        }
        marks.push((vec![p], BoundarySide::Lower));
        marks.push((vec![at], BoundarySide::Upper));
    }
    if cfg.topology_change {
        while rng.random_bool(cfg.p_circle) {
            let base = next;
            for i in 0..3 {
                add(base + i, base + (i + 1) % 3, true, &mut cells);
            }
            next += 3;
        }
    }
    let x = Triangulation::new(1, cells, lens)?.with_boundary(marks)?;
    Cobordism::new(x, timelike)
}

/// One CDT strip between a lower cycle and an upper cycle: `up` triangles
/// use a lower edge, `down` triangles an upper edge, in the cyclic order of
/// `pattern` (`true` = up).
fn strip(
    lower: &[VertexId],
    upper: &[VertexId],
    pattern: &[bool],
    cells: &mut Vec<Cell>,
) -> Result<()> {
    let (n, m) = (lower.len(), upper.len());
    let (mut i, mut j) = (0, 0);
    for &up in pattern {
        if up {
            cells.push(Cell::new(vec![lower[i % n], lower[(i + 1) % n], upper[j % m]]));
            i += 1;
        } else {
            cells.push(Cell::new(vec![lower[i % n], upper[(j + 1) % m], upper[j % m]]));
            j += 1;
        }
    }
    if i != n || j != m {
        return Err(Error::Structure("strip pattern does not close".to_string()));
    }
    Ok(())
}

/// Vertex cycles of an oriented closed 1-manifold.
fn cycles(y: &Triangulation) -> Result<Vec<Vec<VertexId>>> {
    let y = y.orient()?;
    let succ: BTreeMap<VertexId, VertexId> = y.cells().iter().map(|c| (c.verts[0], c.verts[1])).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &s in succ.keys() {
        if seen.contains(&s) {
            continue;
        }
        let mut cyc = vec![s];
        seen.insert(s);
        let mut at = succ[&s];
        while at != s {
            seen.insert(at);
            cyc.push(at);
            at = *succ
                .get(&at)
                .ok_or_else(|| Error::Structure("open 1-manifold".to_string()))?;
        }
        out.push(cyc);
    }
    Ok(out)
}

fn grow_circles<R: Rng + ?Sized>(y: &Triangulation, cfg: &GrowthConfig, rng: &mut R) -> Result<Cobordism> {
    let space = cfg.space_len2()?;
    let time = cfg.time_len2(2)?;
    let base = cycles(y)?;
    for attempt in 0..cfg.retry_cap.max(1) {
        let mut next = y.next_vertex();
        let mut cells = Vec::new();
        let mut lower_marks = Vec::new();
        let mut upper_marks = Vec::new();
        let mut tops: Vec<Vec<VertexId>> = Vec::new();
        for cyc in &base {
            let mut cur = cyc.clone();
            for _ in 0..cfg.slices {
                let n = cur.len();
                let (m, pattern) = match cfg.layer {
                    Layer::Full => (n, (0..n).flat_map(|_| [true, false]).collect::<Vec<_>>()),
                    Layer::Partial => {
                        let m = (n as i64 + rng.random_range(-1..=1)).max(3) as usize;
                        let mut p: Vec<bool> = std::iter::repeat_n(true, n).chain(std::iter::repeat_n(false, m)).collect();
                        p.shuffle(rng);
                        (m, p)
                    }
                };
                let up: Vec<VertexId> = (0..m as VertexId).map(|k| next + k).collect();
                next += m as VertexId;
                strip(&cur, &up, &pattern, &mut cells)?;
                cur = up;
            }
            tops.push(cur);
        }
        for cyc in &base {
            for k in 0..cyc.len() {
                lower_marks.push((vec![cyc[k], cyc[(k + 1) % cyc.len()]], BoundarySide::Lower));
            }
        }
        for cyc in &tops {
            for k in 0..cyc.len() {
                upper_marks.push((vec![cyc[k], cyc[(k + 1) % cyc.len()]], BoundarySide::Upper));
            }
        }
        let spacelike: BTreeSet<Edge> = base
            .iter()
            .chain(&tops)
            .flat_map(|c| (0..c.len()).map(move |k| edge(c[k], c[(k + 1) % c.len()])))
            .collect();
        let built = Triangulation::new(2, cells, BTreeMap::new()).and_then(|t| {
            let mut lens = BTreeMap::new();
            let mut timelike = BTreeSet::new();
            for e in t.edges() {
                if let Some(l) = y.len2(e.0, e.1) {
                    lens.insert(e, l.clone());
                } else if spacelike.contains(&e) {
                    lens.insert(e, space.clone());
                } else {
                    lens.insert(e, time.clone());
                    timelike.insert(e);
                }
            }
            let t = Triangulation::new(2, t.cells().to_vec(), lens)?
                .orient()?
                .with_boundary(lower_marks.into_iter().chain(upper_marks))?;
            if !t.is_manifold() {
                return Err(Error::Structure("layer is not a manifold".to_string()));
            }
            Cobordism::new(t, timelike)
        });
        match built {
            Ok(c) => return Ok(c),
            Err(e) if cfg.layer == Layer::Partial && attempt + 1 < cfg.retry_cap => {
                let _ = e;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Structure("no valid partial layer within the retry cap".to_string()))
}

/// Euclidean copy with the timelike squared lengths made positive.
pub fn wick_rotate(x: &Cobordism) -> Result<Triangulation> {
    let mut t = x.x.clone();
    for e in &x.timelike {
        let l = t.len2(e.0, e.1).cloned().unwrap_or_default();
        t.set_len2(*e, l.abs())?;
    }
    t.check_euclidean().map_err(|e| match e {
        Error::Geometry(msg) => Error::Geometry(format!(
            "{msg}; for layers with spacelike a and timelike αa the triangles are valid only for α > 1/4"
        )),
        other => other,
    })?;
    Ok(t)
}

/// Glues `X` to its mirror copy along all marked boundary and Wick
/// rotates. In dimension 0 the double is the disjoint union with the
/// orientation-reversed copy.
pub fn mirror_double(x: &Cobordism) -> Result<Triangulation> {
    let e = wick_rotate(x)?;
    if e.dim() == 0 {
        return e.disjoint_union(&e.mirror());
    }
    let shared: BTreeSet<VertexId> = e.boundary_marks().keys().flatten().copied().collect();
    let unmarked = e
        .boundary_faces()
        .into_iter()
        .filter(|f| !e.boundary_marks().contains_key(f))
        .count();
    if unmarked > 0 {
        return Err(Error::Structure(format!("{unmarked} boundary faces carry no mark")));
    }
    let shift = e.next_vertex();
    let m = e
        .mirror()
        .relabel(|v| if shared.contains(&v) { v } else { v + shift });
    let mut cells = e.cells().to_vec();
    cells.extend(m.cells().iter().cloned());
    let mut lens = e.edge_len2().clone();
    lens.extend(m.edge_len2().iter().map(|(k, v)| (*k, v.clone())));
    let d = Triangulation::new(e.dim(), cells, lens)
        .map_err(|err| Error::Structure(format!("degenerate double: {err}")))?;
    if !d.is_closed() || !d.is_manifold() {
        return Err(Error::Structure("double is not a closed manifold".to_string()));
    }
    Ok(d.compacted())
}

/// `Σ αᵢ·b·Xᵢ` with the weights normalised to `Σ|αᵢ|² = 1`. More than one
/// candidate is only allowed when `d ≤ 1` or no candidate has an upper
/// boundary.
pub fn grow_superposed<K: Ord + Clone>(
    b: Complex64,
    d: usize,
    candidates: Vec<(K, bool)>,
    weights: &[Complex64],
) -> Result<Superposition<K>> {
    if candidates.is_empty() || candidates.len() != weights.len() {
        return Err(Error::Param(format!(
            "{} candidates with {} weights",
            candidates.len(),
            weights.len()
        )));
    }
    if candidates.len() > 1 && d > 1 && candidates.iter().any(|(_, upper)| *upper) {
        return Err(Error::SuperpositionForbidden(format!(
            "{} candidates in dimension {d} with a nonempty upper boundary",
            candidates.len()
        )));
    }
    let n2: f64 = weights.iter().map(|w| w.norm_sqr()).sum();
    if !(n2 > 0.0) {
        return Err(Error::ZeroState);
    }
    let s = 1.0 / n2.sqrt();
    Ok(Superposition::collect(
        candidates
            .into_iter()
            .zip(weights)
            .map(|((k, _), w)| (w * s * b, k)),
    ))
}

/// A sphere with three holes; the first hole is marked lower, the others
/// upper. Used as a growth proposal that breaks the Euler constraint.
pub fn pair_of_pants() -> Triangulation {
    let s = crate::topo::builders::connected_sum(
        &crate::topo::builders::octahedron(),
        &crate::topo::builders::octahedron(),
    );
    let cells = s.cells();
    let n = cells.len();
    let disjoint = |a: &Cell, b: &Cell| a.verts.iter().all(|v| !b.verts.contains(v));
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (&cells[i], &cells[j], &cells[k]);
                if !(disjoint(a, b) && disjoint(a, c) && disjoint(b, c)) {
                    continue;
                }
                let kept: Vec<usize> = (0..n).filter(|&q| q != i && q != j && q != k).collect();
                let t = s.restrict(&kept);
                if !t.is_manifold() {
                    continue;
                }
                let mut marks = Vec::new();
                for (h, side) in [(a, BoundarySide::Lower), (b, BoundarySide::Upper), (c, BoundarySide::Upper)] {
                    for f in h.faces() {
                        marks.push((f, side));
                    }
                }
                if let Ok(t) = t.with_boundary(marks) {
                    return t;
                }
            }
        }
    }
    unreachable!("two glued octahedra contain three disjoint triangles")
}
