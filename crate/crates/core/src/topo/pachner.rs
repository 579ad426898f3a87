//! Bistellar moves in dimensions 1 and 2.

use num::{BigRational, One, Signed};
use serde::{Deserialize, Serialize};

use super::triangulation::{edge, triangle_ok, Cell, Edge, Triangulation, VertexId};
use crate::error::{Error, Result};
use crate::formal::rational_from_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PachnerKind {
    Subdivide12,
    Merge21,
    Move13,
    Move31,
    Flip22,
}

impl PachnerKind {
    pub fn dim(self) -> usize {
        match self {
            PachnerKind::Subdivide12 | PachnerKind::Merge21 => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PachnerKind::Subdivide12 => "subdivide_1_2",
            PachnerKind::Merge21 => "merge_2_1",
            PachnerKind::Move13 => "move_1_3",
            PachnerKind::Move31 => "move_3_1",
            PachnerKind::Flip22 => "flip_2_2",
        }
    }
}

/// A move and the simplex it acts on:
///
/// | kind | target | created edges (order of `new_len2`) |
/// |------|--------|-------------------------------------|
/// | `Subdivide12` | edge `[u, v]` | `u-n`, `n-v` |
/// | `Merge21` | interior vertex `[n]` of degree 2 | `u-w` |
/// | `Move13` | triangle `[a, b, c]` | `a-n`, `b-n`, `c-n` |
/// | `Move31` | interior vertex `[n]` of degree 3 | none |
/// | `Flip22` | interior edge `[u, v]` | the new diagonal |
///
/// Missing lengths default to the unit squared length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PachnerMove {
    pub kind: PachnerKind,
    pub target: Vec<VertexId>,
    #[serde(default)]
    pub new_len2: Vec<BigRational>,
}

impl PachnerMove {
    pub fn new(kind: PachnerKind, target: Vec<VertexId>) -> Self {
        Self {
            kind,
            target,
            new_len2: Vec::new(),
        }
    }

    pub fn with_len2(mut self, new_len2: Vec<BigRational>) -> Self {
        self.new_len2 = new_len2;
        self
    }

    fn len(&self, i: usize) -> BigRational {
        self.new_len2.get(i).cloned().unwrap_or_else(BigRational::one)
    }
}

pub fn apply_pachner(t: &Triangulation, m: &PachnerMove) -> Result<Triangulation> {
    if t.dim() != m.kind.dim() {
        return Err(Error::Move(format!(
            "{} does not apply in dimension {}",
            m.kind.name(),
            t.dim()
        )));
    }
    let out = match m.kind {
        PachnerKind::Subdivide12 => subdivide(t, m)?,
        PachnerKind::Merge21 => merge(t, m)?,
        PachnerKind::Move13 => move13(t, m)?,
        PachnerKind::Move31 => move31(t, m)?,
        PachnerKind::Flip22 => flip(t, m)?,
    };
    if t.dim() == 2 && geometry_applies(t) {
        out.check_euclidean()?;
    }
    Ok(out)
}

/// Triangle inequalities are only meaningful when every length is spacelike.
fn geometry_applies(t: &Triangulation) -> bool {
    t.edge_len2().values().all(Signed::is_positive)
}

fn rebuild(
    t: &Triangulation,
    cells: Vec<Cell>,
    extra_len: impl IntoIterator<Item = (Edge, BigRational)>,
) -> Result<Triangulation> {
    let mut lens = t.edge_len2().clone();
    lens.extend(extra_len);
    let marks = t.boundary_marks().clone();
    let out = Triangulation::new(t.dim(), cells, lens)
        .map_err(|e| Error::Move(format!("result is not simplicial: {e}")))?;
    out.with_boundary(marks)
        .map_err(|e| Error::Move(format!("boundary lost: {e}")))
}

fn find_cell(t: &Triangulation, verts: &[VertexId]) -> Option<usize> {
    let mut s = verts.to_vec();
    s.sort_unstable();
    t.cells().iter().position(|c| c.sorted() == s)
}

fn target_vertex(m: &PachnerMove) -> Result<VertexId> {
    match m.target.as_slice() {
        [v] => Ok(*v),
        _ => Err(Error::Move(format!("{} targets a vertex", m.kind.name()))),
    }
}

fn is_interior_vertex(t: &Triangulation, v: VertexId) -> bool {
    !t.boundary_faces().iter().any(|f| f.contains(&v))
}

fn subdivide(t: &Triangulation, m: &PachnerMove) -> Result<Triangulation> {
    let i = find_cell(t, &m.target)
        .filter(|_| m.target.len() == 2)
        .ok_or_else(|| Error::Move(format!("no edge {:?}", m.target)))?;
    let (u, v) = (t.cells()[i].verts[0], t.cells()[i].verts[1]);
    let n = t.next_vertex();
    let mut cells = t.cells().to_vec();
    cells[i] = Cell::new(vec![u, n]);
    cells.insert(i + 1, Cell::new(vec![n, v]));
    rebuild(t, cells, [(edge(u, n), m.len(0)), (edge(n, v), m.len(1))])
}

fn merge(t: &Triangulation, m: &PachnerMove) -> Result<Triangulation> {
    let n = target_vertex(m)?;
    let star = t.star(n);
    if star.len() != 2 || !is_interior_vertex(t, n) {
        return Err(Error::Move(format!("vertex {n} is not an interior vertex of degree 2")));
    }
    let (a, b) = (&t.cells()[star[0]], &t.cells()[star[1]]);
    // orient the pair as u -> n -> w
    let (first, second) = if a.verts[1] == n { (a, b) } else { (b, a) };
    if first.verts[1] != n || second.verts[0] != n {
        return Err(Error::Move(format!("edges at {n} are not coherently oriented")));
    }
    let (u, w) = (first.verts[0], second.verts[1]);
    if u == w || t.len2(u, w).is_some() {
        return Err(Error::Move(format!("merging at {n} would create a double edge")));
    }
    let mut cells: Vec<Cell> = Vec::with_capacity(t.cells().len() - 1);
    for (i, c) in t.cells().iter().enumerate() {
        if i == star[0] {
            cells.push(Cell::new(vec![u, w]));
        } else if i != star[1] {
            cells.push(c.clone());
        }
    }
    rebuild(t, cells, [(edge(u, w), m.len(0))])
}

fn move13(t: &Triangulation, m: &PachnerMove) -> Result<Triangulation> {
    let i = find_cell(t, &m.target)
        .filter(|_| m.target.len() == 3)
        .ok_or_else(|| Error::Move(format!("no triangle {:?}", m.target)))?;
    let [a, b, c] = [t.cells()[i].verts[0], t.cells()[i].verts[1], t.cells()[i].verts[2]];
    let n = t.next_vertex();
    let mut cells = t.cells().to_vec();
    cells[i] = Cell::new(vec![a, b, n]);
    cells.push(Cell::new(vec![b, c, n]));
    cells.push(Cell::new(vec![c, a, n]));
    // lengths are matched to the target's vertex order
    let pos = |v: VertexId| m.target.iter().position(|&x| x == v).unwrap_or(0);
    rebuild(
        t,
        cells,
        [
            (edge(a, n), m.len(pos(a))),
            (edge(b, n), m.len(pos(b))),
            (edge(c, n), m.len(pos(c))),
        ],
    )
}

fn move31(t: &Triangulation, m: &PachnerMove) -> Result<Triangulation> {
    let n = target_vertex(m)?;
    let star = t.star(n);
    if star.len() != 3 || !is_interior_vertex(t, n) {
        return Err(Error::Move(format!("vertex {n} is not an interior vertex of degree 3")));
    }
    let first = &t.cells()[star[0]];
    let k = first.verts.iter().position(|&v| v == n).expect("in star");
    let x = first.verts[(k + 1) % 3];
    let y = first.verts[(k + 2) % 3];
    let link = t.neighbors(n);
    let z = *link
        .iter()
        .find(|&&v| v != x && v != y)
        .ok_or_else(|| Error::Move(format!("degenerate link at {n}")))?;
    if link.len() != 3 {
        return Err(Error::Move(format!("link of {n} is not a triangle")));
    }
    if find_cell(t, &[x, y, z]).is_some() {
        return Err(Error::Move(format!("triangle {:?} already exists", [x, y, z])));
    }
    let mut cells: Vec<Cell> = Vec::with_capacity(t.cells().len() - 2);
    for (i, c) in t.cells().iter().enumerate() {
        if i == star[0] {
            cells.push(Cell::new(vec![x, y, z]));
        } else if !star.contains(&i) {
            cells.push(c.clone());
        }
    }
    rebuild(t, cells, [])
}

fn flip(t: &Triangulation, m: &PachnerMove) -> Result<Triangulation> {
    let (u, v) = match m.target.as_slice() {
        [u, v] => (*u, *v),
        _ => return Err(Error::Move("flip_2_2 targets an edge".to_string())),
    };
    let mut face = vec![u, v];
    face.sort_unstable();
    let cof = t.cofaces();
    let pair = cof
        .get(&face)
        .filter(|c| c.len() == 2)
        .ok_or_else(|| Error::Move(format!("edge {face:?} is not interior")))?;
    // rotate the two triangles to (u, v, x) and (v, u, y)
    let rot = |c: &Cell, a: VertexId, b: VertexId| -> Option<VertexId> {
        (0..3).find_map(|k| {
            (c.verts[k] == a && c.verts[(k + 1) % 3] == b).then(|| c.verts[(k + 2) % 3])
        })
    };
    let (c0, c1) = (&t.cells()[pair[0]], &t.cells()[pair[1]]);
    let (x, y) = match (rot(c0, u, v), rot(c1, v, u)) {
        (Some(x), Some(y)) => (x, y),
        _ => match (rot(c1, u, v), rot(c0, v, u)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(Error::Move("triangles at the edge are not coherently oriented".to_string())),
        },
    };
    if x == y || t.len2(x, y).is_some() {
        return Err(Error::Move(format!("diagonal {:?} already exists", edge(x, y))));
    }
    let mut cells: Vec<Cell> = Vec::with_capacity(t.cells().len());
    for (i, c) in t.cells().iter().enumerate() {
        if i == pair[0] {
            cells.push(Cell::new(vec![x, u, y]));
        } else if i == pair[1] {
            cells.push(Cell::new(vec![y, v, x]));
        } else {
            cells.push(c.clone());
        }
    }
    rebuild(t, cells, [(edge(x, y), m.len(0))])
}

/// Every move applicable to `t` in principle (targets exist); individual
/// moves may still fail their simpliciality checks.
pub fn candidate_moves(t: &Triangulation) -> Vec<PachnerMove> {
    let mut out = Vec::new();
    match t.dim() {
        1 => {
            for c in t.cells() {
                out.push(PachnerMove::new(PachnerKind::Subdivide12, c.verts.clone()));
            }
            for &v in t.vertices() {
                if t.star(v).len() == 2 {
                    out.push(PachnerMove::new(PachnerKind::Merge21, vec![v]));
                }
            }
        }
        2 => {
            for c in t.cells() {
                out.push(PachnerMove::new(PachnerKind::Move13, c.verts.clone()));
            }
            for &v in t.vertices() {
                if t.star(v).len() == 3 {
                    out.push(PachnerMove::new(PachnerKind::Move31, vec![v]));
                }
            }
            for (f, c) in t.cofaces() {
                if c.len() == 2 {
                    out.push(PachnerMove::new(PachnerKind::Flip22, f));
                }
            }
        }
        _ => {}
    }
    out
}

/// Moves from [`candidate_moves`] that actually apply.
pub fn applicable_moves(t: &Triangulation) -> Vec<(PachnerMove, Triangulation)> {
    candidate_moves(t)
        .into_iter()
        .filter_map(|m| apply_pachner(t, &m).ok().map(|r| (m, r)))
        .collect()
}

/// Squared lengths from the vertices of triangle `[a, b, c]` to its
/// centroid, in the order `a, b, c`.
pub fn centroid_len2(t: &Triangulation, tri: [VertexId; 3]) -> Result<Vec<BigRational>> {
    let [a, b, c] = tri;
    let l = |p, q| t.len2(p, q).cloned().ok_or_else(|| Error::Move(format!("no edge {p}-{q}")));
    let (ab, bc, ca) = (l(a, b)?, l(b, c)?, l(c, a)?);
    let two = BigRational::from_integer(2.into());
    let nine = BigRational::from_integer(9.into());
    // median formula: |v - centroid|² = (2(l_vp + l_vq) - l_pq) / 9
    Ok(vec![
        (&two * (&ab + &ca) - &bc) / &nine,
        (&two * (&ab + &bc) - &ca) / &nine,
        (&two * (&bc + &ca) - &ab) / &nine,
    ])
}

/// Squared length of the other diagonal of the quadrilateral around the
/// interior edge `u-v` after unfolding it into the plane; `None` if the
/// quadrilateral is not strictly convex.
pub fn flip_diagonal_len2(t: &Triangulation, u: VertexId, v: VertexId) -> Option<f64> {
    let mut face = vec![u, v];
    face.sort_unstable();
    let cof = t.cofaces();
    let pair = cof.get(&face).filter(|c| c.len() == 2)?;
    let other = |c: &Cell| c.verts.iter().copied().find(|&w| w != u && w != v);
    let x = other(&t.cells()[pair[0]])?;
    let y = other(&t.cells()[pair[1]])?;
    let d = t.len2_f64(u, v).sqrt();
    // place u at the origin and v on the positive x axis
    let place = |w: VertexId, up: bool| -> (f64, f64) {
        let (ru, rv) = (t.len2_f64(u, w), t.len2_f64(v, w));
        let px = (ru - rv + d * d) / (2.0 * d);
        let py = (ru - px * px).max(0.0).sqrt();
        (px, if up { py } else { -py })
    };
    let (px, py) = place(x, true);
    let (qx, qy) = place(y, false);
    // convex iff the segment x-y crosses the open segment u-v
    let s = py / (py - qy);
    let cross = px + s * (qx - px);
    if !(cross > 1e-9 * d && cross < d * (1.0 - 1e-9)) {
        return None;
    }
    let l = (px - qx).powi(2) + (py - qy).powi(2);
    triangle_ok([t.len2_f64(x, u), t.len2_f64(u, y), l]).then_some(l)
}

/// A geometric version of a move: 1-3 moves place the new vertex at the
/// centroid and flips use the unfolded diagonal, so the flat metric of the
/// affected region is preserved.
pub fn geometric_move(t: &Triangulation, kind: PachnerKind, target: Vec<VertexId>) -> Result<PachnerMove> {
    let m = PachnerMove::new(kind, target);
    match kind {
        PachnerKind::Move13 => {
            let tri: [VertexId; 3] = m
                .target
                .clone()
                .try_into()
                .map_err(|_| Error::Move("move_1_3 targets a triangle".to_string()))?;
            let lens = centroid_len2(t, tri)?;
            Ok(m.with_len2(lens))
        }
        PachnerKind::Flip22 => {
            let (u, v) = match m.target.as_slice() {
                [u, v] => (*u, *v),
                _ => return Err(Error::Move("flip_2_2 targets an edge".to_string())),
            };
            let l = flip_diagonal_len2(t, u, v)
                .ok_or_else(|| Error::Geometry(format!("quadrilateral around {u}-{v} is not convex")))?;
            Ok(m.with_len2(vec![rational_from_f64(l)?]))
        }
        _ => Ok(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topo::builders::*;
    use crate::topo::classify::classify_surface;

    #[test]
    fn subdivide_and_merge_on_circles() {
        let c3 = circle(3);
        let c4 = apply_pachner(&c3, &PachnerMove::new(PachnerKind::Subdivide12, vec![0, 1])).unwrap();
        assert_eq!(c4.face_counts(), vec![4, 4]);
        assert_eq!(c4.euler_characteristic(), 0);
        assert!(c4.is_coherently_oriented());
        let back = apply_pachner(&c4, &PachnerMove::new(PachnerKind::Merge21, vec![3])).unwrap();
        assert_eq!(back.face_counts(), vec![3, 3]);
        // merging in a triangle would leave a double edge
        assert!(matches!(
            apply_pachner(&c3, &PachnerMove::new(PachnerKind::Merge21, vec![0])),
            Err(Error::Move(_))
        ));
    }

    #[test]
    fn flip_in_a_square_keeps_a_disk() {
        let sq = square();
        let f = apply_pachner(&sq, &PachnerMove::new(PachnerKind::Flip22, vec![0, 2])).unwrap();
        assert!(f.len2(1, 3).is_some());
        assert!(f.len2(0, 2).is_none());
        assert_eq!(f.euler_characteristic(), 1);
        assert!(f.is_coherently_oriented());
        assert!(matches!(
            apply_pachner(&sq, &PachnerMove::new(PachnerKind::Flip22, vec![0, 1])),
            Err(Error::Move(_))
        ));
    }

    #[test]
    fn one_three_and_back() {
        let s = tetrahedron_boundary();
        let target = s.cells()[0].verts.clone();
        let t = apply_pachner(&s, &PachnerMove::new(PachnerKind::Move13, target)).unwrap();
        assert_eq!(t.face_counts(), vec![5, 9, 6]);
        assert_eq!(classify_surface(&t).unwrap().genera(), &[0]);
        let back = apply_pachner(&t, &PachnerMove::new(PachnerKind::Move31, vec![4])).unwrap();
        assert_eq!(back.face_counts(), vec![4, 6, 4]);
        // removing a vertex of the tetrahedron would duplicate a triangle
        assert!(apply_pachner(&s, &PachnerMove::new(PachnerKind::Move31, vec![0])).is_err());
    }

    #[test]
    fn degenerate_lengths_are_geometry_errors() {
        let s = tetrahedron_boundary();
        let target = s.cells()[0].verts.clone();
        let m = PachnerMove::new(PachnerKind::Move13, target).with_len2(vec![
            BigRational::from_integer(100.into()),
            BigRational::one(),
            BigRational::one(),
        ]);
        assert!(matches!(apply_pachner(&s, &m), Err(Error::Geometry(_))));
    }

    #[test]
    fn flat_flip_diagonal() {
        let sq = flat_square();
        let l = flip_diagonal_len2(&sq, 0, 2).unwrap();
        assert!((l - 2.0).abs() < 1e-12);
    }
}
