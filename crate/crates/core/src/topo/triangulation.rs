use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num::{BigRational, One, Signed, ToPrimitive};
use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};

pub type VertexId = u32;
/// An unordered edge stored with the smaller vertex first.
pub type Edge = (VertexId, VertexId);

/// Tolerance for floating-point geometry predicates.
pub const EPS_GEOM: f64 = 1e-12;

pub fn edge(u: VertexId, v: VertexId) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A top-dimensional simplex. The vertex order carries the orientation;
/// for 0-simplices the orientation is the sign.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub verts: Vec<VertexId>,
    pub positive: bool,
}

impl Cell {
    pub fn new(verts: Vec<VertexId>) -> Self {
        Self {
            verts,
            positive: true,
        }
    }

    pub fn point(v: VertexId, positive: bool) -> Self {
        Self {
            verts: vec![v],
            positive,
        }
    }

    pub fn sorted(&self) -> Vec<VertexId> {
        let mut s = self.verts.clone();
        s.sort_unstable();
        s
    }

    /// Codimension-one faces, sorted, in the order they omit vertex 0, 1, ...
    pub fn faces(&self) -> Vec<Vec<VertexId>> {
        (0..self.verts.len())
            .map(|k| {
                let mut f: Vec<VertexId> = self
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &v)| v)
                    .collect();
                f.sort_unstable();
                f
            })
            .collect()
    }

    /// Sign (+1/-1) of the orientation this cell induces on the sorted face
    /// `face`, or 0 when `face` is not a face of the cell.
    pub fn induced_sign(&self, face: &[VertexId]) -> i32 {
        let Some(k) = self.verts.iter().position(|v| !face.contains(v)) else {
            return 0;
        };
        if self.verts.len() != face.len() + 1 {
            return 0;
        }
        let rest: Vec<VertexId> = self
            .verts
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, &v)| v)
            .collect();
        if rest.iter().any(|v| !face.contains(v)) {
            return 0;
        }
        let base = if k % 2 == 0 { 1 } else { -1 };
        base * permutation_sign(&rest)
    }

    pub fn reversed(&self) -> Self {
        let mut verts = self.verts.clone();
        if verts.len() >= 2 {
            verts.swap(0, 1);
        }
        Self {
            verts,
            positive: if self.verts.len() == 1 {
                !self.positive
            } else {
                self.positive
            },
        }
    }
}

fn permutation_sign(v: &[VertexId]) -> i32 {
    let mut inversions = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundarySide {
    Lower,
    Upper,
}

impl BoundarySide {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundarySide::Lower => "lower",
            BoundarySide::Upper => "upper",
        }
    }
}

/// A pure simplicial complex of dimension 0, 1 or 2 with signed squared
/// edge lengths (negative = timelike) and optional lower/upper boundary marks.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    dim: usize,
    vertices: BTreeSet<VertexId>,
    cells: Vec<Cell>,
    edge_len2: BTreeMap<Edge, BigRational>,
    boundary: BTreeMap<Vec<VertexId>, BoundarySide>,
}

impl Triangulation {
    /// Builds and validates a triangulation. Edges without an entry in
    /// `edge_len2` get the unit squared length.
    pub fn new(
        dim: usize,
        cells: Vec<Cell>,
        edge_len2: BTreeMap<Edge, BigRational>,
    ) -> Result<Self> {
        let t = Self::new_singular(dim, cells, edge_len2)?;
        for (face, cof) in t.cofaces() {
            if cof.len() > 2 {
                return Err(Error::Structure(format!(
                    "face {face:?} has {} incident {}-simplices",
                    cof.len(),
                    dim
                )));
            }
        }
        Ok(t)
    }

    /// Like [`Triangulation::new`] but without the manifold condition on
    /// codimension-one faces. Used for singular configurations.
    pub fn new_singular(
        dim: usize,
        cells: Vec<Cell>,
        mut edge_len2: BTreeMap<Edge, BigRational>,
    ) -> Result<Self> {
        if dim > 2 {
            return Err(Error::Unsupported(format!("dimension {dim} > 2")));
        }
        let mut seen = BTreeSet::new();
        let mut vertices = BTreeSet::new();
        for c in &cells {
            if c.verts.len() != dim + 1 {
                return Err(Error::Structure(format!(
                    "simplex {:?} is not {dim}-dimensional",
                    c.verts
                )));
            }
            let s = c.sorted();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Structure(format!("repeated vertex in {:?}", c.verts)));
            }
            if !seen.insert(s) {
                return Err(Error::Structure(format!("duplicated simplex {:?}", c.verts)));
            }
            if dim > 0 && !c.positive {
                return Err(Error::Structure(
                    "only 0-simplices carry a sign".to_string(),
                ));
            }
            vertices.extend(c.verts.iter().copied());
        }
        let mut edges = BTreeSet::new();
        if dim >= 1 {
            for c in &cells {
                for i in 0..c.verts.len() {
                    for j in i + 1..c.verts.len() {
                        edges.insert(edge(c.verts[i], c.verts[j]));
                    }
                }
            }
        }
        edge_len2.retain(|e, _| edges.contains(e));
        for e in edges {
            edge_len2.entry(e).or_insert_with(BigRational::one);
        }
        for (e, l) in &edge_len2 {
            if num::Zero::is_zero(l) {
                return Err(Error::Geometry(format!("edge {e:?} has zero length")));
            }
        }
        Ok(Self {
            dim,
            vertices,
            cells,
            edge_len2,
            boundary: BTreeMap::new(),
        })
    }

    /// The empty triangulation of the given dimension.
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            vertices: BTreeSet::new(),
            cells: Vec::new(),
            edge_len2: BTreeMap::new(),
            boundary: BTreeMap::new(),
        }
    }

    /// Attaches boundary marks. Every marked face must be a codimension-one
    /// face with exactly one incident top simplex.
    pub fn with_boundary(
        mut self,
        marks: impl IntoIterator<Item = (Vec<VertexId>, BoundarySide)>,
    ) -> Result<Self> {
        let cof = self.cofaces();
        for (mut face, side) in marks {
            face.sort_unstable();
            match cof.get(&face) {
                Some(c) if c.len() == 1 => {
                    self.boundary.insert(face, side);
                }
                _ => {
                    return Err(Error::Structure(format!(
                        "marked face {face:?} is not a boundary face"
                    )))
                }
            }
        }
        Ok(self)
    }

    pub fn without_boundary_marks(mut self) -> Self {
        self.boundary.clear();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn max_vertex(&self) -> Option<VertexId> {
        self.vertices.iter().next_back().copied()
    }

    pub fn next_vertex(&self) -> VertexId {
        self.max_vertex().map_or(0, |m| m + 1)
    }

    pub fn edge_len2(&self) -> &BTreeMap<Edge, BigRational> {
        &self.edge_len2
    }

    pub fn len2(&self, u: VertexId, v: VertexId) -> Option<&BigRational> {
        self.edge_len2.get(&edge(u, v))
    }

    pub fn len2_f64(&self, u: VertexId, v: VertexId) -> f64 {
        self.len2(u, v)
            .and_then(ToPrimitive::to_f64)
            .unwrap_or(f64::NAN)
    }

    /// Replaces the squared length of an existing edge.
    pub fn set_len2(&mut self, e: Edge, len2: BigRational) -> Result<()> {
        let e = edge(e.0, e.1);
        match self.edge_len2.get_mut(&e) {
            Some(slot) => {
                *slot = len2;
                Ok(())
            }
            None => Err(Error::Structure(format!("no edge {e:?}"))),
        }
    }

    pub fn boundary_marks(&self) -> &BTreeMap<Vec<VertexId>, BoundarySide> {
        &self.boundary
    }

    pub fn marked(&self, side: BoundarySide) -> Vec<Vec<VertexId>> {
        self.boundary
            .iter()
            .filter(|(_, &s)| s == side)
            .map(|(f, _)| f.clone())
            .collect()
    }

    pub fn edges(&self) -> BTreeSet<Edge> {
        self.edge_len2.keys().copied().collect()
    }

    /// All `k`-simplices as sorted vertex lists.
    pub fn simplices(&self, k: usize) -> BTreeSet<Vec<VertexId>> {
        let mut out = BTreeSet::new();
        if k > self.dim {
            return out;
        }
        for c in &self.cells {
            let s = c.sorted();
            for combo in combinations(&s, k + 1) {
                out.insert(combo);
            }
        }
        out
    }

    pub fn face_counts(&self) -> Vec<usize> {
        (0..=self.dim).map(|k| self.simplices(k).len()).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.face_counts()
            .iter()
            .enumerate()
            .map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// Codimension-one faces with the indices of the cells containing them.
    pub fn cofaces(&self) -> BTreeMap<Vec<VertexId>, Vec<usize>> {
        let mut out: BTreeMap<Vec<VertexId>, Vec<usize>> = BTreeMap::new();
        if self.dim == 0 {
            return out;
        }
        for (i, c) in self.cells.iter().enumerate() {
            for f in c.faces() {
                out.entry(f).or_default().push(i);
            }
        }
        out
    }

    pub fn boundary_faces(&self) -> Vec<Vec<VertexId>> {
        self.cofaces()
            .into_iter()
            .filter(|(_, c)| c.len() == 1)
            .map(|(f, _)| f)
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.cofaces().values().all(|c| c.len() == 2)
    }

    /// Cells around vertex `v`.
    pub fn star(&self, v: VertexId) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.verts.contains(&v))
            .map(|(i, _)| i)
            .collect()
    }

    /// Neighbours of `v` along edges.
    pub fn neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for c in &self.cells {
            if c.verts.contains(&v) {
                out.extend(c.verts.iter().copied().filter(|&w| w != v));
            }
        }
        out
    }

    /// True when every codimension-one face has at most two cofaces and, in
    /// dimension 2, every vertex link is a single path or cycle.
    pub fn is_manifold(&self) -> bool {
        if self.cofaces().values().any(|c| c.len() > 2) {
            return false;
        }
        if self.dim < 2 {
            return true;
        }
        self.vertices.iter().all(|&v| self.link_is_connected(v))
    }

    fn link_is_connected(&self, v: VertexId) -> bool {
        let link: Vec<(VertexId, VertexId)> = self
            .cells
            .iter()
            .filter(|c| c.verts.contains(&v))
            .map(|c| {
                let o: Vec<VertexId> = c.verts.iter().copied().filter(|&w| w != v).collect();
                (o[0], o[1])
            })
            .collect();
        if link.is_empty() {
            return true;
        }
        let verts: BTreeSet<VertexId> = link.iter().flat_map(|&(a, b)| [a, b]).collect();
        let index: BTreeMap<VertexId, usize> =
            verts.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let mut uf = UnionFind::<usize>::new(verts.len());
        for &(a, b) in &link {
            uf.union(index[&a], index[&b]);
        }
        let root = uf.find(0);
        (0..verts.len()).all(|i| uf.find(i) == root)
    }

    /// Checks that all squared lengths are positive and every triangle
    /// satisfies strict triangle inequalities on the square-rooted lengths.
    pub fn check_euclidean(&self) -> Result<()> {
        for (e, l) in &self.edge_len2 {
            if !l.is_positive() {
                return Err(Error::Geometry(format!(
                    "edge {e:?} has non-positive squared length {l}"
                )));
            }
        }
        if self.dim == 2 {
            for c in &self.cells {
                let [a, b, cc] = [c.verts[0], c.verts[1], c.verts[2]];
                let l = [
                    self.len2_f64(a, b),
                    self.len2_f64(b, cc),
                    self.len2_f64(cc, a),
                ];
                if !triangle_ok(l) {
                    return Err(Error::Geometry(format!(
                        "triangle {:?} with squared lengths {l:?} violates the triangle inequality",
                        c.verts
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_euclidean(&self) -> bool {
        self.check_euclidean().is_ok()
    }

    /// The same complex with every orientation reversed.
    pub fn mirror(&self) -> Self {
        let mut t = self.clone();
        t.cells = self.cells.iter().map(Cell::reversed).collect();
        t
    }

    /// Applies an injective vertex relabelling.
    pub fn relabel(&self, f: impl Fn(VertexId) -> VertexId) -> Self {
        Self {
            dim: self.dim,
            vertices: self.vertices.iter().map(|&v| f(v)).collect(),
            cells: self
                .cells
                .iter()
                .map(|c| Cell {
                    verts: c.verts.iter().map(|&v| f(v)).collect(),
                    positive: c.positive,
                })
                .collect(),
            edge_len2: self
                .edge_len2
                .iter()
                .map(|(&(u, v), l)| (edge(f(u), f(v)), l.clone()))
                .collect(),
            boundary: self
                .boundary
                .iter()
                .map(|(face, &s)| {
                    let mut g: Vec<VertexId> = face.iter().map(|&v| f(v)).collect();
                    g.sort_unstable();
                    (g, s)
                })
                .collect(),
        }
    }

    /// Relabels vertices to `0..n` in increasing order.
    pub fn compacted(&self) -> Self {
        let map: BTreeMap<VertexId, VertexId> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as VertexId))
            .collect();
        self.relabel(|v| map[&v])
    }

    /// Disjoint union; the vertices of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        if self.is_empty() {
            return Ok(other.clone());
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.dim != other.dim {
            return Err(Error::Structure(format!(
                "cannot unite dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        let shift = self.next_vertex();
        let o = other.relabel(|v| v + shift);
        let mut t = self.clone();
        t.vertices.extend(o.vertices);
        t.cells.extend(o.cells);
        t.edge_len2.extend(o.edge_len2);
        t.boundary.extend(o.boundary);
        Ok(t)
    }

    /// Groups cells into connected components (cells sharing a vertex).
    pub fn component_cells(&self) -> Vec<Vec<usize>> {
        let n = self.cells.len();
        let mut uf = UnionFind::<usize>::new(n);
        let mut first: BTreeMap<VertexId, usize> = BTreeMap::new();
        for (i, c) in self.cells.iter().enumerate() {
            for &v in &c.verts {
                match first.get(&v) {
                    Some(&j) => {
                        uf.union(i, j);
                    }
                    None => {
                        first.insert(v, i);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            groups.entry(uf.find(i)).or_default().push(i);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// Sub-triangulation on the given cells, keeping their lengths and marks.
    pub fn restrict(&self, cells: &[usize]) -> Self {
        let cells: Vec<Cell> = cells.iter().map(|&i| self.cells[i].clone()).collect();
        let vertices: BTreeSet<VertexId> =
            cells.iter().flat_map(|c| c.verts.iter().copied()).collect();
        let edge_len2 = self
            .edge_len2
            .iter()
            .filter(|((u, v), _)| vertices.contains(u) && vertices.contains(v))
            .map(|(e, l)| (*e, l.clone()))
            .filter(|(e, _)| {
                cells
                    .iter()
                    .any(|c| c.verts.contains(&e.0) && c.verts.contains(&e.1))
            })
            .collect();
        let boundary = self
            .boundary
            .iter()
            .filter(|(f, _)| f.iter().all(|v| vertices.contains(v)))
            .filter(|(f, _)| cells.iter().any(|c| f.iter().all(|v| c.verts.contains(v))))
            .map(|(f, &s)| (f.clone(), s))
            .collect();
        Self {
            dim: self.dim,
            vertices,
            cells,
            edge_len2,
            boundary,
        }
    }

    pub fn components(&self) -> Vec<Triangulation> {
        self.component_cells()
            .iter()
            .map(|c| self.restrict(c))
            .collect()
    }

    /// The subcomplex of faces marked `side`, as a closed (d-1)-triangulation.
    pub fn boundary_subcomplex(&self, side: BoundarySide) -> Result<Triangulation> {
        if self.dim == 0 {
            return Ok(Triangulation::empty(0));
        }
        let faces = self.marked(side);
        let cells: Vec<Cell> = faces.into_iter().map(Cell::new).collect();
        let lens = self.edge_len2.clone();
        Triangulation::new(self.dim - 1, cells, lens)
    }

    /// True when adjacent cells induce opposite orientations on every shared
    /// codimension-one face.
    pub fn is_coherently_oriented(&self) -> bool {
        self.cofaces().iter().all(|(f, c)| {
            c.len() < 2 || self.cells[c[0]].induced_sign(f) == -self.cells[c[1]].induced_sign(f)
        })
    }

    /// Reorients cells so that each component is coherently oriented,
    /// keeping the orientation of the lowest-indexed cell of each component.
    pub fn orient(&self) -> Result<Self> {
        if self.dim == 0 {
            return Ok(self.clone());
        }
        let cof = self.cofaces();
        if cof.values().any(|c| c.len() > 2) {
            return Err(Error::Structure("non-manifold face".to_string()));
        }
        let n = self.cells.len();
        let mut adj: Vec<Vec<(usize, Vec<VertexId>)>> = vec![Vec::new(); n];
        for (f, c) in &cof {
            if c.len() == 2 {
                adj[c[0]].push((c[1], f.clone()));
                adj[c[1]].push((c[0], f.clone()));
            }
        }
        let mut cells = self.cells.clone();
        let mut done = vec![false; n];
        for start in 0..n {
            if done[start] {
                continue;
            }
            done[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for (j, f) in adj[i].clone() {
                    let si = cells[i].induced_sign(&f);
                    let sj = cells[j].induced_sign(&f);
                    if done[j] {
                        if si == sj {
                            return Err(Error::Unsupported(
                                "non-orientable component".to_string(),
                            ));
                        }
                    } else {
                        if si == sj {
                            cells[j] = cells[j].reversed();
                        }
                        done[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        let mut t = self.clone();
        t.cells = cells;
        Ok(t)
    }
}

/// Strict triangle inequality on square-rooted squared lengths.
pub fn triangle_ok(l2: [f64; 3]) -> bool {
    if l2.iter().any(|&x| !(x > 0.0)) {
        return false;
    }
    let [a, b, c] = l2.map(f64::sqrt);
    let scale = a.max(b).max(c);
    a + b - c > EPS_GEOM * scale && b + c - a > EPS_GEOM * scale && c + a - b > EPS_GEOM * scale
}

fn combinations(items: &[VertexId], k: usize) -> Vec<Vec<VertexId>> {
    fn rec(items: &[VertexId], k: usize, start: usize, cur: &mut Vec<VertexId>, out: &mut Vec<Vec<VertexId>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn induced_signs_of_a_triangle() {
        let c = Cell::new(vec![0, 1, 2]);
        assert_eq!(c.induced_sign(&[1, 2]), 1);
        assert_eq!(c.induced_sign(&[0, 2]), -1);
        assert_eq!(c.induced_sign(&[0, 1]), 1);
        let d = Cell::new(vec![1, 0, 3]);
        assert_eq!(d.induced_sign(&[0, 1]), -1);
    }

    #[test]
    fn rejects_three_triangles_on_an_edge() {
        let cells = vec![
            Cell::new(vec![0, 1, 2]),
            Cell::new(vec![1, 0, 3]),
            Cell::new(vec![0, 1, 4]),
        ];
        assert!(matches!(
            Triangulation::new(2, cells.clone(), BTreeMap::new()),
            Err(Error::Structure(_))
        ));
        let t = Triangulation::new_singular(2, cells, BTreeMap::new()).unwrap();
        assert!(!t.is_manifold());
    }

    #[test]
    fn triangle_predicate() {
        assert!(triangle_ok([1.0, 1.0, 1.0]));
        assert!(!triangle_ok([1.0, 1.0, 4.0]));
        assert!(!triangle_ok([1.0, -1.0, 1.0]));
    }
}
