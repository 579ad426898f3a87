//! Standard small triangulations.

use std::collections::BTreeMap;

use num::BigRational;

use super::triangulation::{Cell, Edge, Triangulation, VertexId};
use crate::error::Result;

fn build(dim: usize, cells: Vec<Vec<VertexId>>) -> Triangulation {
    let cells = cells.into_iter().map(Cell::new).collect();
    Triangulation::new(dim, cells, BTreeMap::new())
        .and_then(|t| t.orient())
        .expect("built-in triangulation is valid")
}

/// `plus` positive and `minus` negative points.
pub fn points(plus: usize, minus: usize) -> Triangulation {
    let cells = (0..plus + minus)
        .map(|i| Cell::point(i as VertexId, i < plus))
        .collect();
    Triangulation::new(0, cells, BTreeMap::new()).expect("points are valid")
}

/// A circle with `n >= 3` unit edges, oriented `0 -> 1 -> ... -> 0`.
pub fn circle(n: usize) -> Triangulation {
    assert!(n >= 3, "a simplicial circle needs at least 3 edges");
    let n = n as VertexId;
    build(1, (0..n).map(|i| vec![i, (i + 1) % n]).collect())
}

/// Path `0 - 1 - ... - n` of `n` unit edges.
pub fn path(n: usize) -> Triangulation {
    let n = n as VertexId;
    build(1, (0..n).map(|i| vec![i, i + 1]).collect())
}

/// Boundary of the 3-simplex.
pub fn tetrahedron_boundary() -> Triangulation {
    build(2, vec![vec![0, 1, 2], vec![0, 3, 1], vec![1, 3, 2], vec![0, 2, 3]])
}

pub fn octahedron() -> Triangulation {
    // poles 0 and 1, equator 2..=5
    let eq = [2, 3, 4, 5];
    let mut cells = Vec::new();
    for i in 0..4 {
        let (a, b) = (eq[i], eq[(i + 1) % 4]);
        cells.push(vec![0, a, b]);
        cells.push(vec![1, b, a]);
    }
    build(2, cells)
}

/// Möbius' 7-vertex torus.
pub fn torus7() -> Triangulation {
    let mut cells = Vec::new();
    for i in 0..7 {
        cells.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
        cells.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
    }
    build(2, cells)
}

/// Connected sum of two 7-vertex tori along a removed triangle.
pub fn genus2() -> Triangulation {
    connected_sum(&torus7(), &torus7())
}

/// Connected sum of two closed oriented surfaces: the first cell of each is
/// removed and the two boundary triangles are identified.
pub fn connected_sum(a: &Triangulation, b: &Triangulation) -> Triangulation {
    let ta = a.orient().expect("orientable");
    let tb = b.orient().expect("orientable");
    let ca = ta.cells()[0].verts.clone();
    let cb = tb.cells()[0].verts.clone();
    let shift = ta.next_vertex();
    // b's removed triangle is glued with reversed orientation so that the
    // result stays coherently oriented.
    let map = |v: VertexId| -> VertexId {
        if v == cb[0] {
            ca[1]
        } else if v == cb[1] {
            ca[0]
        } else if v == cb[2] {
            ca[2]
        } else {
            v + shift
        }
    };
    let mut cells: Vec<Vec<VertexId>> = ta.cells()[1..].iter().map(|c| c.verts.clone()).collect();
    cells.extend(tb.cells()[1..].iter().map(|c| c.verts.iter().map(|&v| map(v)).collect()));
    build(2, cells)
}

/// Two triangles forming a square with diagonal 0-2.
pub fn square() -> Triangulation {
    build(2, vec![vec![0, 1, 2], vec![0, 2, 3]])
}

/// A unit-square disk: four boundary edges of length² 1, diagonal 0-2 of length² 2.
pub fn flat_square() -> Triangulation {
    let mut t = square();
    t.set_len2((0, 2), BigRational::from_integer(2.into()))
        .expect("diagonal exists");
    t
}

/// Replaces every squared length using `f(edge)`.
pub fn with_lengths(
    t: &Triangulation,
    mut f: impl FnMut(Edge) -> BigRational,
) -> Result<Triangulation> {
    let lens: BTreeMap<Edge, BigRational> = t.edges().into_iter().map(|e| (e, f(e))).collect();
    let marks: Vec<_> = t
        .boundary_marks()
        .iter()
        .map(|(f, &s)| (f.clone(), s))
        .collect();
    Triangulation::new(t.dim(), t.cells().to_vec(), lens)?.with_boundary(marks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_counts_of_standard_surfaces() {
        assert_eq!(tetrahedron_boundary().face_counts(), vec![4, 6, 4]);
        assert_eq!(octahedron().face_counts(), vec![6, 12, 8]);
        assert_eq!(torus7().face_counts(), vec![7, 21, 14]);
        assert_eq!(genus2().face_counts(), vec![11, 39, 26]);
        for t in [tetrahedron_boundary(), octahedron(), torus7(), genus2()] {
            assert!(t.is_closed());
            assert!(t.is_manifold());
            assert!(t.is_coherently_oriented());
        }
    }

    #[test]
    fn circles_and_points() {
        let c = circle(5);
        assert_eq!(c.euler_characteristic(), 0);
        assert!(c.is_closed() && c.is_coherently_oriented());
        assert_eq!(points(2, 1).euler_characteristic(), 3);
        assert_eq!(path(3).euler_characteristic(), 1);
    }
}
