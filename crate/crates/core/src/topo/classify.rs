use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;

use super::classes::{Closed0Class, Closed1Class, ClosedSurfaceClass};
use super::triangulation::Triangulation;
use crate::error::{Error, Result};

pub fn euler_characteristic(t: &Triangulation) -> i64 {
    t.euler_characteristic()
}

/// Classifies a closed orientable surface by the genera of its components.
///
/// Components are the classes of the union-find over shared edges; each
/// genus is `(2 - chi) / 2`.
pub fn classify_surface(t: &Triangulation) -> Result<ClosedSurfaceClass> {
    if t.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "surface classification of a {}-complex",
            t.dim()
        )));
    }
    let cof = t.cofaces();
    if let Some((f, c)) = cof.iter().find(|(_, c)| c.len() > 2) {
        return Err(Error::Structure(format!(
            "edge {f:?} has {} incident triangles",
            c.len()
        )));
    }
    if !t.is_closed() {
        return Err(Error::Structure("surface has boundary".to_string()));
    }
    if !t.is_manifold() {
        return Err(Error::Structure("pinched vertex".to_string()));
    }
    t.orient()?;

    let n = t.cells().len();
    let mut uf = UnionFind::<usize>::new(n);
    for c in cof.values() {
        uf.union(c[0], c[1]);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let mut genera = Vec::with_capacity(groups.len());
    for cells in groups.values() {
        let chi = t.restrict(cells).euler_characteristic();
        if chi > 2 || chi % 2 != 0 {
            return Err(Error::Structure(format!(
                "component with Euler characteristic {chi}"
            )));
        }
        genera.push(((2 - chi) / 2) as u32);
    }
    Ok(ClosedSurfaceClass::new(genera))
}

/// Number of circle components of a closed 1-manifold.
pub fn count_circles(t: &Triangulation) -> Result<Closed1Class> {
    if t.dim() != 1 {
        return Err(Error::Unsupported(format!("circle count of a {}-complex", t.dim())));
    }
    if !t.is_closed() {
        return Err(Error::Structure("1-complex has boundary or branching".to_string()));
    }
    Ok(Closed1Class {
        circles: t.component_cells().len() as u32,
    })
}

pub fn classify_points(t: &Triangulation) -> Result<Closed0Class> {
    if t.dim() != 0 {
        return Err(Error::Unsupported(format!("point count of a {}-complex", t.dim())));
    }
    let plus = t.cells().iter().filter(|c| c.positive).count() as u32;
    Ok(Closed0Class::new(plus, t.cells().len() as u32 - plus))
}
