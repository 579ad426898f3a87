//! Nearest-neighbour graphs on site classes and their Laplacian gap.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num::BigRational;
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::topo::builders::tetrahedron_boundary;
use crate::topo::pachner::applicable_moves;
use crate::topo::{surface_code, LoopKey};

/// Which family of classes to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    Path(usize),
    Cycle(usize),
    Star(usize),
    Complete(usize),
    /// Single circles with `min..=max` unit edges.
    Circles { min: usize, max: usize },
    /// Combinatorial 2-spheres with at most this many vertices.
    Sphere { max_vertices: usize },
}

impl Topology {
    /// Site dimension of the classes, `None` for abstract test graphs.
    pub fn dim(self) -> Option<usize> {
        match self {
            Self::Circles { .. } => Some(1),
            Self::Sphere { .. } => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Path(n) => write!(f, "path{n}"),
            Self::Cycle(n) => write!(f, "cycle{n}"),
            Self::Star(n) => write!(f, "star{n}"),
            Self::Complete(n) => write!(f, "complete{n}"),
            Self::Circles { min, max } => write!(f, "circles{min}..{max}"),
            Self::Sphere { max_vertices } => write!(f, "sphere{max_vertices}"),
        }
    }
}

impl FromStr for Topology {
    type Err = Error;

    /// `path5`, `cycle4`, `star3`, `complete4`, `circles3..7`, `sphere6`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse(0, format!("unknown graph `{s}`"));
        let split = s.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?;
        let (name, rest) = s.split_at(split);
        let num = |x: &str| x.parse::<usize>().map_err(|_| bad());
        let t = match name {
            "path" => Self::Path(num(rest)?),
            "cycle" => Self::Cycle(num(rest)?),
            "star" => Self::Star(num(rest)?),
            "complete" => Self::Complete(num(rest)?),
            "sphere" => Self::Sphere { max_vertices: num(rest)? },
            "circles" => {
                let (a, b) = rest.split_once("..").ok_or_else(bad)?;
                Self::Circles { min: num(a)?, max: num(b)? }
            }
            _ => return Err(bad()),
        };
        match t {
            Self::Cycle(n) if n < 3 => Err(Error::Param("a cycle needs at least 3 vertices".to_string())),
            Self::Circles { min, max } if min < 3 || max < min => {
                Err(Error::Param("circles need 3 <= min <= max".to_string()))
            }
            Self::Path(0) | Self::Complete(0) => Err(Error::Param("graph needs a vertex".to_string())),
            _ => Ok(t),
        }
    }
}

/// A simple undirected weighted graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeighborGraph {
    pub labels: Vec<String>,
    /// `(i, j, w)` with `i < j`, each pair at most once.
    pub edges: Vec<(usize, usize, f64)>,
    pub truncated: bool,
}

impl NeighborGraph {
    pub fn new(labels: Vec<String>, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let n = labels.len();
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, w) in edges {
            if i == j || i >= n || j >= n {
                return Err(Error::Structure(format!("bad edge ({i}, {j})")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Param("edge weights must be positive".to_string()));
            }
            map.insert((i.min(j), i.max(j)), w);
        }
        Ok(Self {
            labels,
            edges: map.into_iter().map(|((i, j), w)| (i, j, w)).collect(),
            truncated: false,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.len());
        for &(i, j, _) in &self.edges {
            uf.union(i, j);
        }
        let mut roots = uf.into_labeling();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// `y = L x` for the combinatorial Laplacian `L = D − W`.
    pub fn laplacian_apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for &(i, j, w) in &self.edges {
            let d = w * (x[i] - x[j]);
            y[i] += d;
            y[j] -= d;
        }
    }

    /// Dense Laplacian, row-major.
    pub fn laplacian_dense(&self) -> Vec<f64> {
        let n = self.len();
        let mut m = vec![0.0; n * n];
        for &(i, j, w) in &self.edges {
            m[i * n + i] += w;
            m[j * n + j] += w;
            m[i * n + j] -= w;
            m[j * n + i] -= w;
        }
        m
    }
}

fn abstract_graph(n: usize, edges: Vec<(usize, usize)>) -> Result<NeighborGraph> {
    NeighborGraph::new((0..n).map(|i| i.to_string()).collect(), edges.into_iter().map(|(i, j)| (i, j, 1.0)))
}

fn circles_graph(min: usize, max: usize) -> Result<NeighborGraph> {
    let one = BigRational::from_integer(1.into());
    let keys: Vec<LoopKey> = (min..=max).map(|n| LoopKey::uniform(1, n, one.clone())).collect();
    let index: BTreeMap<&LoopKey, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut edges = Vec::new();
    for (i, k) in keys.iter().enumerate() {
        for nb in k.neighbors(min) {
            if let Some(&j) = index.get(&nb) {
                edges.push((i, j, 1.0));
            }
        }
    }
    NeighborGraph::new((min..=max).map(|n| format!("circle{n}")).collect(), edges)
}

fn sphere_graph(max_vertices: usize, cap: usize) -> Result<NeighborGraph> {
    let start = tetrahedron_boundary();
    let mut codes: BTreeMap<String, usize> = BTreeMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut truncated = false;
    let mut queue = VecDeque::new();
    if max_vertices >= 4 {
        let c = surface_code(&start, false)?;
        codes.insert(c.clone(), 0);
        labels.push(format!("v{}:{c}", start.vertices().len()));
        queue.push_back((0usize, start));
    }
    while let Some((i, t)) = queue.pop_front() {
        for (_, nt) in applicable_moves(&t) {
            if nt.vertices().len() > max_vertices {
                continue;
            }
            let c = surface_code(&nt, false)?;
            let j = match codes.get(&c) {
                Some(&j) => j,
                None => {
                    if labels.len() >= cap {
                        truncated = true;
                        continue;
                    }
                    let j = labels.len();
                    codes.insert(c.clone(), j);
                    labels.push(format!("v{}:{c}", nt.vertices().len()));
                    queue.push_back((j, nt));
                    j
                }
            };
            if i != j {
                edges.push((i, j, 1.0));
            }
        }
    }
    let mut g = NeighborGraph::new(labels, edges)?;
    g.truncated = truncated;
    Ok(g)
}

/// Enumerates classes of `topology` up to `cap` vertices; `d` must agree with
/// the topology when it has a site dimension.
pub fn build_neighbor_graph(d: usize, topology: Topology, cap: usize) -> Result<NeighborGraph> {
    if d > 2 {
        return Err(Error::Unsupported(format!("neighbour graph in dimension {d}")));
    }
    if let Some(td) = topology.dim() {
        if td != d {
            return Err(Error::Param(format!("{topology} lives in dimension {td}, not {d}")));
        }
    }
    let mut g = match topology {
        Topology::Path(n) => abstract_graph(n, (1..n).map(|i| (i - 1, i)).collect())?,
        Topology::Cycle(n) => abstract_graph(n, (0..n).map(|i| (i, (i + 1) % n)).collect())?,
        Topology::Star(k) => abstract_graph(k + 1, (1..=k).map(|i| (0, i)).collect())?,
        Topology::Complete(n) => {
            abstract_graph(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect())?
        }
        Topology::Circles { min, max } => circles_graph(min, max)?,
        Topology::Sphere { max_vertices } => return sphere_graph(max_vertices, cap),
    };
    if g.len() > cap {
        let keep = cap;
        g.labels.truncate(keep);
        g.edges.retain(|&(i, j, _)| i < keep && j < keep);
        g.truncated = true;
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapResult {
    pub gap: f64,
    pub disconnected: bool,
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project_out_constant(x: &mut [f64]) {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= m);
}

fn normalize(x: &mut [f64]) -> f64 {
    let n = dot(x, x).sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

/// Conjugate gradients for `L x = b` on the complement of the constants.
fn cg_solve(g: &NeighborGraph, b: &[f64], tol: f64) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    project_out_constant(&mut r);
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let b_norm = rr.sqrt().max(f64::MIN_POSITIVE);
    for _ in 0..(10 * n).max(100) {
        if rr.sqrt() <= tol * b_norm {
            break;
        }
        g.laplacian_apply(&p, &mut ap);
        let alpha = rr / dot(&p, &ap);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        project_out_constant(&mut r);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
    }
    project_out_constant(&mut x);
    x
}

/// Smallest nonzero Laplacian eigenvalue by inverse iteration on the
/// complement of the constants. A disconnected graph reports `0` with the
/// flag set; a graph with fewer than two vertices has no gap.
pub fn spectral_gap(g: &NeighborGraph) -> Result<GapResult> {
    let n = g.len();
    if n < 2 {
        return Err(Error::Structure("spectral gap needs at least two vertices".to_string()));
    }
    if g.components() > 1 {
        return Ok(GapResult { gap: 0.0, disconnected: true, iterations: 0, residual: 0.0 });
    }
    // deterministic start with no symmetry
    let mut x: Vec<f64> = (0..n).map(|i| ((i as f64 + 1.0) * 0.618_033_988_75).fract() + 0.1 * i as f64).collect();
    project_out_constant(&mut x);
    normalize(&mut x);
    let mut lx = vec![0.0; n];
    let mut lambda = f64::INFINITY;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for it in 1..=5000 {
        iterations = it;
        let mut y = cg_solve(g, &x, 1e-14);
        if normalize(&mut y) == 0.0 {
            return Err(Error::ZeroState);
        }
        x = y;
        g.laplacian_apply(&x, &mut lx);
        let new_lambda = dot(&x, &lx);
        residual = lx.iter().zip(&x).map(|(a, b)| (a - new_lambda * b).powi(2)).sum::<f64>().sqrt();
        let settled = (new_lambda - lambda).abs() <= 1e-15 * new_lambda.abs().max(1.0);
        lambda = new_lambda;
        if residual < 1e-10 * lambda.max(1.0) || (settled && residual < 1e-7) {
            break;
        }
    }
    Ok(GapResult { gap: lambda, disconnected: false, iterations, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn dense_gap(g: &NeighborGraph) -> f64 {
        let n = g.len();
        let m = DMatrix::from_row_slice(n, n, &g.laplacian_dense());
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev[1]
    }

    #[test]
    fn small_graph_gaps() {
        for (t, want) in [
            (Topology::Path(2), 2.0),
            (Topology::Cycle(4), 2.0),
            (Topology::Star(3), 1.0),
            (Topology::Complete(5), 5.0),
        ] {
            let g = build_neighbor_graph(0, t, 200).unwrap();
            let r = spectral_gap(&g).unwrap();
            assert!((r.gap - want).abs() < 1e-9, "{t}: {}", r.gap);
            assert!((r.gap - dense_gap(&g)).abs() < 1e-6);
        }
    }

    #[test]
    fn path_gap_formula() {
        let g = build_neighbor_graph(0, Topology::Path(5), 200).unwrap();
        let want = 2.0 - 2.0 * (std::f64::consts::PI / 5.0).cos();
        assert!((spectral_gap(&g).unwrap().gap - want).abs() < 1e-9);
    }

    #[test]
    fn circles_form_a_path() {
        let g = build_neighbor_graph(1, Topology::Circles { min: 3, max: 7 }, 200).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.edges, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)]);
        let r = spectral_gap(&g).unwrap();
        assert!((r.gap - dense_gap(&g)).abs() < 1e-6);
    }

    #[test]
    fn single_class_has_no_edges() {
        let g = build_neighbor_graph(1, Topology::Circles { min: 4, max: 4 }, 200).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.edges.is_empty());
        assert!(spectral_gap(&g).is_err());
    }

    #[test]
    fn small_spheres_are_connected() {
        let g = build_neighbor_graph(2, Topology::Sphere { max_vertices: 6 }, 200).unwrap();
        assert!(g.len() >= 2, "{:?}", g.labels);
        assert!(!g.edges.is_empty());
        assert!(!g.truncated);
        assert_eq!(g.components(), 1);
    }

    #[test]
    fn disconnected_gap_is_zero() {
        let g = NeighborGraph::new(vec!["a".into(), "b".into(), "c".into()], [(0, 1, 1.0)]).unwrap();
        let r = spectral_gap(&g).unwrap();
        assert_eq!(r.gap, 0.0);
        assert!(r.disconnected);
    }

    #[test]
    fn cap_truncates() {
        let g = build_neighbor_graph(0, Topology::Path(10), 4).unwrap();
        assert!(g.truncated);
        assert_eq!(g.len(), 4);
    }

    #[test]
    fn parses_names() {
        assert_eq!("path5".parse::<Topology>().unwrap(), Topology::Path(5));
        assert_eq!("circles3..7".parse::<Topology>().unwrap(), Topology::Circles { min: 3, max: 7 });
        assert!("blob3".parse::<Topology>().is_err());
    }
}
