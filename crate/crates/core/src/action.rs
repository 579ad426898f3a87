//! Regge-type action terms.
//!
//! The total action of a chain is
//! `Σ_d c_d [S_d(Ỹ^d) + Σ_k f_d |b|²] + Σ_{d,k} g_d |Y^{k,d}|² + Σ 2h_d |Δb|²`,
//! where `S_d(Y) = ∫ −R/G + 2Λ_d vol` is evaluated in Regge form on the
//! doubled Euclidean spaces and extended over superpositions with
//! `|amplitude|²` weights. The kinetic sum is a penalty (positive sign) and
//! sits outside the `c_d` bracket.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formal::Complex64;
use crate::topo::Triangulation;

#[derive(Clone, Debug, PartialEq)]
pub struct ActionParams {
    pub g_newton: f64,
    pub lambda: [f64; 3],
    pub c: [f64; 3],
    pub f: [f64; 3],
    pub g: [f64; 3],
    pub h: [f64; 3],
    /// Volume weight of the mock stage.
    pub g_mock: f64,
    pub a: f64,
    pub alpha: [f64; 2],
    /// Action of a singular configuration; `f64::INFINITY` makes it an error.
    pub singular_penalty: f64,
}

impl Default for ActionParams {
    fn default() -> Self {
        Self {
            g_newton: 1.0,
            lambda: [0.0; 3],
            c: [1.0; 3],
            f: [0.1; 3],
            g: [10.0; 3],
            h: [0.0; 3],
            g_mock: 10.0,
            a: 1.0,
            alpha: [1.0; 2],
            singular_penalty: 1e6,
        }
    }
}

impl ActionParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Param(what.to_string()));
        if !(self.g_newton > 0.0 && self.g_newton.is_finite()) {
            return bad("G must be positive");
        }
        if !(self.a > 0.0) || self.alpha.iter().any(|&x| !(x > 0.0)) {
            return bad("a and alpha must be positive");
        }
        for (name, arr) in [("c", self.c), ("f", self.f), ("g", self.g), ("h", self.h)] {
            if arr.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
                return Err(Error::Param(format!("{name}.d must be finite and nonnegative")));
            }
        }
        if self.lambda.iter().any(|x| !x.is_finite()) {
            return bad("Lambda.d must be finite");
        }
        if !(self.g_mock >= 0.0 && self.g_mock.is_finite()) {
            return bad("g.mock must be finite and nonnegative");
        }
        if !(self.singular_penalty >= 0.0) {
            return bad("singular_penalty must be nonnegative");
        }
        Ok(())
    }

    /// The singular-configuration action, or an error when it is infinite.
    pub fn singular(&self, why: &str) -> Result<f64> {
        if self.singular_penalty.is_finite() {
            Ok(self.singular_penalty)
        } else {
            Err(Error::Singular(why.to_string()))
        }
    }
}

/// Compensated (Neumaier) summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Squared area times 16, from squared side lengths.
fn area16_sq(la: f64, lb: f64, lc: f64) -> f64 {
    2.0 * (la * lb + lb * lc + lc * la) - (la * la + lb * lb + lc * lc)
}

/// Angle between sides with squared lengths `la`, `lb`, opposite `lc`.
fn corner_angle(la: f64, lb: f64, lc: f64) -> f64 {
    let a4 = area16_sq(la, lb, lc).max(0.0).sqrt();
    a4.atan2(la + lb - lc)
}

fn triangle_data(y: &Triangulation, verts: &[u32]) -> ([f64; 3], f64) {
    let (p, q, r) = (verts[0], verts[1], verts[2]);
    let (lpq, lqr, lrp) = (y.len2_f64(p, q), y.len2_f64(q, r), y.len2_f64(r, p));
    let angles = [
        corner_angle(lpq, lrp, lqr),
        corner_angle(lpq, lqr, lrp),
        corner_angle(lqr, lrp, lpq),
    ];
    (angles, area16_sq(lpq, lqr, lrp).max(0.0).sqrt() / 4.0)
}

/// `Σ_v (2π − Σ angles at v)` over a closed Euclidean surface.
pub fn regge_deficit_sum(y: &Triangulation) -> Result<f64> {
    if y.dim() != 2 || !y.is_closed() {
        return Err(Error::Structure("deficits need a closed surface".to_string()));
    }
    y.check_euclidean()?;
    let mut per_vertex: std::collections::BTreeMap<u32, KahanSum> = y
        .vertices()
        .iter()
        .map(|&v| (v, KahanSum::default()))
        .collect();
    for c in y.cells() {
        let (angles, _) = triangle_data(y, &c.verts);
        for (k, &v) in c.verts.iter().enumerate() {
            per_vertex.get_mut(&v).expect("vertex").add(angles[k]);
        }
    }
    Ok(per_vertex
        .values()
        .map(|s| 2.0 * PI - s.value())
        .collect::<KahanSum>()
        .value())
}

pub fn total_area(y: &Triangulation) -> Result<f64> {
    y.check_euclidean()?;
    Ok(y
        .cells()
        .iter()
        .map(|c| triangle_data(y, &c.verts).1)
        .collect::<KahanSum>()
        .value())
}

/// `(curvature part, cosmological part)` of `S_d` on one closed Euclidean space.
pub fn s_d_parts(y: &Triangulation, p: &ActionParams) -> Result<(f64, f64)> {
    if !y.is_closed() || !y.is_manifold() {
        return Ok((p.singular("non-manifold or open space")?, 0.0));
    }
    match y.dim() {
        0 => Ok((0.0, 2.0 * p.lambda[0] * y.cells().len() as f64)),
        1 => {
            y.check_euclidean()?;
            let len: KahanSum = y
                .cells()
                .iter()
                .map(|c| y.len2_f64(c.verts[0], c.verts[1]).sqrt())
                .collect();
            Ok((0.0, 2.0 * p.lambda[1] * len.value()))
        }
        2 => Ok((
            -(2.0 / p.g_newton) * regge_deficit_sum(y)?,
            2.0 * p.lambda[2] * total_area(y)?,
        )),
        d => Err(Error::Unsupported(format!("action in dimension {d}"))),
    }
}

pub fn s_d(y: &Triangulation, p: &ActionParams) -> Result<f64> {
    let (a, b) = s_d_parts(y, p)?;
    Ok(a + b)
}

/// `Σ f_d |amplitude|²` over applied moves given as `(d, amplitude)`.
pub fn fugacity_total(moves: &[(usize, Complex64)], p: &ActionParams) -> f64 {
    moves.iter().map(|(d, a)| p.f[*d] * a.norm_sqr()).collect::<KahanSum>().value()
}

/// `Σ 2h_d |b_old − b_new|²` over neighbour pairs `(d, b_old, b_new)`.
pub fn kinetic_total(pairs: &[(usize, Complex64, Complex64)], p: &ActionParams) -> f64 {
    pairs
        .iter()
        .map(|(d, a, b)| 2.0 * p.h[*d] * (a - b).norm_sqr())
        .collect::<KahanSum>()
        .value()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SiteContribution {
    pub site: usize,
    pub d: i32,
    pub curvature: f64,
    pub cosmological: f64,
    pub fugacity: f64,
    pub volume: f64,
    pub kinetic: f64,
}

impl SiteContribution {
    pub fn total(&self) -> f64 {
        self.curvature + self.cosmological + self.fugacity + self.volume + self.kinetic
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ActionBreakdown {
    pub sites: Vec<SiteContribution>,
    pub curvature: f64,
    pub cosmological: f64,
    pub fugacity: f64,
    pub volume: f64,
    pub kinetic: f64,
    pub total: f64,
}

impl ActionBreakdown {
    /// Sums the parts in site order.
    pub fn from_sites(sites: Vec<SiteContribution>) -> Self {
        let sum = |f: fn(&SiteContribution) -> f64| sites.iter().map(f).collect::<KahanSum>().value();
        let curvature = sum(|s| s.curvature);
        let cosmological = sum(|s| s.cosmological);
        let fugacity = sum(|s| s.fugacity);
        let volume = sum(|s| s.volume);
        let kinetic = sum(|s| s.kinetic);
        let total = [curvature, cosmological, fugacity, volume, kinetic]
            .into_iter()
            .collect::<KahanSum>()
            .value();
        Self {
            sites,
            curvature,
            cosmological,
            fugacity,
            volume,
            kinetic,
            total,
        }
    }
}
