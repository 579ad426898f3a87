//! Formal chains `∅ → X⁰ → Y⁰ → X¹ → Y¹ → … ` and their dynamics.

mod build;
pub mod graph;
pub mod sampler;

pub use build::{
    double_site, extend, fluctuate, fluctuation_at, fluctuation_count, fluctuation_moves, reweight, two_arc_cancellation_chain, Extender,
};
pub use graph::{build_neighbor_graph, spectral_gap, GapResult, NeighborGraph, Topology};
pub use sampler::{
    run, sample_discrete, step, toy_chain_space, ChainStats, MoveCount, MoveKind, MoveWeights,
    SamplerConfig, TraceRow, Walker,
};

use std::cmp::Ordering;
use std::fmt;

use crate::action::{ActionBreakdown, ActionParams, SiteContribution};
use crate::cdt::Cobordism;
use crate::error::{Error, Result};
use crate::formal::{CanonicalKey, Complex64, Superposition};
use crate::pairing::ArcComplex;
use crate::topo::{surface_code, Closed0Class, LoopKey, Triangulation};

/// Dimension label of the mock stage.
pub const MOCK_DIM: i32 = 4;

/// A closed Euclidean surface keyed by its metric canonical code, with its
/// Regge data cached.
#[derive(Clone, Debug)]
pub struct SurfaceKey {
    code: String,
    tri: Triangulation,
    deficit: f64,
    area: f64,
}

impl SurfaceKey {
    pub fn new(tri: Triangulation) -> Result<Self> {
        let code = surface_code(&tri, true)?;
        let deficit = crate::action::regge_deficit_sum(&tri)?;
        let area = crate::action::total_area(&tri)?;
        Ok(Self { code, tri, deficit, area })
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn area(&self) -> f64 {
        self.area
    }
}

impl PartialEq for SurfaceKey {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for SurfaceKey {}

impl PartialOrd for SurfaceKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SurfaceKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.code.cmp(&other.code)
    }
}

/// A collar cobordism over a loop key.
#[derive(Clone, Debug)]
pub struct CollarKey {
    base: LoopKey,
    x: Cobordism,
}

impl CollarKey {
    pub fn new(base: LoopKey, x: Cobordism) -> Self {
        Self { base, x }
    }

    pub fn base(&self) -> &LoopKey {
        &self.base
    }

    pub fn cobordism(&self) -> &Cobordism {
        &self.x
    }
}

impl PartialEq for CollarKey {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

impl Eq for CollarKey {}

impl PartialOrd for CollarKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CollarKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.base.cmp(&other.base)
    }
}

/// Keys of the superpositions stored at chain sites.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SiteKey {
    Empty,
    Points(Closed0Class),
    Arcs(ArcComplex),
    Loops(LoopKey),
    Collar(CollarKey),
    Surface(SurfaceKey),
    /// An opaque mock ket or closed class, tagged with the index of the
    /// Y² term it grew over.
    Mock(String, usize),
}

impl fmt::Display for SiteKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "empty"),
            Self::Points(c) => write!(f, "{c}"),
            Self::Arcs(a) => write!(f, "{a}"),
            Self::Loops(l) => write!(f, "{l}"),
            Self::Collar(c) => write!(f, "collar:{}", c.base),
            Self::Surface(s) => write!(f, "surface:{}", s.code),
            Self::Mock(k, l) => write!(f, "mock:{k}#{l}"),
        }
    }
}

impl CanonicalKey for SiteKey {
    fn canonical(&self) -> String {
        self.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteKind {
    Lorentzian,
    Euclidean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Link {
    Grow,
    Double,
    Fluctuate,
}

impl Link {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Grow => "grow",
            Self::Double => "double",
            Self::Fluctuate => "fluctuate",
        }
    }
}

/// Bookkeeping of one fluctuation: the moved term's amplitude before the
/// move, the collected amplitude of its new key after, and the number of
/// (term, move) choices that were available.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fluctuation {
    pub b_old: Complex64,
    pub b_new: Complex64,
    /// Which of the `choices` alternatives was taken.
    pub choice: usize,
    pub choices: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Site {
    pub d: i32,
    pub kind: SiteKind,
    pub state: Superposition<SiteKey>,
    pub fluctuation: Option<Fluctuation>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormalChain {
    sites: Vec<Site>,
    links: Vec<Link>,
}

impl Default for FormalChain {
    fn default() -> Self {
        Self::new()
    }
}

impl FormalChain {
    /// The chain consisting of the empty set, of dimension −1.
    pub fn new() -> Self {
        Self {
            sites: vec![Site {
                d: -1,
                kind: SiteKind::Euclidean,
                state: Superposition::single(SiteKey::Empty, Complex64::new(1.0, 0.0)),
                fluctuation: None,
            }],
            links: Vec::new(),
        }
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn last(&self) -> &Site {
        self.sites.last().expect("sentinel")
    }

    pub fn dimension(&self) -> i32 {
        self.last().d
    }

    pub fn last_link(&self) -> Option<Link> {
        self.links.last().copied()
    }

    /// Fluctuations applied since the last doubling.
    pub fn fluctuations_at_top(&self) -> usize {
        self.links.iter().rev().take_while(|l| **l == Link::Fluctuate).count()
    }

    pub(crate) fn push(&mut self, link: Link, site: Site) {
        self.links.push(link);
        self.sites.push(site);
    }

    pub(crate) fn pop(&mut self) -> Option<(Link, Site)> {
        let link = self.links.pop()?;
        let site = self.sites.pop().expect("one more site than links");
        Some((link, site))
    }

    /// Alternation and dimension bookkeeping.
    pub fn validate(&self) -> Result<()> {
        let bad = |i: usize, why: &str| Err(Error::Structure(format!("link {i}: {why}")));
        for (i, link) in self.links.iter().enumerate() {
            let (a, b) = (&self.sites[i], &self.sites[i + 1]);
            match link {
                Link::Grow => {
                    let next = if a.d == 2 { MOCK_DIM } else { a.d + 1 };
                    if a.kind != SiteKind::Euclidean || b.kind != SiteKind::Lorentzian || b.d != next {
                        return bad(i, "grow must go from Y^d to X^(d+1)");
                    }
                    // each Y term spreads over X terms with Σ|α|² = 1
                    let (nx, ny) = (b.state.norm2(), a.state.norm2());
                    if (nx - ny).abs() > 1e-9 * ny.max(1.0) {
                        return bad(i, &format!("|X|² = {nx} but |Y|² = {ny}"));
                    }
                    for k in b.state.keys() {
                        if let SiteKey::Collar(c) = k {
                            let x = c.cobordism();
                            let (cx, cy) = (x.triangulation().euler_characteristic(), x.lower()?.euler_characteristic());
                            if cx != cy {
                                return Err(Error::EulerConstraint { x: cx, y: cy });
                            }
                        }
                    }
                }
                Link::Double => {
                    if a.kind != SiteKind::Lorentzian || b.kind != SiteKind::Euclidean || a.d != b.d {
                        return bad(i, "double must go from X^d to Y^d");
                    }
                }
                Link::Fluctuate => {
                    if a.kind != SiteKind::Euclidean || b.kind != SiteKind::Euclidean || a.d != b.d {
                        return bad(i, "fluctuate must stay at Y^d");
                    }
                    if b.fluctuation.is_none() {
                        return bad(i, "fluctuated site without record");
                    }
                }
            }
        }
        Ok(())
    }
}

/// `(terminated, dimension)`: the latest Y site collected to zero.
pub fn detect_termination(chain: &FormalChain) -> (bool, Option<i32>) {
    let last = chain.last();
    if last.kind == SiteKind::Euclidean && last.state.norm2() <= crate::formal::EPS_ZERO * crate::formal::EPS_ZERO {
        (true, Some(last.d))
    } else {
        (false, None)
    }
}

fn dim_index(d: i32) -> Option<usize> {
    (0..=2).contains(&d).then_some(d as usize)
}

/// `(curvature, cosmological)` parts of `s_d` for one key.
fn key_action(key: &SiteKey, p: &ActionParams) -> Result<(f64, f64)> {
    Ok(match key {
        SiteKey::Points(c) => (0.0, 2.0 * p.lambda[0] * c.total() as f64),
        SiteKey::Loops(l) => {
            let len: f64 = l
                .loops()
                .iter()
                .flatten()
                .map(|x| num::ToPrimitive::to_f64(x).unwrap_or(f64::NAN).sqrt())
                .sum();
            (0.0, 2.0 * p.lambda[1] * len)
        }
        SiteKey::Surface(s) => (-(2.0 / p.g_newton) * s.deficit, 2.0 * p.lambda[2] * s.area),
        SiteKey::Empty | SiteKey::Mock(..) => (0.0, 0.0),
        SiteKey::Arcs(_) | SiteKey::Collar(_) => {
            return Err(Error::Structure("S_d is evaluated on Euclidean sites".to_string()))
        }
    })
}

/// The total action of a chain, site by site.
pub fn total_action(chain: &FormalChain, p: &ActionParams) -> Result<ActionBreakdown> {
    let mut out = Vec::new();
    let sites = chain.sites();
    for (i, site) in sites.iter().enumerate() {
        if site.kind != SiteKind::Euclidean || site.d < 0 {
            continue;
        }
        let mut c = SiteContribution {
            site: i,
            d: site.d,
            ..Default::default()
        };
        match dim_index(site.d) {
            Some(d) => {
                c.volume = p.g[d] * site.state.norm2();
                if let Some(fl) = &site.fluctuation {
                    c.fugacity = p.c[d] * p.f[d] * fl.b_old.norm_sqr();
                    c.kinetic = 2.0 * p.h[d] * (fl.b_old - fl.b_new).norm_sqr();
                }
                let last_of_dim = sites[i + 1..]
                    .iter()
                    .all(|s| s.d != site.d || s.kind != SiteKind::Euclidean);
                if last_of_dim {
                    for (k, b) in site.state.iter() {
                        let (curv, cosmo) = key_action(k, p)?;
                        c.curvature += p.c[d] * b.norm_sqr() * curv;
                        c.cosmological += p.c[d] * b.norm_sqr() * cosmo;
                    }
                }
            }
            None => c.volume = p.g_mock * site.state.norm2(),
        }
        out.push(c);
    }
    Ok(ActionBreakdown::from_sites(out))
}
