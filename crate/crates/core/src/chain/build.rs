//! Grow, double, fluctuate and reweight on formal chains.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CollarKey, FormalChain, Fluctuation, Link, Site, SiteKey, SiteKind, SurfaceKey, MOCK_DIM};
use crate::cdt::{grow_layer, grow_superposed, mirror_double, GrowthConfig, Layer};
use crate::error::{Error, Result};
use crate::formal::{Complex64, Superposition};
use crate::pairing::{glue_arcs, MockEquivalence, MockRule, PairingRule, PointRule};
use crate::topo::builders::points;
use crate::topo::pachner::{candidate_moves, geometric_move, PachnerMove};
use crate::topo::{apply_pachner, Closed0Class, PachnerKind, Triangulation};

/// How a chain is extended by one dimension.
#[derive(Clone, Debug)]
pub struct Extender {
    pub growth: GrowthConfig,
    /// Highest real dimension (0..=2).
    pub max_dimension: i32,
    /// Continue past dimension 2 with opaque kets under `mock`.
    pub mock: Option<MockEquivalence>,
    /// Timelike edges per arc of the two superposed X¹ candidates.
    pub x1_slices: [usize; 2],
    /// Number of points in X⁰ is drawn from `1..=x0_max_points`.
    pub x0_max_points: usize,
}

impl Default for Extender {
    fn default() -> Self {
        Self {
            growth: GrowthConfig::default(),
            max_dimension: 2,
            mock: Some(MockEquivalence::mazur()),
            x1_slices: [2, 3],
            x0_max_points: 3,
        }
    }
}

impl Extender {
    /// Number of distinct extensions of `chain` (the forward proposal picks
    /// one uniformly).
    pub fn choices(&self, chain: &FormalChain) -> usize {
        if chain.dimension() < 0 {
            self.x0_max_points
        } else {
            1
        }
    }

    pub fn can_extend(&self, chain: &FormalChain) -> bool {
        let d = chain.dimension();
        let last = chain.last();
        last.kind == SiteKind::Euclidean
            && !last.state.is_zero()
            && (d < self.max_dimension || (d == 2 && self.mock.is_some()))
            && d != MOCK_DIM
    }
}

fn unit() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Grows `X^{d+1}` over the last Y site and doubles it. `choice` selects the
/// point count of X⁰ and is ignored elsewhere.
pub fn extend(chain: &FormalChain, ext: &Extender, choice: usize) -> Result<FormalChain> {
    if !ext.can_extend(chain) {
        return Err(Error::Move("chain cannot be extended".to_string()));
    }
    let y = &chain.last().state;
    let d = chain.dimension();
    let (nd, x) = match d {
        -1 => {
            let n = (choice % ext.x0_max_points.max(1)) + 1;
            (0, Superposition::single(SiteKey::Points(Closed0Class::new(n as u32, 0)), unit()))
        }
        0 => {
            let mut raw = Vec::new();
            for (key, b) in y.iter() {
                let SiteKey::Points(c) = key else {
                    return Err(Error::Structure(format!("unexpected Y⁰ key {key}")));
                };
                let base = points(c.plus_points as usize, c.minus_points as usize);
                let mut cands = Vec::new();
                for &t in &ext.x1_slices {
                    let cfg = GrowthConfig { slices: t, topology_change: false, ..ext.growth.clone() };
                    let cob = grow_layer(&base, &cfg, &mut ChaCha8Rng::seed_from_u64(0))?;
                    cands.push((SiteKey::Arcs(cob.to_arc_complex()?), true));
                }
                let weights: Vec<Complex64> = (0..cands.len())
                    .map(|i| if i % 2 == 0 { unit() } else { -unit() })
                    .collect();
                raw.extend(grow_superposed(*b, 1, cands, &weights)?.to_raw());
            }
            (1, Superposition::collect(raw))
        }
        1 => {
            let mut raw = Vec::new();
            for (key, b) in y.iter() {
                let SiteKey::Loops(l) = key else {
                    return Err(Error::Structure(format!("unexpected Y¹ key {key}")));
                };
                let cfg = GrowthConfig { slices: 2, layer: Layer::Full, ..ext.growth.clone() };
                let cob = grow_layer(&l.to_triangulation()?, &cfg, &mut ChaCha8Rng::seed_from_u64(0))?;
                let cand = SiteKey::Collar(CollarKey::new(l.clone(), cob));
                raw.extend(grow_superposed(*b, 2, vec![(cand, true)], &[unit()])?.to_raw());
            }
            (2, Superposition::collect(raw))
        }
        2 => {
            let mut raw = Vec::new();
            for (l, (_, b)) in y.iter().enumerate() {
                let cands = vec![
                    (SiteKey::Mock("A".to_string(), l), false),
                    (SiteKey::Mock("B".to_string(), l), false),
                ];
                raw.extend(grow_superposed(*b, MOCK_DIM as usize, cands, &[unit(), -unit()])?.to_raw());
            }
            (MOCK_DIM, Superposition::collect(raw))
        }
        _ => return Err(Error::Move(format!("no growth beyond dimension {d}"))),
    };
    let yn = double_site(&x, ext.mock.as_ref())?;
    let mut out = chain.clone();
    out.push(
        Link::Grow,
        Site { d: nd, kind: SiteKind::Lorentzian, state: x, fluctuation: None },
    );
    out.push(
        Link::Double,
        Site { d: nd, kind: SiteKind::Euclidean, state: yn, fluctuation: None },
    );
    Ok(out)
}

/// Terms sharing a boundary, which are the ones paired with each other.
fn group_of(key: &SiteKey) -> Result<String> {
    Ok(match key {
        SiteKey::Points(_) => "points".to_string(),
        SiteKey::Arcs(a) => format!("arcs{:?}", a.boundary()),
        SiteKey::Collar(c) => format!("collar:{}", c.base()),
        SiteKey::Mock(_, l) => format!("mock#{l}"),
        other => return Err(Error::Structure(format!("{other} is not a Lorentzian key"))),
    })
}

fn glue_keys(a: &SiteKey, b: &SiteKey, mock: Option<&MockEquivalence>) -> Result<SiteKey> {
    match (a, b) {
        (SiteKey::Points(x), SiteKey::Points(y)) => Ok(SiteKey::Points(PointRule.glue(x, y)?)),
        (SiteKey::Arcs(x), SiteKey::Arcs(y)) => Ok(SiteKey::Loops(glue_arcs(x, y)?)),
        (SiteKey::Collar(x), SiteKey::Collar(y)) if x.base() == y.base() => {
            Ok(SiteKey::Surface(SurfaceKey::new(mirror_double(x.cobordism())?)?))
        }
        (SiteKey::Mock(x, l), SiteKey::Mock(y, _)) => {
            let m = mock.ok_or_else(|| Error::Structure("mock keys without a mock table".to_string()))?;
            Ok(SiteKey::Mock(MockRule(m).glue(x, y)?, *l))
        }
        _ => Err(Error::Boundary(format!("cannot glue {a} to {b}"))),
    }
}

/// `Σ_l Σ_{i,j} a_{il}·conj(a_{jl})·X_{il} X̄_{jl}`: terms are paired within
/// groups of common boundary.
pub fn double_site(x: &Superposition<SiteKey>, mock: Option<&MockEquivalence>) -> Result<Superposition<SiteKey>> {
    let mut groups: BTreeMap<String, Vec<(&SiteKey, &Complex64)>> = BTreeMap::new();
    for (k, a) in x.iter() {
        groups.entry(group_of(k)?).or_default().push((k, a));
    }
    let mut raw = Vec::new();
    for g in groups.values() {
        for (ki, ai) in g {
            for (kj, aj) in g {
                raw.push((**ai * aj.conj(), glue_keys(ki, kj, mock)?));
            }
        }
    }
    Ok(Superposition::collect(raw))
}

/// Geometric moves on a surface; each may still fail when applied.
fn surface_moves(t: &Triangulation) -> Vec<PachnerMove> {
    candidate_moves(t)
        .into_iter()
        .filter(|m| matches!(m.kind, PachnerKind::Move13 | PachnerKind::Move31 | PachnerKind::Flip22))
        .filter_map(|m| geometric_move(t, m.kind, m.target).ok())
        .collect()
}

/// Number of fluctuations offered for `key`. Loops subdivide or merge
/// (never below 3 edges) and count distinct results; surfaces count
/// geometric Pachner moves, without identifying isomorphic results.
pub fn fluctuation_count(key: &SiteKey) -> usize {
    match key {
        SiteKey::Loops(l) => l.neighbors(3).len(),
        SiteKey::Surface(s) => surface_moves(s.triangulation()).len(),
        _ => 0,
    }
}

/// The `choice`-th fluctuation of `key`, in the order counted by
/// [`fluctuation_count`].
pub fn fluctuation_at(key: &SiteKey, choice: usize) -> Result<SiteKey> {
    let none = || Error::Move(format!("no fluctuation {choice} of {key}"));
    match key {
        SiteKey::Loops(l) => l.neighbors(3).into_iter().nth(choice).map(SiteKey::Loops).ok_or_else(none),
        SiteKey::Surface(s) => {
            let t = s.triangulation();
            let m = surface_moves(t).into_iter().nth(choice).ok_or_else(none)?;
            Ok(SiteKey::Surface(SurfaceKey::new(apply_pachner(t, &m)?)?))
        }
        _ => Err(none()),
    }
}

/// Distinct keys one fluctuation away from `key`.
pub fn fluctuation_moves(key: &SiteKey) -> Vec<SiteKey> {
    let mut out: Vec<SiteKey> = (0..fluctuation_count(key))
        .filter_map(|i| fluctuation_at(key, i).ok())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Replaces term `term` of the last Y site by its `choice`-th fluctuation;
/// `choices` is the number of alternatives the proposal drew from.
pub fn fluctuate(chain: &FormalChain, term: usize, choice: usize, choices: usize) -> Result<FormalChain> {
    let last = chain.last();
    if last.kind != SiteKind::Euclidean || last.d < 1 || last.d == MOCK_DIM {
        return Err(Error::Move("fluctuations act on Y^d with 1 ≤ d ≤ 2".to_string()));
    }
    let (key, b) = last
        .state
        .iter()
        .nth(term)
        .ok_or_else(|| Error::Move(format!("no term {term}")))?;
    let new_key = fluctuation_at(key, choice)?;
    let b = *b;
    let raw = last
        .state
        .iter()
        .filter(|(k, _)| *k != key)
        .map(|(k, a)| (*a, k.clone()))
        .chain([(b, new_key.clone())]);
    let state = Superposition::collect(raw);
    let b_new = state.amplitude(&new_key);
    let mut out = chain.clone();
    out.push(
        Link::Fluctuate,
        Site {
            d: last.d,
            kind: SiteKind::Euclidean,
            state,
            fluctuation: Some(Fluctuation { b_old: b, b_new, choice, choices }),
        },
    );
    Ok(out)
}

/// Flips the sign of term `term` of the last X and doubles again. Only
/// directly after a doubling.
pub fn reweight(chain: &FormalChain, term: usize, mock: Option<&MockEquivalence>) -> Result<FormalChain> {
    if chain.last_link() != Some(Link::Double) {
        return Err(Error::Move("reweight needs a freshly doubled site".to_string()));
    }
    let mut out = chain.clone();
    let (_, y) = out.pop().expect("double link");
    let (grow, x) = out.pop().expect("grow link");
    let n = x.state.len();
    if term >= n {
        return Err(Error::Move(format!("no term {term}")));
    }
    let raw = x
        .state
        .iter()
        .enumerate()
        .map(|(i, (k, a))| (if i == term { -*a } else { *a }, k.clone()));
    let xs = Superposition::collect(raw);
    let ys = double_site(&xs, mock)?;
    out.push(grow, Site { state: xs, ..x });
    out.push(Link::Double, Site { state: ys, ..y });
    Ok(out)
}

/// `∅ → X⁰ → Y⁰ → X¹ → Y¹` over one point with arcs of one and two
/// timelike edges, so `Y¹ = ½L₂L₂ − L₃L₃ + ½L₄L₄` (pairs of loops by edge
/// count), followed by the four single-loop fluctuations toward 3-edge loops
/// that collect it to zero.
pub fn two_arc_cancellation_chain() -> Result<FormalChain> {
    let ext = Extender { x1_slices: [1, 2], max_dimension: 1, mock: None, ..Default::default() };
    let mut ch = extend(&FormalChain::new(), &ext, 0)?;
    ch = extend(&ch, &ext, 0)?;
    let off = |k: &SiteKey| match k {
        SiteKey::Loops(l) => l.loops().iter().map(|x| x.len().abs_diff(3)).sum(),
        _ => usize::MAX,
    };
    while !ch.last().state.is_zero() {
        let state = &ch.last().state;
        let (term, choice, n) = state
            .keys()
            .enumerate()
            .find_map(|(i, k)| {
                let n = fluctuation_count(k);
                (0..n)
                    .find(|&c| fluctuation_at(k, c).is_ok_and(|m| off(&m) < off(k)))
                    .map(|c| (i, c, n))
            })
            .ok_or_else(|| Error::Move("Y¹ does not cancel on 3-edge loops".to_string()))?;
        let choices = state.len() * n;
        ch = fluctuate(&ch, term, choice, choices)?;
    }
    Ok(ch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::detect_termination;
    use crate::topo::LoopKey;

    fn distance_to_five(k: &SiteKey) -> usize {
        match k {
            SiteKey::Loops(l) => l.loops().iter().map(|x| x.len().abs_diff(5)).sum(),
            _ => usize::MAX,
        }
    }

    /// Greedily moves every loop toward 5 edges until the site cancels.
    fn fluctuate_to_cancel(mut ch: FormalChain) -> FormalChain {
        while !ch.last().state.is_zero() {
            let (term, choice) = ch
                .last()
                .state
                .iter()
                .enumerate()
                .find_map(|(i, (k, _))| {
                    let here = distance_to_five(k);
                    (0..fluctuation_count(k))
                        .position(|c| distance_to_five(&fluctuation_at(k, c).unwrap()) < here)
                        .map(|c| (i, c))
                })
                .expect("a move toward 5-edge loops");
            ch = fluctuate(&ch, term, choice, 1).unwrap();
        }
        ch
    }

    #[test]
    fn one_point_chain_cancels_at_dimension_one() {
        let ext = Extender::default();
        let ch = extend(&FormalChain::new(), &ext, 0).unwrap();
        assert_eq!(ch.last().state.len(), 1);
        let ch = extend(&ch, &ext, 0).unwrap();
        ch.validate().unwrap();
        assert_eq!(ch.last().state.len(), 3);
        assert!((ch.last().state.norm2() - 1.5).abs() < 1e-12);
        let done = fluctuate_to_cancel(ch);
        assert_eq!(detect_termination(&done), (true, Some(1)));
        assert_eq!(done.fluctuations_at_top(), 4);
    }

    #[test]
    fn two_arc_chain_terminates_at_dimension_one() {
        let ch = two_arc_cancellation_chain().unwrap();
        ch.validate().unwrap();
        assert_eq!(ch.fluctuations_at_top(), 4);
        assert_eq!(detect_termination(&ch), (true, Some(1)));
    }

    #[test]
    fn reweighted_chain_does_not_cancel() {
        let ext = Extender::default();
        let ch = extend(&extend(&FormalChain::new(), &ext, 0).unwrap(), &ext, 0).unwrap();
        let r = reweight(&ch, 1, None).unwrap();
        assert!((r.last().state.norm2() - (0.25 + 1.0 + 0.25)).abs() < 1e-12);
        let five = LoopKey::uniform(2, 5, num::BigRational::from_integer(1.into()));
        assert!((r.last().state.amplitude(&SiteKey::Loops(five)).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grows_to_surfaces_and_mock_termination() {
        let ext = Extender::default();
        let mut ch = FormalChain::new();
        for _ in 0..3 {
            ch = extend(&ch, &ext, 0).unwrap();
        }
        assert_eq!(ch.dimension(), 2);
        assert!(ch.last().state.iter().all(|(k, a)| matches!(k, SiteKey::Surface(_)) && a.re > 0.0));
        assert!(!fluctuation_moves(ch.last().state.keys().next().unwrap()).is_empty());
        let m = extend(&ch, &ext, 0).unwrap();
        m.validate().unwrap();
        assert_eq!(detect_termination(&m), (true, Some(MOCK_DIM)));
        assert!(!ext.can_extend(&m));
    }
}
