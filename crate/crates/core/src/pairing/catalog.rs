//! Worked examples with known collected pairings.

use num::BigRational;

use super::gluing::{glue_1d, Arc, ArcComplex, Bounded1Ket, Label};
use super::{pair, ArcRule, MatchingRule};
use crate::error::Result;
use crate::formal::{exact, rational, ExactAmplitude, Superposition};
use crate::topo::{Closed1Class, LoopKey};

/// Collected coefficients of 1..=7 circles in the self-pairing of the
/// signed arc family.
pub fn signed_arc_profile() -> Vec<BigRational> {
    [(1, 4), (-1, 2), (-1, 4), (1, 1), (-1, 4), (-1, 2), (1, 4)]
        .iter()
        .map(|&(n, d)| rational(n, d))
        .collect()
}

fn profile_of(p: &Superposition<Closed1Class, ExactAmplitude>, len: usize) -> Option<Vec<BigRational>> {
    if p.keys().any(|k| k.circles == 0 || k.circles as usize > len) {
        return None;
    }
    let out: Vec<BigRational> = (1..=len as u32)
        .map(|n| p.amplitude(&Closed1Class { circles: n }).re)
        .collect();
    if p.iter().any(|(_, a)| !num::Zero::is_zero(&a.im)) {
        return None;
    }
    Some(out)
}

/// Brute-force search for four distinct matching kets with amplitudes
/// `(1/2, −1/2, −1/2, 1/2)` whose self-pairing collects to `profile`
/// (coefficients of 1, 2, ... circles). Tries `2k` boundary points for
/// `k = 1, 2` and up to `max_free` free circles per ket.
pub fn search_signed_family(profile: &[BigRational], max_free: u32) -> Option<Superposition<Bounded1Ket, ExactAmplitude>> {
    let signs = [1, -1, -1, 1];
    for k in 1..=2u32 {
        let labels: Vec<Label> = (0..2 * k).collect();
        let kets: Vec<Bounded1Ket> = (0..=max_free)
            .flat_map(|f| Bounded1Ket::all_matchings(&labels, f))
            .collect();
        let n = kets.len();
        // circle counts of all ordered pairs, computed once
        let glue: Vec<u32> = kets
            .iter()
            .flat_map(|a| kets.iter().map(move |b| glue_1d(a, b).expect("same boundary").circles))
            .collect();
        let max_circles = profile.len() as u32;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let idx = [a, b, c, d];
                        if (0..4).any(|i| (i + 1..4).any(|j| idx[i] == idx[j])) {
                            continue;
                        }
                        // integer profile of Σ sᵢ sⱼ, scaled by 4
                        let mut acc = vec![0i64; max_circles as usize + 1];
                        let mut fits = true;
                        for i in 0..4 {
                            for j in 0..4 {
                                let cc = glue[idx[i] * n + idx[j]];
                                if cc == 0 || cc > max_circles {
                                    fits = false;
                                }
                                if fits {
                                    acc[cc as usize] += signs[i] * signs[j];
                                }
                            }
                        }
                        if !fits {
                            continue;
                        }
                        let ok = profile
                            .iter()
                            .enumerate()
                            .all(|(m, p)| rational(acc[m + 1], 4) == *p);
                        if ok {
                            return Some(Superposition::collect(
                                idx.iter()
                                    .zip(signs)
                                    .map(|(&i, s)| (exact(rational(s, 2)), kets[i].clone())),
                            ));
                        }
                    }
                }
            }
        }
    }
    None
}

/// The signed arc family: one arc on two points with 0, 1, 2, 3 free
/// circles and amplitudes `(1/2, −1/2, −1/2, 1/2)`; its self-pairing has
/// squared norm 7/4.
pub fn signed_arc_family() -> Superposition<Bounded1Ket, ExactAmplitude> {
    search_signed_family(&signed_arc_profile(), 3).expect("family exists")
}

pub fn signed_arc_pairing() -> Superposition<Closed1Class, ExactAmplitude> {
    let v = signed_arc_family();
    pair(&MatchingRule, &v, &v).expect("common boundary")
}

pub fn signed_arc_matches_profile() -> bool {
    let p = signed_arc_pairing();
    profile_of(&p, 7).as_deref() == Some(&signed_arc_profile()[..])
}

/// `arc₁ − arc₂` between the same two points, with one and two unit edges.
pub fn two_arc_difference() -> Superposition<ArcComplex, ExactAmplitude> {
    let one = rational(1, 1);
    let a1 = ArcComplex::new(vec![Arc::new(0, 1, vec![one.clone()])], LoopKey::default()).expect("valid");
    let a2 = ArcComplex::new(vec![Arc::new(0, 1, vec![one.clone(), one])], LoopKey::default()).expect("valid");
    Superposition::collect([(exact(rational(1, 1)), a1), (exact(rational(-1, 1)), a2)])
}

/// Self-pairing of [`two_arc_difference`]: `L₂ − 2L₃ + L₄` in loops of unit
/// edges.
pub fn two_arc_pairing() -> Result<Superposition<LoopKey, ExactAmplitude>> {
    let v = two_arc_difference();
    pair(&ArcRule, &v, &v)
}

/// Subdivides the 2-edge loop and merges the 4-edge loop, both into the
/// 3-edge loop, then collects.
pub fn fluctuate_to_three(p: &Superposition<LoopKey, ExactAmplitude>) -> Result<Superposition<LoopKey, ExactAmplitude>> {
    let one = rational(1, 1);
    let mut raw = Vec::new();
    for (k, a) in p.iter() {
        let moved = match k.total_edges() {
            2 => k.subdivide(0, 0, one.clone(), one.clone())?,
            4 => k.merge(0, 0, one.clone())?,
            _ => k.clone(),
        };
        raw.push((a.clone(), moved));
    }
    Ok(Superposition::collect(raw))
}
