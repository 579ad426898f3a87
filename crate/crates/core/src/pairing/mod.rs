//! The universal pairing on superpositions of kets.

pub mod catalog;
pub mod gluing;
pub mod lightlike;
pub mod mock;
pub mod order;
pub mod series;

pub use gluing::{
    glue_1d, glue_2d, glue_arcs, Arc, ArcComplex, ArcRule, Bounded1Ket, BoundedSurfaceKet, Label,
    MatchingRule, PairingRule, PointRule, SurfaceComponent, SurfaceRule,
};
pub use lightlike::{lightlike_search, residual, GlueTable, LightlikeOptions, LightlikeReport};
pub use mock::{MockEquivalence, MockRule};
pub use order::{cauchy_schwarz_check, circle_count_order, components_chi_order, total_points_order};
pub use catalog::{signed_arc_family, signed_arc_pairing, two_arc_difference, two_arc_pairing};
pub use series::{handle_series_report, l2_handle_series, SeriesRow};

use crate::error::Result;
use crate::formal::{Amplitude, Superposition};

/// Collects `Σ aᵢ·conj(bⱼ)·glue(Mᵢ, mirror(Nⱼ))`.
pub fn pair<R, A>(
    rule: &R,
    v: &Superposition<R::Ket, A>,
    w: &Superposition<R::Ket, A>,
) -> Result<Superposition<R::Closed, A>>
where
    R: PairingRule,
    A: Amplitude,
{
    let mut raw = Vec::with_capacity(v.len() * w.len());
    for (m, a) in v.iter() {
        for (n, b) in w.iter() {
            raw.push((a.clone() * b.conj(), rule.glue(m, n)?));
        }
    }
    Ok(Superposition::collect(raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal::{exact, rational, Complex64, ExactAmplitude};
    use crate::topo::Closed1Class;

    fn ket(m: &[(Label, Label)], free: u32) -> Bounded1Ket {
        Bounded1Ket::new(m.to_vec(), free).unwrap()
    }

    #[test]
    fn single_ket_pairs_to_one_term() {
        let v: Superposition<_, ExactAmplitude> = Superposition::single(ket(&[(0, 1)], 0), exact(rational(1, 1)));
        let p = pair(&MatchingRule, &v, &v).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.amplitude(&Closed1Class { circles: 1 }), exact(rational(1, 1)));
    }

    #[test]
    fn second_slot_is_conjugated() {
        let i = Complex64::new(0.0, 1.0);
        let v = Superposition::single(ket(&[(0, 1)], 0), Complex64::new(1.0, 0.0));
        let w = Superposition::single(ket(&[(0, 1)], 0), i);
        let p = pair(&MatchingRule, &v, &w).unwrap();
        assert_eq!(p.amplitude(&Closed1Class { circles: 1 }), -i);
    }
}
