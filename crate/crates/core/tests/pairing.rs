use chainsim_core::formal::{rational, ExactAmplitude};
use chainsim_core::pairing::{
    cauchy_schwarz_check, circle_count_order, lightlike_search, pair, signed_arc_pairing, ArcComplex, ArcRule,
    Bounded1Ket, LightlikeOptions, MatchingRule, MockEquivalence, MockRule,
};
use chainsim_core::{Complex64, LoopKey, Superposition};
use num::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn six_point_kets() -> Vec<Bounded1Ket> {
    Bounded1Ket::all_matchings(&[0, 1, 2, 3, 4, 5], 0)
}

fn state(amps: &[(f64, f64)]) -> Superposition<Bounded1Ket, Complex64> {
    Superposition::collect(six_point_kets().into_iter().zip(amps).map(|(k, &(a, b))| (c(a, b), k)))
}

fn close(a: &Superposition<chainsim_core::Closed1Class>, b: &Superposition<chainsim_core::Closed1Class>) -> bool {
    a.add(&b.scale(&c(-1.0, 0.0))).norm2() < 1e-18
}

#[test]
fn signed_arcs_collect_to_seven_quarters() {
    assert_eq!(signed_arc_pairing().norm2(), rational(7, 4));
}

#[test]
fn mazur_difference_is_light_like() {
    let m = MockEquivalence::mazur();
    let one = c(1.0, 0.0);
    let v = Superposition::collect([(one, "A".to_string()), (-one, "B".to_string())]);
    assert!(pair(&MockRule(&m), &v, &v).unwrap().is_zero());
}

#[test]
fn circle_count_order_has_no_violations_on_six_points() {
    assert!(cauchy_schwarz_check(&MatchingRule, &six_point_kets(), circle_count_order).unwrap().is_empty());
}

#[test]
fn small_matching_family_is_positive() {
    let kets = Bounded1Ket::all_matchings(&[0, 1, 2, 3], 0);
    let opts = LightlikeOptions { restarts: 20, steps: 200, ..Default::default() };
    let r = lightlike_search(&MatchingRule, &kets, &opts, 3).unwrap();
    assert!(r.min_residual > 0.05, "{}", r.min_residual);
}

fn loop_ket(n: usize) -> ArcComplex {
    ArcComplex::new(vec![], LoopKey::uniform(1, n, BigRational::from_integer(1.into()))).unwrap()
}

#[test]
fn fixed_triangulations_never_cancel() {
    let kets: Vec<ArcComplex> = (3..=8).map(loop_ket).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let raw: Vec<(ExactAmplitude, ArcComplex)> = kets
            .iter()
            .map(|k| {
                let re = rational(rng.random_range(-3..=3), rng.random_range(1..=4));
                let im = rational(rng.random_range(-3..=3), rng.random_range(1..=4));
                (ExactAmplitude::new(re, im), k.clone())
            })
            .collect();
        let v = Superposition::collect(raw);
        if v.is_zero() {
            continue;
        }
        assert!(!pair(&ArcRule, &v, &v).unwrap().is_zero());
    }
}

proptest! {
    #[test]
    fn sesquilinear_in_both_slots(
        v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 15),
        w in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 15),
        u in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 15),
        al in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let (v, w, u) = (state(&v), state(&w), state(&u));
        let alpha = c(al.0, al.1);
        let base = pair(&MatchingRule, &v, &w).unwrap();
        prop_assert!(close(&pair(&MatchingRule, &v.scale(&alpha), &w).unwrap(), &base.scale(&alpha)));
        prop_assert!(close(&pair(&MatchingRule, &v, &w.scale(&alpha)).unwrap(), &base.scale(&alpha.conj())));
        let sum = pair(&MatchingRule, &v.add(&u), &w).unwrap();
        prop_assert!(close(&sum, &base.add(&pair(&MatchingRule, &u, &w).unwrap())));
        let sum = pair(&MatchingRule, &v, &w.add(&u)).unwrap();
        prop_assert!(close(&sum, &base.add(&pair(&MatchingRule, &v, &u).unwrap())));
    }

    #[test]
    fn real_pairings_have_symmetric_norms(
        v in prop::collection::vec(-1.0f64..1.0, 15),
        w in prop::collection::vec(-1.0f64..1.0, 15),
    ) {
        let re = |x: Vec<f64>| state(&x.into_iter().map(|a| (a, 0.0)).collect::<Vec<_>>());
        let (v, w) = (re(v), re(w));
        let a = pair(&MatchingRule, &v, &w).unwrap().norm2();
        let b = pair(&MatchingRule, &w, &v).unwrap().norm2();
        prop_assert!((a - b).abs() < 1e-12 * a.max(1.0));
    }

    #[test]
    fn diagonal_pairing_is_positive_on_six_points(v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 15)) {
        let v = state(&v);
        prop_assume!(v.norm2() > 1e-6);
        let r = pair(&MatchingRule, &v, &v).unwrap().norm2();
        prop_assert!(r > 0.0);
    }
}
