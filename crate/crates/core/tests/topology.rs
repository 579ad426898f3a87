use chainsim_core::action::regge_deficit_sum;
use chainsim_core::topo::builders::{genus2, octahedron, tetrahedron_boundary, torus7};
use chainsim_core::topo::pachner::applicable_moves;
use chainsim_core::topo::{classify_surface, euler_characteristic, homology_ranks, Triangulation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn seeds() -> Vec<Triangulation> {
    vec![tetrahedron_boundary(), octahedron(), torus7(), genus2()]
}

/// A random walk of `len` applicable moves.
fn orbit(t: &Triangulation, len: usize, seed: u64) -> Vec<Triangulation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![t.clone()];
    let mut cur = t.clone();
    for _ in 0..len {
        let moves = applicable_moves(&cur);
        if moves.is_empty() {
            break;
        }
        cur = moves[rng.random_range(0..moves.len())].1.clone();
        out.push(cur.clone());
    }
    out
}

#[test]
fn torus_counts() {
    assert_eq!(torus7().face_counts(), vec![7, 21, 14]);
    assert_eq!(euler_characteristic(&torus7()), 0);
}

#[test]
fn disjoint_union_classifies_as_multiset_union() {
    let both = tetrahedron_boundary().disjoint_union(&torus7()).unwrap();
    let want = classify_surface(&tetrahedron_boundary()).unwrap().union(&classify_surface(&torus7()).unwrap());
    assert_eq!(classify_surface(&both).unwrap(), want);
    assert_eq!(want.genera(), &[0, 1]);
    let two = tetrahedron_boundary().disjoint_union(&octahedron()).unwrap();
    assert_eq!(homology_ranks(&two).unwrap().betti, vec![2, 0, 2]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pachner_orbits_keep_topology_and_gauss_bonnet(which in 0usize..4, seed in any::<u64>(), len in 1usize..25) {
        let start = &seeds()[which];
        let chi = euler_characteristic(start);
        let class = classify_surface(start).unwrap();
        for t in orbit(start, len, seed) {
            prop_assert_eq!(euler_characteristic(&t), chi);
            prop_assert_eq!(&classify_surface(&t).unwrap(), &class);
            let h = homology_ranks(&t).unwrap();
            prop_assert_eq!(h.betti, vec![1, 2 * class.genera()[0] as usize, 1]);
            let s = regge_deficit_sum(&t).unwrap();
            let want = 2.0 * std::f64::consts::PI * chi as f64;
            prop_assert!((s - want).abs() <= 1e-9 * want.abs().max(1.0), "{} vs {}", s, want);
        }
    }
}
