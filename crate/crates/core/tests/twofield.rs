use std::f64::consts::PI;

use chainsim_core::twofield::{
    alpha_erase, evaluation_lift, evolve_2h, GridWavefunction, JointState, Level, Potential, TwoFieldParams,
    TwoKetState,
};
use chainsim_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn displaced(n: usize, a: f64, b: f64) -> JointState {
    let g1 = GridWavefunction::gaussian(n, 8.0, a, 1.0, 0.0).unwrap();
    let g2 = GridWavefunction::gaussian(n, 8.0, b, 1.0, 0.0).unwrap();
    TwoKetState::new(g1, g2).unwrap().joint()
}

fn run(n: usize, lambda: f64, dt: f64, t_end: f64) -> (f64, f64) {
    let steps = (t_end / dt).round() as usize;
    let p = TwoFieldParams { lambda, dt, steps, stride: (steps / 64).max(1), ..Default::default() };
    let t = evolve_2h(&displaced(n, 1.0, 1.0), &p).unwrap();
    (t.phi_drift(), t.joint_drift_rate())
}

#[test]
fn erased_norm_is_flat_without_quartic_term() {
    let (d0, j0) = run(128, 0.0, 2e-3, 4.0 * PI);
    let (d1, j1) = run(128, 0.5, 2e-3, 4.0 * PI);
    eprintln!("lambda=0 drift {d0:e}, lambda=0.5 drift {d1:e}, joint {j0:e} {j1:e}");
    assert!(d0 < 1e-6);
    assert!(d1 > 10.0 * d0);
    assert!(j0 < 1e-10 && j1 < 1e-10);
}

#[test]
fn drift_is_stable_under_refinement() {
    let (coarse, _) = run(64, 0.5, 4e-3, 1.0);
    let (fine, _) = run(128, 0.5, 2e-3, 1.0);
    eprintln!("coarse {coarse:e} fine {fine:e}");
    assert!((coarse - fine).abs() < 0.1 * fine);
}

#[test]
fn centre_of_mass_ignores_the_well_without_quartic_term() {
    let s = displaced(64, 1.5, -0.5);
    let base = TwoFieldParams { potential: Potential::Zero, dt: 5e-3, steps: 400, stride: 400, ..Default::default() };
    let well = TwoFieldParams { potential: Potential::GaussianWell { depth: 2.0, width: 0.7 }, ..base.clone() };
    let a = evolve_2h(&s, &base).unwrap().final_state;
    let b = evolve_2h(&s, &well).unwrap().final_state;
    let dx = a.dx();
    let tv: f64 = a.com_density().iter().zip(b.com_density()).map(|(x, y)| (x - y).abs()).sum::<f64>() * dx / 2.0;
    assert!(tv < 1e-6, "trace distance {tv:e}");
    // the well does change the relative motion
    assert!((a.inner(&b).norm() - 1.0).abs() > 1e-4);
}

fn random_unitary(m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    while rows.len() < m {
        let mut v: Vec<Complex64> =
            (0..m).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        for r in &rows {
            let p: Complex64 = r.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(r).for_each(|(x, y)| *x -= p * y);
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            rows.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    rows
}

#[test]
fn alpha_alpha_e_is_a_multiple_of_the_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for m in 1..=8 {
        let frame = random_unitary(m, &mut rng);
        for r in 0..m {
            let out = alpha_erase(&alpha_erase(&evaluation_lift(&frame, r).unwrap(), 3).unwrap(), 2).unwrap();
            let v = out.as_vector().unwrap();
            let c: f64 = frame.iter().map(|row| row[r].norm_sqr()).sum();
            assert!((v[r] - c).norm() < 1e-10);
            let off: f64 = v.iter().enumerate().filter(|(j, _)| *j != r).map(|(_, z)| z.norm()).sum();
            assert!(off < 1e-10);
        }
    }
}

fn vec_level(v: &[(f64, f64)]) -> Level {
    Level::Vector(v.iter().map(|&(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #[test]
    fn alpha_is_conjugate_linear_at_odd_levels(
        a in (-3.0f64..3.0, -3.0f64..3.0),
        b in (-3.0f64..3.0, -3.0f64..3.0),
        v in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3),
        w in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3),
        n in 2usize..4,
    ) {
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let wrap = |x: Level| if n == 2 { x } else { Level::Kets(vec![(Complex64::new(1.0, 0.0), x)]) };
        let (kv, kw) = (wrap(vec_level(&v)), wrap(vec_level(&w)));
        let sum = Level::Kets(vec![(a, kv.clone()), (b, kw.clone())]);
        let t = |z: Complex64| if n % 2 == 1 { z.conj() } else { z };
        let mut out = alpha_erase(&sum, n).unwrap();
        if n == 3 {
            out = alpha_erase(&out, 2).unwrap();
        }
        let (Level::Vector(l), Level::Vector(x), Level::Vector(y)) = (out, vec_level(&v), vec_level(&w)) else {
            unreachable!()
        };
        for k in 0..3 {
            prop_assert!((l[k] - (t(a) * x[k] + t(b) * y[k])).norm() < 1e-12);
        }
    }
}
