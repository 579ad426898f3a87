//! The twelve acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL ...` line straight to stderr (past the harness
//! capture) and then asserts. A lock runs them one at a time so each wall
//! clock budget measures only its own work.

use std::f64::consts::PI;
use std::io::Write;
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num::{BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

use chainsim_core::action::{regge_deficit_sum, ActionParams};
use chainsim_core::cdt::{pair_of_pants, Cobordism};
use chainsim_core::chain::{
    build_neighbor_graph, run, spectral_gap, total_action, Extender, FormalChain, Link,
    MoveKind, SamplerConfig, SiteKey, Topology, Walker,
};
use chainsim_core::formal::{rational, ExactAmplitude};
use chainsim_core::pairing::{
    cauchy_schwarz_check, circle_count_order, l2_handle_series, lightlike_search, pair, signed_arc_pairing, ArcComplex,
    ArcRule, Bounded1Ket, LightlikeOptions, MatchingRule, MockEquivalence, MockRule,
};
use chainsim_core::topo::builders::{genus2, tetrahedron_boundary, torus7};
use chainsim_core::topo::pachner::applicable_moves;
use chainsim_core::topo::{euler_characteristic, Triangulation};
use chainsim_core::twofield::{alpha_erase, evaluation_lift, evolve_2h, GridWavefunction, Potential, TwoFieldParams, TwoKetState};
use chainsim_core::{Complex64, Error, LoopKey, Superposition};

static SERIAL: Mutex<()> = Mutex::new(());

fn report(n: u32, ok: bool, elapsed: Duration, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let line = format!("criterion {n}: {verdict} ({:.2}s) {detail}\n", elapsed.as_secs_f64());
    let _ = std::io::stderr().write_all(line.as_bytes());
}

/// Runs `body` under the lock and reports; `body` returns (ok, detail).
fn criterion(n: u32, budget: Duration, body: impl FnOnce() -> (bool, String)) {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let (ok, detail) = body();
    let el = t.elapsed();
    let in_time = el <= budget;
    let detail = if in_time { detail } else { format!("{detail}; over budget {budget:?}") };
    report(n, ok && in_time, el, &detail);
    assert!(ok && in_time, "criterion {n}: {detail}");
}

fn chainsim(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_chainsim")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8"))
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("json output")
}

#[test]
fn criterion_01_signed_arcs_norm() {
    criterion(1, Duration::from_secs(1), || {
        let (code, out) = chainsim(&["pair", "--example", "freedman-3.1"]);
        let v = json(&out);
        let lib = signed_arc_pairing().norm2();
        let ok = code == 0 && v["norm2_exact"] == "7/4" && lib == rational(7, 4);
        (ok, format!("norm2 = {} (library {lib})", v["norm2_exact"]))
    });
}

#[test]
fn criterion_02_two_arc_cancellation() {
    criterion(2, Duration::from_secs(1), || {
        let (code, out) = chainsim(&["pair", "--example", "cancellation-3.2"]);
        let v = json(&out);
        let terms = v["pairing"]["terms"].as_array().map_or(0, Vec::len);
        let zero = v["after_fluctuation_is_zero"] == true;
        let chain = &v["chain"];
        let ok = code == 0 && terms == 3 && zero && chain["terminated"] == true && chain["termination_dimension"] == 1;
        (ok, format!("pairing terms {terms}, zero after fluctuation {zero}, chain {chain}"))
    });
}

#[test]
fn criterion_03_handle_series() {
    criterion(3, Duration::from_secs(10), || {
        let c = |n: usize| ExactAmplitude::new(rational(1, n as i64 + 1), BigRational::zero());
        let got = l2_handle_series(c, 3);
        let mut oracle = BigRational::zero();
        for i in 0..=3i64 {
            for j in 0..=3i64 {
                if i + j == 3 {
                    oracle += rational(1, i + 1) * rational(1, j + 1);
                }
            }
        }
        let want = [rational(1, 1), rational(1, 1), rational(11, 12), oracle.clone()];
        let exact_ok = got.iter().zip(&want).all(|((_, a), w)| a.re == *w && a.im.is_zero());
        let (code, out) = chainsim(&["series", "--g-max", "10000"]);
        let rows: Vec<&str> = out.lines().skip(1).collect();
        let sums: Vec<f64> = rows
            .iter()
            .map(|r| r.rsplit(',').next().and_then(|x| x.parse().ok()).unwrap_or(f64::NAN))
            .collect();
        let monotone = sums.windows(2).all(|w| w[1] >= w[0]);
        let ok = exact_ok && code == 0 && rows.len() == 10_001 && monotone;
        (
            ok,
            format!(
                "g<=3 = {:?}, oracle g=3 {oracle}, partial sum at g=10^4 {:.6}",
                got.iter().map(|(_, a)| a.re.to_string()).collect::<Vec<_>>(),
                sums.last().copied().unwrap_or(f64::NAN)
            ),
        )
    });
}

fn orbit_end_states(t: &Triangulation, len: usize, seed: u64) -> Vec<Triangulation> {
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
fn criterion_04_gauss_bonnet() {
    criterion(4, Duration::from_secs(30), || {
        let seeds = [tetrahedron_boundary(), torus7(), genus2()];
        let mut worst = 0.0f64;
        let mut orbits = 0;
        let mut checked = 0;
        for k in 0..102u64 {
            let s = &seeds[(k % 3) as usize];
            let chi = euler_characteristic(s);
            let want = 2.0 * PI * chi as f64;
            for t in orbit_end_states(s, 12, k) {
                let got = regge_deficit_sum(&t).unwrap_or(f64::NAN);
                let rel = (got - want).abs() / want.abs().max(1.0);
                worst = if rel.is_nan() { f64::INFINITY } else { worst.max(rel) };
                checked += 1;
            }
            orbits += 1;
        }
        (worst <= 1e-9 && orbits >= 100, format!("{orbits} orbits, {checked} triangulations, worst relative error {worst:e}"))
    });
}

fn up_to_two_circles(labels: &[u32]) -> Vec<Bounded1Ket> {
    (0..=2).flat_map(|f| Bounded1Ket::all_matchings(labels, f)).collect()
}

/// Up to six distinct kets on 2, 4 or 6 points, drawn from `pool`.
fn random_family(rng: &mut ChaCha8Rng, pool: impl Fn(&[u32]) -> Vec<Bounded1Ket>) -> Vec<Bounded1Ket> {
    let n = 2 * rng.random_range(1..=3u32);
    let labels: Vec<u32> = (0..n).collect();
    let pool = pool(&labels);
    let k = rng.random_range(1..=6.min(pool.len()));
    let mut idx = rand::seq::index::sample(rng, pool.len(), k).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| pool[i].clone()).collect()
}

#[test]
fn criterion_05_positivity() {
    criterion(5, Duration::from_secs(120), || {
        let mut cs_free = 0;
        let mut cs_with_circles = 0;
        for n in [2u32, 4, 6] {
            let labels: Vec<u32> = (0..n).collect();
            let free = Bounded1Ket::all_matchings(&labels, 0);
            cs_free += cauchy_schwarz_check(&MatchingRule, &free, circle_count_order).map_or(usize::MAX, |v| v.len());
            let circles = up_to_two_circles(&labels);
            cs_with_circles +=
                cauchy_schwarz_check(&MatchingRule, &circles, circle_count_order).map_or(usize::MAX, |v| v.len());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let opts = LightlikeOptions::default();
        let mut min_family = f64::INFINITY;
        let mut min_with_circles = f64::INFINITY;
        for f in 0..20 {
            let kets = random_family(&mut rng, |l| Bounded1Ket::all_matchings(l, 0));
            let r = lightlike_search(&MatchingRule, &kets, &opts, 100 + f).map_or(f64::NAN, |r| r.min_residual);
            min_family = if r.is_nan() { f64::NEG_INFINITY } else { min_family.min(r) };
            let kets = random_family(&mut rng, up_to_two_circles);
            let r = lightlike_search(&MatchingRule, &kets, &opts, 200 + f).map_or(f64::NAN, |r| r.min_residual);
            min_with_circles = min_with_circles.min(r);
        }
        let m = MockEquivalence::mazur();
        let kets: Vec<String> = m.kets().cloned().collect();
        let rep = lightlike_search(&MockRule(&m), &kets, &opts, 7).expect("mock search");
        let amp = |name: &str| kets.iter().position(|k| k == name).map(|i| rep.amplitudes[i]);
        let (a, b) = (amp("A").unwrap_or_default(), amp("B").unwrap_or_default());
        let others: f64 = kets
            .iter()
            .zip(&rep.amplitudes)
            .filter(|(k, _)| *k != "A" && *k != "B")
            .map(|(_, z)| z.norm_sqr())
            .sum();
        let along = (a + b).norm() < 1e-6 && (a.norm() - 0.5f64.sqrt()).abs() < 1e-6 && others < 1e-12;
        let ok = cs_free == 0 && min_family > 0.05 && rep.min_residual < 1e-8 && along;
        (
            ok,
            format!(
                "CS violations circle-free {cs_free}, with <=2 free circles {cs_with_circles} (documented); \
                 min family residual {min_family:.4} (with free circles {min_with_circles:.2e}, documented); mock residual {:e}, null vector A {a:.6} B {b:.6}",
                rep.min_residual
            ),
        )
    });
}

fn loop_ket(n: usize) -> ArcComplex {
    ArcComplex::new(vec![], LoopKey::uniform(1, n, BigRational::from_integer(1.into()))).expect("loop ket")
}

#[test]
fn criterion_06_fixed_triangulations_never_cancel() {
    criterion(6, Duration::from_secs(30), || {
        let kets: Vec<ArcComplex> = (3..=8).map(loop_ket).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut draws = 0;
        let mut cancelled = 0;
        while draws < 1000 {
            let raw: Vec<(ExactAmplitude, ArcComplex)> = kets
                .iter()
                .map(|k| {
                    let re = rational(rng.random_range(-5..=5), rng.random_range(1..=6));
                    let im = rational(rng.random_range(-5..=5), rng.random_range(1..=6));
                    (ExactAmplitude::new(re, im), k.clone())
                })
                .collect();
            let v = Superposition::collect(raw);
            if v.is_zero() {
                continue;
            }
            draws += 1;
            if pair(&ArcRule, &v, &v).map_or(true, |p| p.is_zero()) {
                cancelled += 1;
            }
        }
        (cancelled == 0, format!("{draws} exact draws over loops of 3..8 edges, {cancelled} cancelled"))
    });
}

/// χ of every X term equals χ of the Y it grew over: one arc per point at
/// d=1, a collar with `χ(X) = χ(lower)` at d=2. X⁰ (grown from the empty
/// set) and the opaque mock stage carry no cobordism to check.
fn grow_step_respects_euler(chain: &FormalChain) -> Option<bool> {
    let n = chain.sites().len();
    if n < 3 || chain.links()[n - 3] != Link::Grow {
        return None;
    }
    let (y, x) = (&chain.sites()[n - 3], &chain.sites()[n - 2]);
    match x.d {
        1 => {
            let chis: Vec<i64> = y
                .state
                .keys()
                .filter_map(|k| match k {
                    SiteKey::Points(c) => Some(c.total() as i64),
                    _ => None,
                })
                .collect();
            Some(x.state.keys().all(|k| match k {
                SiteKey::Arcs(a) => chis.contains(&(a.arcs().len() as i64)),
                _ => false,
            }))
        }
        2 => Some(x.state.keys().all(|k| match k {
            SiteKey::Collar(c) => {
                let cob = c.cobordism();
                cob.lower().is_ok_and(|l| euler_characteristic(&l) == euler_characteristic(cob.triangulation()))
            }
            _ => false,
        })),
        _ => None,
    }
}

#[test]
fn criterion_07_euler_constraint() {
    criterion(7, Duration::from_secs(60), || {
        let p = ActionParams { g: [1.0; 3], g_mock: 1.0, ..Default::default() };
        let cfg = SamplerConfig::default();
        let mut checked = 0;
        let mut good = 0;
        for seed in 0..4 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut w = Walker::new(FormalChain::new(), &p).expect("empty chain");
            for _ in 0..3000 {
                let (kind, ok) = w.step(&p, &cfg, &mut rng);
                if ok && kind == MoveKind::Extend {
                    if let Some(fine) = grow_step_respects_euler(&w.chain) {
                        checked += 1;
                        good += usize::from(fine && w.chain.validate().is_ok());
                    }
                }
            }
        }
        let pants = Cobordism::new(pair_of_pants(), Default::default());
        let rejected = matches!(pants, Err(Error::EulerConstraint { x: -1, y: 0 }));
        let ok = checked > 0 && good == checked && rejected;
        (ok, format!("{good}/{checked} accepted grow steps satisfy chi(X) = chi(Y); pair of pants: {pants:?}"))
    });
}

#[test]
fn criterion_08_sampler_matches_gibbs() {
    criterion(8, Duration::from_secs(60), || {
        // real dimension 0 only: the chain moves among ∅ and the 1, 2, 3 point chains
        let p = ActionParams { lambda: [0.1, 0.0, 0.0], g: [0.5; 3], ..Default::default() };
        let ext = Extender { max_dimension: 0, mock: None, ..Default::default() };
        let cfg = SamplerConfig { extender: ext.clone(), moves_per_sweep: 20, ..Default::default() };
        let states: Vec<FormalChain> = (0..3)
            .map(|c| chainsim_core::chain::extend(&FormalChain::new(), &ext, c).expect("toy chain"))
            .collect();
        let s: Vec<f64> = states.iter().map(|c| total_action(c, &p).expect("action").total).collect();
        let sweeps = 100_000;
        let count = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut w = Walker::new(FormalChain::new(), &p).expect("empty chain");
            let mut counts = [0u64; 3];
            for _ in 0..sweeps {
                for _ in 0..cfg.moves_per_sweep {
                    w.step(&p, &cfg, &mut rng);
                }
                if w.chain.dimension() == 0 {
                    if let Some(SiteKey::Points(c)) = w.chain.sites()[1].state.keys().next() {
                        counts[c.total() as usize - 1] += 1;
                    }
                }
            }
            counts
        };
        let counts = count(8);
        let n: u64 = counts.iter().sum();
        let z: f64 = s.iter().map(|x| (-x).exp()).sum();
        let stat: f64 = counts
            .iter()
            .zip(&s)
            .map(|(&c, &a)| {
                let e = n as f64 * (-a).exp() / z;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        let pval = 1.0 - ChiSquared::new(2.0).expect("dof").cdf(stat);
        let again = count(8) == counts;
        let small = SamplerConfig { seed: 5, chains: 3, sweeps: 30, ..Default::default() };
        let stats_again = run(&small, &p).ok() == run(&small, &p).ok();
        let ok = pval > 0.01 && again && stats_again;
        (
            ok,
            format!("counts {counts:?} over {n} non-empty samples, actions {s:.3?}, chi2 {stat:.3}, p = {pval:.3}, bit-identical {}", again && stats_again),
        )
    });
}

#[test]
fn criterion_09_kinetic_term_suppresses_cancellation() {
    criterion(9, Duration::from_secs(300), || {
        let ext = Extender { max_dimension: 1, mock: None, ..Default::default() };
        let occupancy = |seed: u64, h1: f64| {
            let p = ActionParams { g: [1.0; 3], h: [0.0, h1, 0.0], ..Default::default() };
            let cfg = SamplerConfig { seed, sweeps: 400, extender: ext.clone(), record_trace: false, ..Default::default() };
            run(&cfg, &p).map_or(f64::NAN, |s| s.occupancy_fraction(1))
        };
        let g1 = 1.0;
        let (mut less, mut more, mut ties) = (0u64, 0u64, 0u64);
        for seed in 1..=20 {
            let (kin, free) = (occupancy(seed, 100.0 * g1), occupancy(seed, 0.0));
            if kin < free {
                less += 1;
            } else if kin > free {
                more += 1;
            } else {
                ties += 1;
            }
        }
        let n = less + more;
        // one-sided sign test: P(X ≥ less) under Bin(n, 1/2)
        let pval = if n == 0 || less == 0 {
            1.0
        } else {
            Binomial::new(0.5, n).map_or(1.0, |b| 1.0 - b.cdf(less - 1))
        };
        (pval < 0.05, format!("h1=100g1 lower in {less}, higher in {more}, tied {ties} of 20 pairs; sign test p = {pval:.2e}"))
    });
}

fn dense_gap(n: usize, m: Vec<f64>) -> f64 {
    let mut ev: Vec<f64> =
        nalgebra::SymmetricEigen::new(nalgebra::DMatrix::from_row_slice(n, n, &m)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev[1]
}

#[test]
fn criterion_10_spectral_gap() {
    criterion(10, Duration::from_secs(5), || {
        let cases: [(&str, Option<f64>); 4] =
            [("path2", Some(2.0)), ("cycle4", Some(2.0)), ("star3", Some(1.0)), ("circles3..7", None)];
        let mut worst = 0.0f64;
        let mut parts = Vec::new();
        for (name, exact) in cases {
            let t: Topology = name.parse().expect("topology");
            let g = build_neighbor_graph(t.dim().unwrap_or(0), t, 200).expect("graph");
            let gap = spectral_gap(&g).map_or(f64::NAN, |r| r.gap);
            let oracle = dense_gap(g.len(), g.laplacian_dense());
            let mut err = (gap - oracle).abs();
            if let Some(x) = exact {
                err = err.max((gap - x).abs());
            }
            worst = if err.is_nan() { f64::INFINITY } else { worst.max(err) };
            parts.push(format!("{name} {gap:.9}"));
        }
        (worst < 1e-6, format!("{}; worst deviation {worst:e}", parts.join(", ")))
    });
}

#[test]
fn criterion_11_two_field_toy() {
    criterion(11, Duration::from_secs(120), || {
        let n = 128;
        let dt = 2e-3;
        let gaussian = |c: f64| GridWavefunction::gaussian(n, 8.0, c, 1.0, 0.0).expect("gaussian");
        let joint = |a: f64, b: f64| TwoKetState::new(gaussian(a), gaussian(b)).expect("kets").joint();
        let steps = (4.0 * PI / dt).round() as usize;
        let drift = |lambda: f64| {
            let p = TwoFieldParams { lambda, dt, steps, stride: 50, ..Default::default() };
            let t = evolve_2h(&joint(1.0, 1.0), &p).expect("evolution");
            (t.phi_drift(), t.joint_drift_rate())
        };
        let (d0, j0) = drift(0.0);
        let (d1, j1) = drift(0.5);
        let period = (2.0 * PI / dt).round() as usize;
        let s = joint(1.5, -0.5);
        let p = TwoFieldParams { potential: Potential::Zero, dt: 2.0 * PI / period as f64, steps: period, stride: period, ..Default::default() };
        let t = evolve_2h(&s, &p).expect("evolution");
        let fid = s.inner(&t.final_state).norm_sqr();
        let j2 = t.joint_drift_rate();
        let ok = d0 < 1e-6 && d1 > 10.0 * d0 && j0.max(j1).max(j2) < 1e-10 && fid > 1.0 - 1e-6;
        (
            ok,
            format!(
                "N={n} dt={dt}: drift lambda=0 {d0:.3e}, lambda=0.5 {d1:.3e}; joint drift/unit time {:.1e}; fidelity at 2pi 1-{:.1e}",
                j0.max(j1).max(j2),
                1.0 - fid
            ),
        )
    });
}

fn random_frame(m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let a = nalgebra::DMatrix::<Complex64>::from_fn(m, m, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let q = a.qr().q();
    (0..m).map(|i| (0..m).map(|j| q[(i, j)]).collect()).collect()
}

#[test]
fn criterion_12_alpha_alpha_e() {
    criterion(12, Duration::from_secs(1), || {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (mut worst_off, mut worst_c) = (0.0f64, 0.0f64);
        for m in 1..=8 {
            for _ in 0..4 {
                let frame = random_frame(m, &mut rng);
                for r in 0..m {
                    let lifted = evaluation_lift(&frame, r).expect("lift");
                    let out = alpha_erase(&lifted, 3).and_then(|v| alpha_erase(&v, 2)).expect("erase");
                    let v = out.as_vector().expect("vector");
                    let c: f64 = frame.iter().map(|row| row[r].norm_sqr()).sum();
                    worst_c = worst_c.max((v[r] - c).norm());
                    let off = v.iter().enumerate().filter(|(j, _)| *j != r).map(|(_, z)| z.norm_sqr()).sum::<f64>().sqrt();
                    worst_off = worst_off.max(off);
                }
            }
        }
        (worst_off < 1e-10 && worst_c < 1e-10, format!("m <= 8: off-component residual {worst_off:e}, |v_r - sum|b|^2| {worst_c:e}"))
    });
}
