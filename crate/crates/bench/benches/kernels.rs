use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chainsim_core::action::{regge_deficit_sum, ActionParams};
use chainsim_core::chain::{build_neighbor_graph, run, spectral_gap, Extender, SamplerConfig, Topology};
use chainsim_core::pairing::{pair, signed_arc_pairing, Bounded1Ket, MatchingRule};
use chainsim_core::topo::builders::genus2;
use chainsim_core::topo::surface_code;
use chainsim_core::twofield::{evolve_2h, GridWavefunction, TwoFieldParams, TwoKetState};
use chainsim_core::{Complex64, Superposition};

fn pairing(c: &mut Criterion) {
    c.bench_function("signed_arc_pairing", |b| b.iter(|| black_box(signed_arc_pairing().norm2())));

    let kets = Bounded1Ket::all_matchings(&[0, 1, 2, 3, 4, 5], 1);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let v = Superposition::collect(
        kets.iter().map(|k| (Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5), k.clone())),
    );
    c.bench_function("pair_six_point_matchings", |b| b.iter(|| pair(&MatchingRule, black_box(&v), &v).unwrap()));
}

fn topology(c: &mut Criterion) {
    let t = genus2();
    c.bench_function("surface_code_genus2", |b| b.iter(|| surface_code(black_box(&t), true).unwrap()));
    c.bench_function("regge_deficit_genus2", |b| b.iter(|| regge_deficit_sum(black_box(&t)).unwrap()));
}

fn gap(c: &mut Criterion) {
    let g = build_neighbor_graph(1, Topology::Circles { min: 3, max: 40 }, 200).unwrap();
    c.bench_function("spectral_gap_circles3_40", |b| b.iter(|| spectral_gap(black_box(&g)).unwrap()));
}

fn twofield(c: &mut Criterion) {
    let g = |x: f64| GridWavefunction::gaussian(128, 8.0, x, 1.0, 0.0).unwrap();
    let s = TwoKetState::new(g(1.0), g(1.0)).unwrap().joint();
    let p = TwoFieldParams { lambda: 0.5, dt: 2e-3, steps: 10, stride: 10, ..Default::default() };
    c.bench_function("twofield_10_steps_n128", |b| b.iter(|| evolve_2h(black_box(&s), &p).unwrap()));
}

fn sampler(c: &mut Criterion) {
    let p = ActionParams { g: [1.0; 3], ..Default::default() };
    let cfg = SamplerConfig {
        chains: 1,
        sweeps: 20,
        record_trace: false,
        extender: Extender { max_dimension: 1, mock: None, ..Default::default() },
        ..Default::default()
    };
    c.bench_function("sampler_20_sweeps_d1", |b| b.iter(|| run(black_box(&cfg), &p).unwrap()));
}

criterion_group! {
    name = kernels;
    config = Criterion::default().sample_size(20);
    targets = pairing, topology, gap, twofield, sampler
}
criterion_main!(kernels);
