use chainsim_core::action::ActionParams;
use chainsim_core::chain::{
    build_neighbor_graph, detect_termination, run, sample_discrete, spectral_gap, toy_chain_space, total_action,
    Extender, FormalChain, NeighborGraph, SamplerConfig, Topology, Walker,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params() -> ActionParams {
    ActionParams { g: [1.0; 3], g_mock: 1.0, ..Default::default() }
}

#[test]
fn every_visited_chain_is_valid() {
    let cfg = SamplerConfig::default();
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut w = Walker::new(FormalChain::new(), &p).unwrap();
    let mut deepest = -1;
    for _ in 0..3000 {
        let (_, ok) = w.step(&p, &cfg, &mut rng);
        if ok {
            w.chain.validate().unwrap();
            let (t, d) = detect_termination(&w.chain);
            assert_eq!(t, w.chain.last().state.norm2() <= 1e-24);
            assert_eq!(t, d.is_some());
            deepest = deepest.max(w.chain.dimension());
        }
    }
    assert!(deepest >= 1, "sampler never left dimension {deepest}");
}

#[test]
fn stats_are_bit_identical_per_seed() {
    let cfg = SamplerConfig { seed: 11, chains: 4, sweeps: 40, ..Default::default() };
    let a = run(&cfg, &params()).unwrap();
    let b = run(&cfg, &params()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.termination_histogram.values().sum::<u64>(), 4);
    let other = run(&SamplerConfig { seed: 12, ..cfg }, &params()).unwrap();
    assert_ne!(a.trace, other.trace);
}

#[test]
fn toy_space_matches_gibbs_weights() {
    let p = ActionParams { lambda: [0.25, 0.0, 0.0], g: [1.0; 3], ..Default::default() };
    let s: Vec<f64> = toy_chain_space(&Extender::default())
        .unwrap()
        .iter()
        .map(|c| total_action(c, &p).unwrap().total)
        .collect();
    let z: f64 = s.iter().map(|x| (-x).exp()).sum();
    let n = 100_000;
    let counts = sample_discrete(&s, n, 1);
    for (k, &c) in counts.iter().enumerate() {
        let want = n as f64 * (-s[k]).exp() / z;
        assert!((c as f64 - want).abs() < 5.0 * want.sqrt() * 3.0, "state {k}: {c} vs {want}");
    }
}

#[test]
fn larger_volume_weight_prefers_smaller_norm() {
    // a chain that stops at Y⁰ against one that continues to Y¹ with |Y¹|² = 3/2
    let ext = Extender { mock: None, ..Default::default() };
    let c0 = chainsim_core::chain::extend(&FormalChain::new(), &ext, 0).unwrap();
    let c1 = chainsim_core::chain::extend(&c0, &ext, 0).unwrap();
    let s = |g: f64, ch: &FormalChain| {
        total_action(ch, &ActionParams { g: [g; 3], f: [0.0; 3], ..Default::default() }).unwrap().total
    };
    assert!(s(100.0, &c0) < s(100.0, &c1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn action_grows_with_lambda(l0 in 0.0f64..2.0, l1 in 0.0f64..2.0, dl in 0.0f64..1.0, d in 0usize..2) {
        let ext = Extender { mock: None, ..Default::default() };
        let c0 = chainsim_core::chain::extend(&FormalChain::new(), &ext, 1).unwrap();
        let ch = chainsim_core::chain::extend(&c0, &ext, 0).unwrap();
        let p = ActionParams { lambda: [l0, l1, 0.0], ..Default::default() };
        let mut q = p.clone();
        q.lambda[d] += dl;
        prop_assert!(total_action(&ch, &q).unwrap().total >= total_action(&ch, &p).unwrap().total);
    }

    #[test]
    fn gap_vanishes_exactly_on_disconnected_graphs(
        n in 2usize..12,
        edges in prop::collection::vec((0usize..12, 0usize..12), 0..30),
    ) {
        let edges: Vec<_> = edges.into_iter().filter(|&(i, j)| i < n && j < n && i != j).map(|(i, j)| (i, j, 1.0)).collect();
        let g = NeighborGraph::new((0..n).map(|i| i.to_string()).collect(), edges).unwrap();
        let r = spectral_gap(&g).unwrap();
        prop_assert_eq!(r.disconnected, g.components() > 1);
        prop_assert_eq!(r.gap == 0.0, g.components() > 1);
        prop_assert!(r.gap >= 0.0);
    }
}

#[test]
fn sphere_graph_links_four_and_five_vertex_spheres() {
    let g = build_neighbor_graph(2, Topology::Sphere { max_vertices: 6 }, 500).unwrap();
    let v4 = g.labels.iter().position(|l| l.starts_with("v4:")).unwrap();
    let v5 = g.labels.iter().position(|l| l.starts_with("v5:")).unwrap();
    assert!(g.edges.iter().any(|&(i, j, _)| (i, j) == (v4.min(v5), v4.max(v5))));
}
