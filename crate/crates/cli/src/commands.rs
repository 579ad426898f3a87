use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use num::{BigRational, Zero};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use chainsim_core::cdt::{grow_layer, mirror_double};
use chainsim_core::chain::{
    build_neighbor_graph, detect_termination, run, spectral_gap, two_arc_cancellation_chain, Extender, Topology,
};
use chainsim_core::formal::{exact, rational, ExactAmplitude};
use chainsim_core::pairing::catalog::fluctuate_to_three;
use chainsim_core::pairing::{
    cauchy_schwarz_check, circle_count_order, handle_series_report, l2_handle_series, lightlike_search,
    signed_arc_family, signed_arc_pairing, two_arc_difference, two_arc_pairing, Bounded1Ket, LightlikeOptions,
    MatchingRule, MockRule,
};
use chainsim_core::topo::builders::{circle, points};
use chainsim_core::topo::classify::{classify_points, classify_surface, count_circles};
use chainsim_core::topo::text::{parse_triangulation, write_triangulation};
use chainsim_core::twofield::{evolve_2h, GridWavefunction, Potential, TwoFieldParams, TwoKetState};
use chainsim_core::pairing;
use chainsim_core::{Complex64, Error, MockEquivalence, RunConfig, SamplerConfig, Superposition, Triangulation};

use crate::{
    CliError, Coefficients, ConfigArgs, Example, GapArgs, GrowArgs, PairArgs, PositivityArgs, SampleArgs,
    SeriesArgs, TwofieldArgs,
};

type Out<T = ()> = Result<T, CliError>;

fn read(path: &Path) -> Out<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn read_json(path: &Path) -> Out<Value> {
    serde_json::from_str(&read(path)?).map_err(|e| {
        CliError::Core(Error::Parse { line: e.line(), msg: format!("{}: {e}", path.display()) })
    })
}

fn print_json(v: &Value) -> Out {
    let s = serde_json::to_string_pretty(v).expect("values serialize");
    println!("{s}");
    Ok(())
}

/// Config file, then `--set` overrides in order.
fn load_config(args: &ConfigArgs) -> Out<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => read(p)?.parse()?,
        None => RunConfig::default(),
    };
    for o in &args.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{o}`")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    Ok(cfg)
}

fn config_json(cfg: &RunConfig) -> Value {
    json!(cfg.values())
}

pub fn pair(a: &PairArgs) -> Out {
    match (a.example, &a.kets) {
        (Some(Example::SignedArcs), _) => {
            let v = signed_arc_family();
            let p = signed_arc_pairing();
            print_json(&json!({
                "example": "signed-arcs",
                "kets": v.to_json(),
                "pairing": p.to_json(),
                "norm2": norm2_f64(&p.norm2()),
                "norm2_exact": p.norm2().to_string(),
            }))
        }
        (Some(Example::TwoArcCancellation), _) => {
            let p = two_arc_pairing()?;
            let fluct = fluctuate_to_three(&p)?;
            let chain = two_arc_cancellation_chain()?;
            let (terminated, d) = detect_termination(&chain);
            print_json(&json!({
                "example": "two-arc-cancellation",
                "kets": two_arc_difference().to_json(),
                "pairing": p.to_json(),
                "norm2_exact": p.norm2().to_string(),
                "after_fluctuation": fluct.to_json(),
                "after_fluctuation_is_zero": fluct.is_zero(),
                "chain": {
                    "fluctuations": chain.fluctuations_at_top(),
                    "terminated": terminated,
                    "termination_dimension": d,
                },
            }))
        }
        (None, Some(path)) => {
            let doc = read_json(path)?;
            match &a.mock {
                None => {
                    let v: Superposition<Bounded1Ket, ExactAmplitude> = Superposition::from_json(&doc, str::parse)?;
                    let p = pairing::pair(&MatchingRule, &v, &v)?;
                    print_json(&json!({
                        "kets": v.to_json(),
                        "pairing": p.to_json(),
                        "norm2": norm2_f64(&p.norm2()),
                        "norm2_exact": p.norm2().to_string(),
                    }))
                }
                Some(mpath) => {
                    let m = MockEquivalence::from_json(&read_json(mpath)?)?;
                    let v: Superposition<String, ExactAmplitude> =
                        Superposition::from_json(&doc, |s| Ok(s.to_string()))?;
                    let p = pairing::pair(&MockRule(&m), &v, &v)?;
                    print_json(&json!({
                        "mock": m.to_json(),
                        "kets": v.to_json(),
                        "pairing": p.to_json(),
                        "norm2": norm2_f64(&p.norm2()),
                        "norm2_exact": p.norm2().to_string(),
                    }))
                }
            }
        }
        (None, None) => Err(CliError::Usage("pair needs --example or --kets".to_string())),
    }
}

fn norm2_f64(r: &BigRational) -> f64 {
    num::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

pub fn series(a: &SeriesArgs) -> Out {
    let stdout = std::io::stdout();
    let mut w = std::io::BufWriter::new(stdout.lock());
    let io = |e| CliError::Io { path: "<stdout>".to_string(), source: e };
    writeln!(w, "g,coefficient,partial_sum_of_squares").map_err(io)?;
    if a.exact {
        let c = |n: usize| match a.coefficients {
            Coefficients::Harmonic => exact(rational(1, n as i64 + 1)),
            Coefficients::Delta if n == 0 => exact(rational(1, 1)),
            Coefficients::Delta => exact(BigRational::zero()),
        };
        let mut acc = BigRational::zero();
        for (g, s) in l2_handle_series(c, a.g_max) {
            acc += s.norm_sqr();
            writeln!(w, "{g},{},{acc}", s.re).map_err(io)?;
        }
    } else {
        let c = |n: usize| match a.coefficients {
            Coefficients::Harmonic => Complex64::new(1.0 / (n as f64 + 1.0), 0.0),
            Coefficients::Delta => Complex64::new(f64::from(u8::from(n == 0)), 0.0),
        };
        for r in handle_series_report(c, a.g_max) {
            writeln!(w, "{},{},{}", r.g, r.coefficient.re, r.partial_sum_of_squares).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

fn class_of(t: &Triangulation) -> Out<String> {
    Ok(match t.dim() {
        0 => classify_points(t)?.to_string(),
        1 => count_circles(t)?.to_string(),
        _ => classify_surface(t)?.to_string(),
    })
}

pub fn grow(a: &GrowArgs) -> Out {
    let cfg = load_config(&a.cfg)?;
    let growth = cfg.growth_config()?;
    let base = match (a.points, a.circle, &a.input) {
        (Some(n), _, _) => points(n, 0),
        (_, Some(n), _) => circle(n),
        (_, _, Some(p)) => parse_triangulation(&read(p)?)?,
        _ => return Err(CliError::Usage("grow needs --points, --circle or --input".to_string())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let x = grow_layer(&base, &growth, &mut rng)?;
    let double = mirror_double(&x)?;
    print_json(&json!({
        "seed": a.seed,
        "config": config_json(&cfg),
        "chi_lower": base.euler_characteristic(),
        "chi_x": x.triangulation().euler_characteristic(),
        "lower_class": class_of(&base)?,
        "double_class": class_of(&double)?,
        "chi_double": double.euler_characteristic(),
        "cobordism": write_triangulation(x.triangulation()),
        "double": write_triangulation(&double),
    }))
}

fn sampler_config(a: &SampleArgs, cfg: &RunConfig) -> Out<SamplerConfig> {
    let seed = a
        .seed
        .or(cfg.parsed::<u64>("seed")?)
        .ok_or_else(|| CliError::Usage("sample needs --seed (or `seed` in the config)".to_string()))?;
    let mut s = SamplerConfig { seed, ..Default::default() };
    s.chains = a.chains.or(cfg.parsed("chains")?).unwrap_or(s.chains);
    s.sweeps = a.sweeps.or(cfg.parsed("sweeps")?).unwrap_or(s.sweeps);
    s.moves_per_sweep = a.moves_per_sweep.or(cfg.parsed("moves_per_sweep")?).unwrap_or(s.moves_per_sweep);
    s.beta = cfg.parsed("beta")?.unwrap_or(s.beta);
    s.fluct_cap = cfg.parsed("fluct_cap")?.unwrap_or(s.fluct_cap);
    s.extender = Extender {
        growth: cfg.growth_config()?,
        max_dimension: cfg.parsed("max_dimension")?.unwrap_or(2),
        ..Default::default()
    };
    if a.no_mock {
        s.extender.mock = None;
    }
    s.validate()?;
    Ok(s)
}

pub fn sample(a: &SampleArgs) -> Out {
    let cfg = load_config(&a.cfg)?;
    let p = cfg.action_params()?;
    let mut s = sampler_config(a, &cfg)?;
    s.record_trace = a.trace.is_some();
    let stats = run(&s, &p)?;
    if let Some(path) = &a.trace {
        let io = |e| CliError::Io { path: path.display().to_string(), source: e };
        let mut w = std::io::BufWriter::new(fs::File::create(path).map_err(io)?);
        writeln!(w, "sweep,chain_id,S_total,S_curv,S_vol,S_kin,terminated_d").map_err(io)?;
        for r in &stats.trace {
            let td = r.terminated_d.map_or_else(String::new, |d| d.to_string());
            writeln!(w, "{},{},{},{},{},{},{td}", r.sweep, r.chain_id, r.s_total, r.s_curv, r.s_vol, r.s_kin)
                .map_err(io)?;
        }
        w.flush().map_err(io)?;
    }
    print_json(&json!({
        "seed": s.seed,
        "config": config_json(&cfg),
        "sampler": {
            "chains": s.chains,
            "sweeps": s.sweeps,
            "moves_per_sweep": s.moves_per_sweep,
            "beta": s.beta,
            "fluct_cap": s.fluct_cap,
            "max_dimension": s.extender.max_dimension,
            "mock": s.extender.mock.is_some(),
        },
        "stats": serde_json::to_value(&stats).expect("stats serialize"),
    }))
}

/// Second smallest eigenvalue of the dense Laplacian.
fn dense_gap(n: usize, m: Vec<f64>) -> f64 {
    let mut ev: Vec<f64> = SymmetricEigen::new(DMatrix::from_row_slice(n, n, &m)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.get(1).copied().unwrap_or(0.0).max(0.0)
}

pub fn gap(a: &GapArgs) -> Out {
    let t: Topology = a.graph.parse()?;
    let g = build_neighbor_graph(t.dim().unwrap_or(0), t, a.cap)?;
    let r = spectral_gap(&g)?;
    let oracle = dense_gap(g.len(), g.laplacian_dense());
    let out = json!({
        "graph": t.to_string(),
        "vertices": g.len(),
        "edges": g.edges.len(),
        "truncated": g.truncated,
        "gap": r.gap,
        "oracle": oracle,
        "disconnected": r.disconnected,
        "iterations": r.iterations,
        "residual": r.residual,
    });
    print_json(&out)?;
    let diff = (r.gap - oracle).abs();
    if diff > 1e-6 {
        return Err(CliError::Numeric(format!("iterative gap {} vs dense {oracle}", r.gap)));
    }
    Ok(())
}

pub fn twofield(a: &TwofieldArgs) -> Out {
    let half = 0.5 * a.separation;
    let g = |c: f64| GridWavefunction::gaussian(a.grid, a.half_width, c, 1.0, 0.0);
    let state = TwoKetState::new(g(a.center + half)?, g(a.center - half)?)?.joint();
    let p = TwoFieldParams {
        lambda: a.lambda,
        potential: Potential::GaussianWell { depth: a.depth, width: a.width },
        dt: a.dt,
        steps: a.steps,
        stride: a.stride,
    };
    let traj = evolve_2h(&state, &p).map_err(|e| match e {
        Error::Integrator(m) => CliError::Numeric(m),
        e => e.into(),
    })?;
    let stdout = std::io::stdout();
    let mut w = std::io::BufWriter::new(stdout.lock());
    let io = |e| CliError::Io { path: "<stdout>".to_string(), source: e };
    writeln!(
        w,
        "# lambda={} steps={} dt={} grid={} half_width={} center={} separation={} depth={} width={}",
        a.lambda, a.steps, a.dt, a.grid, a.half_width, a.center, a.separation, a.depth, a.width
    )
    .map_err(io)?;
    writeln!(w, "t,joint_norm,phi_norm,com_x").map_err(io)?;
    for r in &traj.rows {
        writeln!(w, "{},{},{},{}", r.t, r.joint_norm, r.phi_norm, r.com_x).map_err(io)?;
    }
    w.flush().map_err(io)?;
    eprintln!(
        "phi_drift={:e} joint_drift_rate={:e}",
        traj.phi_drift(),
        traj.joint_drift_rate()
    );
    Ok(())
}

pub fn positivity(a: &PositivityArgs) -> Out {
    if a.points % 2 != 0 || a.points > 6 {
        return Err(CliError::Usage("--points must be even and at most 6".to_string()));
    }
    let labels: Vec<u32> = (0..a.points).collect();
    let circle_free = Bounded1Ket::all_matchings(&labels, 0);
    let cs_free = cauchy_schwarz_check(&MatchingRule, &circle_free, circle_count_order)?;
    let all: Vec<Bounded1Ket> = (0..=a.free).flat_map(|f| Bounded1Ket::all_matchings(&labels, f)).collect();
    let cs_all = cauchy_schwarz_check(&MatchingRule, &all, circle_count_order)?;
    let opts = LightlikeOptions { restarts: a.restarts, steps: a.steps, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut families = Vec::new();
    let mut worst = f64::INFINITY;
    for f in 0..a.families {
        let k = rng.random_range(1..=a.max_kets.min(all.len()).max(1));
        let mut idx = index::sample(&mut rng, all.len(), k).into_vec();
        idx.sort_unstable();
        let kets: Vec<Bounded1Ket> = idx.iter().map(|&i| all[i].clone()).collect();
        let rep = lightlike_search(&MatchingRule, &kets, &opts, a.seed.wrapping_add(f as u64))?;
        worst = worst.min(rep.min_residual);
        families.push(json!({
            "kets": kets.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "min_residual": rep.min_residual,
        }));
    }
    let mock = match a.mock.as_deref() {
        None => None,
        Some(which) => {
            let m = if which == "mazur" { MockEquivalence::mazur() } else { MockEquivalence::from_json(&read_json(Path::new(which))?)? };
            let kets: Vec<String> = m.kets().cloned().collect();
            let rep = lightlike_search(&MockRule(&m), &kets, &opts, a.seed)?;
            let amps: BTreeMap<&String, Value> =
                kets.iter().zip(&rep.amplitudes).map(|(k, z)| (k, json!([z.re, z.im]))).collect();
            Some(json!({ "kets": kets, "min_residual": rep.min_residual, "argmin": amps }))
        }
    };
    print_json(&json!({
        "seed": a.seed,
        "points": a.points,
        "free": a.free,
        "floor": a.floor,
        "cauchy_schwarz": {
            "circle_free_kets": circle_free.len(),
            "circle_free_violations": cs_free.len(),
            "kets": all.len(),
            "violations": cs_all.len(),
        },
        "families": families,
        "min_family_residual": worst,
        "mock": mock,
    }))?;
    if !cs_free.is_empty() {
        return Err(CliError::Numeric(format!("{} Cauchy-Schwarz violations among circle-free kets", cs_free.len())));
    }
    if a.families > 0 && worst <= a.floor {
        return Err(CliError::Numeric(format!("family residual {worst} at or below {}", a.floor)));
    }
    Ok(())
}
