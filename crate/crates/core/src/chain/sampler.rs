//! Metropolis–Hastings over formal chains.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::build::{extend, fluctuate, fluctuation_count, reweight, Extender};
use super::{detect_termination, total_action, FormalChain, Link, SiteKind, MOCK_DIM};
use crate::action::{ActionBreakdown, ActionParams};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MoveWeights {
    /// Split evenly between extend and retract.
    pub extend: f64,
    /// Split evenly between fluctuate and unfluctuate.
    pub fluctuate: f64,
    pub reweight: f64,
}

impl Default for MoveWeights {
    fn default() -> Self {
        Self {
            extend: 0.4,
            fluctuate: 0.4,
            reweight: 0.2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum MoveKind {
    Extend,
    Retract,
    Fluctuate,
    Unfluctuate,
    Reweight,
}

impl MoveKind {
    pub const ALL: [MoveKind; 5] = [
        MoveKind::Extend,
        MoveKind::Retract,
        MoveKind::Fluctuate,
        MoveKind::Unfluctuate,
        MoveKind::Reweight,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Extend => "extend",
            Self::Retract => "retract",
            Self::Fluctuate => "fluctuate",
            Self::Unfluctuate => "unfluctuate",
            Self::Reweight => "reweight",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub seed: u64,
    pub chains: usize,
    pub sweeps: usize,
    pub moves_per_sweep: usize,
    /// Inverse temperature multiplying the action difference.
    pub beta: f64,
    pub weights: MoveWeights,
    /// Most fluctuations stacked on one doubled site.
    pub fluct_cap: usize,
    pub extender: Extender,
    pub record_trace: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            chains: 8,
            sweeps: 100,
            moves_per_sweep: 10,
            beta: 1.0,
            weights: MoveWeights::default(),
            fluct_cap: 8,
            extender: Extender::default(),
            record_trace: true,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let w = self.weights;
        if [w.extend, w.fluctuate, w.reweight].iter().any(|&x| !(x >= 0.0 && x.is_finite()))
            || !(w.extend + w.fluctuate + w.reweight > 0.0)
        {
            return Err(Error::Param("move weights must be nonnegative with a positive sum".to_string()));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::Param("beta must be finite and nonnegative".to_string()));
        }
        if !(0..=2).contains(&self.extender.max_dimension) {
            return Err(Error::Param("max_dimension must be 0, 1 or 2".to_string()));
        }
        self.extender.growth.validate()
    }
}

/// A proposal together with `ln q(reverse) − ln q(forward)`.
fn propose<R: Rng + ?Sized>(
    chain: &FormalChain,
    kind: MoveKind,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<(FormalChain, f64)> {
    let ext = &cfg.extender;
    match kind {
        MoveKind::Extend => {
            let n = ext.choices(chain);
            let c = rng.random_range(0..n);
            Ok((extend(chain, ext, c)?, (n as f64).ln()))
        }
        MoveKind::Retract => {
            if chain.last_link() != Some(Link::Double) {
                return Err(Error::Move("retract needs a freshly doubled site".to_string()));
            }
            let mut out = chain.clone();
            out.pop();
            out.pop();
            let n = ext.choices(&out);
            Ok((out, -(n as f64).ln()))
        }
        MoveKind::Fluctuate => {
            let last = chain.last();
            if last.kind != SiteKind::Euclidean || !(1..=2).contains(&last.d) || last.d == MOCK_DIM {
                return Err(Error::Move("nothing to fluctuate".to_string()));
            }
            if chain.fluctuations_at_top() >= cfg.fluct_cap || last.state.is_zero() {
                return Err(Error::Move("fluctuation cap reached".to_string()));
            }
            let terms = last.state.len();
            let t = rng.random_range(0..terms);
            let key = last.state.keys().nth(t).expect("term exists");
            let moves = fluctuation_count(key);
            if moves == 0 {
                return Err(Error::Move(format!("{key} has no fluctuations")));
            }
            let c = rng.random_range(0..moves);
            let choices = terms * moves;
            Ok((fluctuate(chain, t, c, choices)?, (choices as f64).ln()))
        }
        MoveKind::Unfluctuate => {
            if chain.last_link() != Some(Link::Fluctuate) {
                return Err(Error::Move("last link is not a fluctuation".to_string()));
            }
            let choices = chain.last().fluctuation.expect("record").choices;
            let mut out = chain.clone();
            out.pop();
            Ok((out, -(choices as f64).ln()))
        }
        MoveKind::Reweight => {
            if chain.last_link() != Some(Link::Double) {
                return Err(Error::Move("reweight needs a freshly doubled site".to_string()));
            }
            let x = &chain.sites()[chain.sites().len() - 2];
            let t = rng.random_range(0..x.state.len().max(1));
            Ok((reweight(chain, t, ext.mock.as_ref())?, 0.0))
        }
    }
}

fn pick_kind<R: Rng + ?Sized>(w: &MoveWeights, rng: &mut R) -> MoveKind {
    let total = w.extend + w.fluctuate + w.reweight;
    let u = rng.random::<f64>() * total;
    let half = rng.random_bool(0.5);
    if u < w.extend {
        if half { MoveKind::Extend } else { MoveKind::Retract }
    } else if u < w.extend + w.fluctuate {
        if half { MoveKind::Fluctuate } else { MoveKind::Unfluctuate }
    } else {
        MoveKind::Reweight
    }
}

/// A chain with its cached action.
#[derive(Clone, Debug)]
pub struct Walker {
    pub chain: FormalChain,
    pub action: ActionBreakdown,
}

impl Walker {
    pub fn new(chain: FormalChain, p: &ActionParams) -> Result<Self> {
        let action = total_action(&chain, p)?;
        Ok(Self { chain, action })
    }

    /// One proposal; returns its kind and whether it was accepted. Failed
    /// proposals count as rejections.
    pub fn step<R: Rng + ?Sized>(&mut self, p: &ActionParams, cfg: &SamplerConfig, rng: &mut R) -> (MoveKind, bool) {
        let kind = pick_kind(&cfg.weights, rng);
        let Ok((next, log_h)) = propose(&self.chain, kind, cfg, rng) else {
            return (kind, false);
        };
        let Ok(a) = total_action(&next, p) else {
            return (kind, false);
        };
        if !a.total.is_finite() {
            return (kind, false);
        }
        let log_ratio = -cfg.beta * (a.total - self.action.total) + log_h;
        let accept = log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio;
        if accept {
            self.chain = next;
            self.action = a;
        }
        (kind, accept)
    }
}

/// One Metropolis–Hastings step on a bare chain.
pub fn step<R: Rng + ?Sized>(chain: &FormalChain, p: &ActionParams, cfg: &SamplerConfig, rng: &mut R) -> Result<FormalChain> {
    let mut w = Walker::new(chain.clone(), p)?;
    w.step(p, cfg, rng);
    Ok(w.chain)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub sweep: usize,
    pub chain_id: usize,
    pub s_total: f64,
    pub s_curv: f64,
    pub s_vol: f64,
    pub s_kin: f64,
    pub terminated_d: Option<i32>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MoveCount {
    pub proposed: u64,
    pub accepted: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ChainStats {
    pub chains: usize,
    pub sweeps: usize,
    /// Final state of each chain: termination dimension or `none`.
    pub termination_histogram: BTreeMap<String, u64>,
    /// Same labels, counted over every (chain, sweep) sample.
    pub occupancy: BTreeMap<String, u64>,
    /// Mean `|Y^d|²` of the last Y site of each dimension over final chains.
    pub mean_norm2: BTreeMap<String, f64>,
    pub acceptance: BTreeMap<String, MoveCount>,
    pub mean_final_action: f64,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

impl ChainStats {
    /// Fraction of (chain, sweep) samples terminated at dimension `d`.
    pub fn occupancy_fraction(&self, d: i32) -> f64 {
        let total: u64 = self.occupancy.values().sum();
        if total == 0 {
            return 0.0;
        }
        *self.occupancy.get(&d.to_string()).unwrap_or(&0) as f64 / total as f64
    }
}

fn term_label(t: Option<i32>) -> String {
    t.map_or_else(|| "none".to_string(), |d| d.to_string())
}

struct ChainRun {
    last: Walker,
    occupancy: BTreeMap<String, u64>,
    counts: BTreeMap<MoveKind, MoveCount>,
    trace: Vec<TraceRow>,
}

fn run_chain(id: usize, cfg: &SamplerConfig, p: &ActionParams) -> Result<ChainRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(id as u64);
    let mut w = Walker::new(FormalChain::new(), p)?;
    let mut occupancy = BTreeMap::new();
    let mut counts: BTreeMap<MoveKind, MoveCount> = BTreeMap::new();
    let mut trace = Vec::new();
    for sweep in 0..cfg.sweeps {
        for _ in 0..cfg.moves_per_sweep {
            let (k, ok) = w.step(p, cfg, &mut rng);
            let c = counts.entry(k).or_default();
            c.proposed += 1;
            c.accepted += u64::from(ok);
        }
        let (_, td) = detect_termination(&w.chain);
        *occupancy.entry(term_label(td)).or_insert(0) += 1;
        if cfg.record_trace {
            let a = &w.action;
            trace.push(TraceRow {
                sweep,
                chain_id: id,
                s_total: a.total,
                s_curv: a.curvature + a.cosmological,
                s_vol: a.volume,
                s_kin: a.kinetic,
                terminated_d: td,
            });
        }
    }
    Ok(ChainRun { last: w, occupancy, counts, trace })
}

/// Runs `cfg.chains` independent chains from the empty set; chain `i` uses
/// stream `i` of the seeded generator. Zero sweeps give empty statistics.
pub fn run(cfg: &SamplerConfig, p: &ActionParams) -> Result<ChainStats> {
    cfg.validate()?;
    p.validate()?;
    let mut stats = ChainStats {
        chains: cfg.chains,
        sweeps: cfg.sweeps,
        ..Default::default()
    };
    if cfg.sweeps == 0 || cfg.chains == 0 {
        return Ok(stats);
    }
    let runs = (0..cfg.chains)
        .into_par_iter()
        .map(|i| run_chain(i, cfg, p))
        .collect::<Result<Vec<_>>>()?;
    let mut norm_sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    let mut action_sum = 0.0;
    for r in runs {
        let (_, td) = detect_termination(&r.last.chain);
        *stats.termination_histogram.entry(term_label(td)).or_insert(0) += 1;
        for (k, v) in r.occupancy {
            *stats.occupancy.entry(k).or_insert(0) += v;
        }
        for (k, c) in r.counts {
            let e = stats.acceptance.entry(k.as_str().to_string()).or_default();
            e.proposed += c.proposed;
            e.accepted += c.accepted;
        }
        let mut last_y: BTreeMap<i32, f64> = BTreeMap::new();
        for s in r.last.chain.sites() {
            if s.kind == SiteKind::Euclidean && s.d >= 0 {
                last_y.insert(s.d, s.state.norm2());
            }
        }
        for (d, n) in last_y {
            let e = norm_sums.entry(d.to_string()).or_insert((0.0, 0));
            e.0 += n;
            e.1 += 1;
        }
        action_sum += r.last.action.total;
        stats.trace.extend(r.trace);
    }
    stats.mean_norm2 = norm_sums.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect();
    stats.mean_final_action = action_sum / cfg.chains as f64;
    Ok(stats)
}

/// Three one-step chains `∅ → X⁰ → Y⁰` with 1, 2, 3 points.
pub fn toy_chain_space(ext: &Extender) -> Result<Vec<FormalChain>> {
    let toy = Extender { x0_max_points: 3, ..ext.clone() };
    (0..3).map(|c| extend(&FormalChain::new(), &toy, c)).collect()
}

/// Metropolis on a finite state space with uniform proposals among the other
/// states; returns visit counts after each sweep, starting from state 0.
pub fn sample_discrete(actions: &[f64], sweeps: usize, seed: u64) -> Vec<u64> {
    let n = actions.len();
    let mut counts = vec![0u64; n];
    if n == 0 {
        return counts;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = 0usize;
    for _ in 0..sweeps {
        if n > 1 {
            let mut j = rng.random_range(0..n - 1);
            if j >= s {
                j += 1;
            }
            let d = actions[j] - actions[s];
            if d <= 0.0 || rng.random::<f64>() < (-d).exp() {
                s = j;
            }
        }
        counts[s] += 1;
    }
    counts
}
