//! Numerical search for light-like vectors: unit `v` with `⟨v,v⟩ ≈ 0`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::gluing::PairingRule;
use crate::error::{Error, Result};
use crate::formal::{Complex64, Superposition};

/// Gluing classes of every ordered ket pair, as dense indices.
#[derive(Clone, Debug)]
pub struct GlueTable {
    n: usize,
    classes: usize,
    class_of: Vec<usize>,
}

impl GlueTable {
    pub fn new<R: PairingRule>(rule: &R, kets: &[R::Ket]) -> Result<Self> {
        let mut ids: BTreeMap<R::Closed, usize> = BTreeMap::new();
        let mut class_of = Vec::with_capacity(kets.len() * kets.len());
        for a in kets {
            for b in kets {
                let c = rule.glue(a, b)?;
                let next = ids.len();
                class_of.push(*ids.entry(c).or_insert(next));
            }
        }
        Ok(Self {
            n: kets.len(),
            classes: ids.len(),
            class_of,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    fn sums(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut s = vec![Complex64::new(0.0, 0.0); self.classes];
        for i in 0..self.n {
            for j in 0..self.n {
                s[self.class_of[i * self.n + j]] += v[i] * v[j].conj();
            }
        }
        s
    }

    /// `Σ_c |S_c|²` with `S_c = Σ_{(i,j)∈c} vᵢ·conj(vⱼ)`.
    pub fn residual(&self, v: &[Complex64]) -> f64 {
        self.sums(v).iter().map(|s| s.norm_sqr()).sum()
    }

    /// Derivative of the residual with respect to `conj(v)`.
    pub fn gradient(&self, v: &[Complex64]) -> Vec<Complex64> {
        let s = self.sums(v);
        let mut g = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                let sc = s[self.class_of[i * self.n + j]];
                g[j] += sc.conj() * v[i];
                g[i] += sc * v[j];
            }
        }
        g
    }
}

pub fn residual(table: &GlueTable, v: &[Complex64]) -> f64 {
    table.residual(v)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LightlikeOptions {
    pub restarts: usize,
    pub steps: usize,
    pub step: f64,
}

impl Default for LightlikeOptions {
    fn default() -> Self {
        Self {
            restarts: 200,
            steps: 500,
            step: 0.1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LightlikeReport<K: Ord> {
    pub min_residual: f64,
    pub argmin: Superposition<K>,
    pub amplitudes: Vec<Complex64>,
    pub restart: usize,
}

fn unit(v: &mut [Complex64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
}

/// Gradient descent on the unit sphere; the step grows after each accepted
/// move and shrinks after each rejected one.
fn descend(table: &GlueTable, mut v: Vec<Complex64>, opts: &LightlikeOptions) -> (f64, Vec<Complex64>) {
    unit(&mut v);
    let mut r = table.residual(&v);
    let mut step = opts.step;
    for _ in 0..opts.steps {
        if r < 1e-30 || step < 1e-15 {
            break;
        }
        let g = table.gradient(&v);
        let mut trial: Vec<Complex64> = v.iter().zip(&g).map(|(x, d)| x - d * (2.0 * step)).collect();
        if trial.iter().all(|z| z.norm_sqr() == 0.0) {
            step *= 0.5;
            continue;
        }
        unit(&mut trial);
        let rt = table.residual(&trial);
        if rt < r {
            v = trial;
            r = rt;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    (r, v)
}

/// Fixes the global phase so the largest component is real and positive.
fn fix_phase(v: &mut [Complex64]) {
    if let Some(big) = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
    {
        if big.norm_sqr() > 0.0 {
            let ph = big.conj() / big.norm();
            for z in v.iter_mut() {
                *z *= ph;
            }
        }
    }
}

/// Minimises the residual over unit `v` from `opts.restarts` random starts.
/// Restart `k` draws from stream `k` of the seeded generator.
pub fn lightlike_search<R>(
    rule: &R,
    kets: &[R::Ket],
    opts: &LightlikeOptions,
    seed: u64,
) -> Result<LightlikeReport<R::Ket>>
where
    R: PairingRule + Sync,
    R::Ket: Sync,
{
    if kets.is_empty() {
        return Err(Error::Param("light-like search needs at least one ket".to_string()));
    }
    let table = GlueTable::new(rule, kets)?;
    let runs: Vec<(f64, Vec<Complex64>)> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let v0: Vec<Complex64> = (0..kets.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            descend(&table, v0, opts)
        })
        .collect();
    let (restart, (min_residual, mut amplitudes)) = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.0.total_cmp(&b.0).then(i.cmp(j)))
        .expect("at least one restart");
    fix_phase(&mut amplitudes);
    let argmin = Superposition::collect(amplitudes.iter().copied().zip(kets.iter().cloned()));
    Ok(LightlikeReport {
        min_residual,
        argmin,
        amplitudes,
        restart,
    })
}
