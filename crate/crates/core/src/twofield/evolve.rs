//! Strang split-step evolution of the joint two-coordinate wavefunction.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use super::{JointState, KetEraser};
use crate::error::{Error, Result};
use crate::formal::Complex64;

/// Interaction `V(x₁ − x₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Potential {
    Zero,
    /// `−depth·exp(−r²/(2 width²))`.
    GaussianWell { depth: f64, width: f64 },
}

impl Potential {
    pub fn at(self, r: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::GaussianWell { depth, width } => -depth * (-0.5 * (r / width).powi(2)).exp(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoFieldParams {
    pub lambda: f64,
    pub potential: Potential,
    pub dt: f64,
    pub steps: usize,
    /// Record a trajectory row every `stride` steps.
    pub stride: usize,
}

impl Default for TwoFieldParams {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            potential: Potential::GaussianWell { depth: 0.0, width: 1.0 },
            dt: 1e-3,
            steps: 1000,
            stride: 100,
        }
    }
}

impl TwoFieldParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Param("lambda must be finite and nonnegative".to_string()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Param("dt must be positive".to_string()));
        }
        if self.stride == 0 {
            return Err(Error::Param("stride must be positive".to_string()));
        }
        if let Potential::GaussianWell { depth, width } = self.potential {
            if !depth.is_finite() || !(width > 0.0 && width.is_finite()) {
                return Err(Error::Param("well needs finite depth and positive width".to_string()));
            }
        }
        Ok(())
    }

    /// `x²/2 + λx⁴/4!` per coordinate.
    pub fn single_potential(&self, x: f64) -> f64 {
        0.5 * x * x + self.lambda / 24.0 * x.powi(4)
    }
}

/// Precomputed phases and FFT plans for one grid and parameter set.
pub struct Evolver {
    n: usize,
    half_v: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
}

impl Evolver {
    pub fn new(state: &JointState, p: &TwoFieldParams) -> Result<Self> {
        p.validate()?;
        let n = state.n();
        let dx = state.dx();
        let mut half_v = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let (x1, x2) = (state.x(i), state.x(j));
                let u = p.potential.at(x1 - x2) + p.single_potential(x1) + p.single_potential(x2);
                half_v.push(Complex64::from_polar(1.0, -0.5 * p.dt * u));
            }
        }
        let dk = 2.0 * PI / (n as f64 * dx);
        let k: Vec<f64> = (0..n)
            .map(|j| if j < n / 2 { j as f64 } else { j as f64 - n as f64 } * dk)
            .collect();
        let scale = 1.0 / (n * n) as f64;
        let mut kinetic = Vec::with_capacity(n * n);
        for a in &k {
            for b in &k {
                kinetic.push(Complex64::from_polar(scale, -0.5 * p.dt * (a * a + b * b)));
            }
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            half_v,
            kinetic,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            buf: vec![Complex64::new(0.0, 0.0); n * n],
        })
    }

    fn rows(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        let scratch_len = fft.get_inplace_scratch_len();
        data.par_chunks_mut(self.n).for_each_init(
            || vec![Complex64::new(0.0, 0.0); scratch_len],
            |scratch, row| fft.process_with_scratch(row, scratch),
        );
    }

    fn transpose(n: usize, src: &[Complex64], dst: &mut [Complex64]) {
        const B: usize = 32;
        for ib in (0..n).step_by(B) {
            for jb in (0..n).step_by(B) {
                for i in ib..(ib + B).min(n) {
                    for j in jb..(jb + B).min(n) {
                        dst[j * n + i] = src[i * n + j];
                    }
                }
            }
        }
    }

    /// One step `e^{−iVdt/2} e^{−iTdt} e^{−iVdt/2}`.
    pub fn step(&mut self, state: &mut JointState) {
        let n = self.n;
        let data = state.data_mut();
        data.par_iter_mut().zip(&self.half_v).for_each(|(z, v)| *z *= v);
        self.rows(&self.fwd, data);
        Self::transpose(n, data, &mut self.buf);
        let mut buf = std::mem::take(&mut self.buf);
        self.rows(&self.fwd, &mut buf);
        // the kinetic phase is symmetric in (k₁, k₂), so the transposed layout is fine
        buf.par_iter_mut().zip(&self.kinetic).for_each(|(z, k)| *z *= k);
        self.rows(&self.inv, &mut buf);
        Self::transpose(n, &buf, data);
        self.buf = buf;
        self.rows(&self.inv, data);
        data.par_iter_mut().zip(&self.half_v).for_each(|(z, v)| *z *= v);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub joint_norm: f64,
    pub phi_norm: f64,
    pub com_x: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
    pub final_state: JointState,
}

impl Trajectory {
    /// `max_t |‖φ(t)‖ − ‖φ(0)‖|`.
    pub fn phi_drift(&self) -> f64 {
        let first = self.rows.first().map_or(0.0, |r| r.phi_norm);
        self.rows.iter().map(|r| (r.phi_norm - first).abs()).fold(0.0, f64::max)
    }

    /// Largest joint-norm deviation from 1, per unit time.
    pub fn joint_drift_rate(&self) -> f64 {
        let t_end = self.rows.last().map_or(0.0, |r| r.t).max(1.0);
        self.rows.iter().map(|r| (r.joint_norm - 1.0).abs()).fold(0.0, f64::max) / t_end
    }
}

/// Evolves `state` (normalized first) for `p.steps` steps, recording every
/// `p.stride` steps and at the end.
pub fn evolve_2h(state: &JointState, p: &TwoFieldParams) -> Result<Trajectory> {
    let n0 = state.norm();
    if n0 == 0.0 {
        return Err(Error::ZeroState);
    }
    let mut psi = state.clone();
    psi.data_mut().iter_mut().for_each(|z| *z /= n0);
    let eraser = KetEraser::new(&psi)?;
    let mut evolver = Evolver::new(&psi, p)?;
    let row = |psi: &JointState, step: usize| -> Result<TrajectoryRow> {
        Ok(TrajectoryRow {
            t: step as f64 * p.dt,
            joint_norm: psi.norm(),
            phi_norm: eraser.apply(psi)?.norm(),
            com_x: psi.com_mean(),
        })
    };
    let mut rows = vec![row(&psi, 0)?];
    for s in 1..=p.steps {
        evolver.step(&mut psi);
        if s % p.stride == 0 || s == p.steps {
            let r = row(&psi, s)?;
            let drift = (r.joint_norm - 1.0).abs();
            if !(drift <= 1e-6) {
                return Err(Error::Integrator(format!("joint norm drifted by {drift:e} at t = {}", r.t)));
            }
            rows.push(r);
        }
    }
    Ok(Trajectory { rows, final_state: psi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twofield::{GridWavefunction, TwoKetState};

    fn pair(n: usize, a: f64, b: f64) -> JointState {
        let g1 = GridWavefunction::gaussian(n, 8.0, a, 1.0, 0.0).unwrap();
        let g2 = GridWavefunction::gaussian(n, 8.0, b, 1.0, 0.0).unwrap();
        TwoKetState::new(g1, g2).unwrap().joint()
    }

    #[test]
    fn zero_steps_is_identity() {
        let s = pair(64, 1.0, -1.0);
        let p = TwoFieldParams { steps: 0, ..Default::default() };
        let t = evolve_2h(&s, &p).unwrap();
        assert_eq!(t.rows.len(), 1);
        let diff: f64 = t.final_state.data().iter().zip(s.data()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-14);
    }

    #[test]
    fn coherent_states_return_after_one_period() {
        let s = pair(128, 1.5, -0.5);
        let steps = 2000;
        let p = TwoFieldParams {
            potential: Potential::Zero,
            dt: 2.0 * PI / steps as f64,
            steps,
            stride: 500,
            ..Default::default()
        };
        let t = evolve_2h(&s, &p).unwrap();
        let fid = s.inner(&t.final_state).norm_sqr();
        assert!(fid > 1.0 - 1e-6, "fidelity {fid}");
        assert!(t.joint_drift_rate() < 1e-10);
        // centre of mass of a coherent state swings to −⟨x⟩ at half period
        let half = &t.rows[2];
        assert!((half.com_x + 0.5).abs() < 1e-6, "{}", half.com_x);
    }

    #[test]
    fn rejects_bad_params() {
        let s = pair(16, 0.0, 0.0);
        assert!(Evolver::new(&s, &TwoFieldParams { dt: 0.0, ..Default::default() }).is_err());
        assert!(Evolver::new(&s, &TwoFieldParams { lambda: -1.0, ..Default::default() }).is_err());
    }
}
