//! Two-particle "molecule" at the 2-level, ket erasure and the finite
//! α∘α∘e identity.

mod alpha;
mod evolve;

pub use alpha::{alpha_erase, evaluation_lift, Level};
pub use evolve::{evolve_2h, Evolver, Potential, Trajectory, TrajectoryRow, TwoFieldParams};

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::formal::Complex64;

/// Ket amplitude of each particle in the two-ket state.
pub const KET_AMPLITUDE: f64 = FRAC_1_SQRT_2;

/// Samples on the periodic grid `x_i = −L + i·dx`, `dx = 2L/N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridWavefunction {
    half_width: f64,
    samples: Vec<Complex64>,
}

impl GridWavefunction {
    pub fn new(half_width: f64, samples: Vec<Complex64>) -> Result<Self> {
        let n = samples.len();
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Param(format!("grid size {n} must be a power of two >= 16")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Param("grid half-width must be positive".to_string()));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Param("wavefunction samples must be finite".to_string()));
        }
        Ok(Self { half_width, samples })
    }

    pub fn from_fn(n: usize, half_width: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let dx = 2.0 * half_width / n as f64;
        Self::new(half_width, (0..n).map(|i| f(-half_width + i as f64 * dx)).collect())
    }

    /// Unit-normalized `exp(−(x−x0)²/(2w²) + i p x)`.
    pub fn gaussian(n: usize, half_width: f64, center: f64, width: f64, momentum: f64) -> Result<Self> {
        let g = Self::from_fn(n, half_width, |x| {
            let u = (x - center) / width;
            Complex64::from_polar((-0.5 * u * u).exp(), momentum * x)
        })?;
        g.normalized()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.samples.len() as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn norm(&self) -> f64 {
        (self.dx() * self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroState);
        }
        self.samples.iter_mut().for_each(|z| *z /= n);
        Ok(self)
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.dx()
    }

    pub fn mean_x(&self) -> f64 {
        let dx = self.dx();
        self.samples.iter().enumerate().map(|(i, z)| self.x(i) * z.norm_sqr()).sum::<f64>() * dx
    }
}

/// `(√2/2)|ψ₁⟩ + (√2/2)|ψ₂⟩`, both kets unit-normalized on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoKetState {
    pub psi1: GridWavefunction,
    pub psi2: GridWavefunction,
}

impl TwoKetState {
    pub fn new(psi1: GridWavefunction, psi2: GridWavefunction) -> Result<Self> {
        if psi1.len() != psi2.len() || psi1.half_width != psi2.half_width {
            return Err(Error::Param("kets must share a grid".to_string()));
        }
        Ok(Self { psi1: psi1.normalized()?, psi2: psi2.normalized()? })
    }

    pub fn amplitudes(&self) -> (f64, f64) {
        (KET_AMPLITUDE, KET_AMPLITUDE)
    }

    /// `Ψ(x₁, x₂) = ψ₁(x₁) ψ₂(x₂)`.
    pub fn joint(&self) -> JointState {
        let n = self.psi1.len();
        let mut data = Vec::with_capacity(n * n);
        for a in &self.psi1.samples {
            for b in &self.psi2.samples {
                data.push(a * b);
            }
        }
        JointState { n, half_width: self.psi1.half_width, data }
    }
}

/// Joint wavefunction, row-major in `(x₁, x₂)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    n: usize,
    half_width: f64,
    data: Vec<Complex64>,
}

impl JointState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn norm(&self) -> f64 {
        let dx = self.dx();
        (dx * dx * self.data.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        let dx = self.dx();
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum::<Complex64>() * dx * dx
    }

    /// `⟨(x₁ + x₂)/2⟩`.
    pub fn com_mean(&self) -> f64 {
        let dx = self.dx();
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += 0.5 * (self.x(i) + self.x(j)) * self.at(i, j).norm_sqr();
            }
        }
        s * dx * dx
    }

    /// Probability density of the centre of mass on the grid `c_k = x_k`,
    /// summed along `x₁ + x₂ = 2c_k`.
    pub fn com_density(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n)
            .map(|k| self.diagonal(k).map(|z| z.norm_sqr()).sum::<f64>() * 2.0 * dx)
            .collect()
    }

    fn diagonal(&self, k: usize) -> impl Iterator<Item = Complex64> + '_ {
        let n = self.n as isize;
        (0..n).filter_map(move |i| {
            let j = 2 * k as isize - i;
            (0..n).contains(&j).then(|| self.data[(i * n + j) as usize])
        })
    }

    /// Unnormalized erased ket `φ(c) = ∫dx₁ Ψ(x₁, 2c − x₁)`.
    pub fn erase_raw(&self) -> Result<GridWavefunction> {
        let dx = self.dx();
        let s = (0..self.n).map(|k| self.diagonal(k).sum::<Complex64>() * dx).collect();
        GridWavefunction::new(self.half_width, s)
    }
}

/// Ket erasure normalized once against the initial state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KetEraser {
    norm0: f64,
}

impl KetEraser {
    pub fn new(initial: &JointState) -> Result<Self> {
        let norm0 = initial.erase_raw()?.norm();
        if !(norm0 > 0.0) {
            return Err(Error::ZeroState);
        }
        Ok(Self { norm0 })
    }

    pub fn norm0(&self) -> f64 {
        self.norm0
    }

    /// The erased wavefunction divided by the initial norm, so its norm
    /// starts at 1 and drifts freely.
    pub fn apply(&self, state: &JointState) -> Result<GridWavefunction> {
        let mut phi = state.erase_raw()?;
        phi.samples.iter_mut().for_each(|z| *z /= self.norm0);
        Ok(phi)
    }
}

/// One-shot erasure of `state` normalized by `initial`.
pub fn ket_erase(state: &JointState, initial: &JointState) -> Result<GridWavefunction> {
    KetEraser::new(initial)?.apply(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rules() {
        assert!(GridWavefunction::from_fn(15, 8.0, |_| Complex64::new(1.0, 0.0)).is_err());
        assert!(GridWavefunction::from_fn(24, 8.0, |_| Complex64::new(1.0, 0.0)).is_err());
        let g = GridWavefunction::gaussian(256, 8.0, 0.5, 1.0, 0.0).unwrap();
        assert!((g.norm() - 1.0).abs() < 1e-12);
        assert!((g.mean_x() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn erasing_identical_gaussians_centres_on_midpoint() {
        let g = GridWavefunction::gaussian(256, 8.0, 1.0, 1.0, 0.0).unwrap();
        let st = TwoKetState::new(g.clone(), g).unwrap().joint();
        let phi = ket_erase(&st, &st).unwrap();
        assert!((phi.norm() - 1.0).abs() < 1e-12);
        // convolution of two unit Gaussians at 1 is a Gaussian of width 1/√2 at 1
        let want = GridWavefunction::gaussian(256, 8.0, 1.0, FRAC_1_SQRT_2, 0.0).unwrap();
        assert!((phi.inner(&want).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_initial_state_is_rejected() {
        let z = GridWavefunction::from_fn(16, 4.0, |_| Complex64::new(0.0, 0.0)).unwrap();
        let st = JointState { n: 16, half_width: 4.0, data: vec![Complex64::new(0.0, 0.0); 256] };
        assert!(matches!(KetEraser::new(&st), Err(Error::ZeroState)));
        assert!(TwoKetState::new(z.clone(), z).is_err());
    }
}
