//! Pairing of a superposition of disks with handles against itself.
//!
//! With `v = Σ cₙ·(disk with n handles)`, gluing handle `i` to handle `j`
//! gives a closed surface of genus `i + j`, so the collected coefficient of
//! genus `g` is `Σ_{i+j=g} cᵢ·conj(cⱼ)`.

use rayon::prelude::*;

use crate::formal::{Amplitude, Complex64};

/// Collected coefficients for genus `0..=g_max`.
pub fn l2_handle_series<A, F>(coefficients: F, g_max: usize) -> Vec<(usize, A)>
where
    A: Amplitude,
    F: Fn(usize) -> A,
{
    let c: Vec<A> = (0..=g_max).map(&coefficients).collect();
    (0..=g_max)
        .map(|g| {
            let s = (0..=g).fold(A::zero(), |acc, i| acc + c[i].clone() * c[g - i].conj());
            (g, s)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesRow {
    pub g: usize,
    pub coefficient: Complex64,
    pub partial_sum_of_squares: f64,
}

/// Floating-point series with running `Σ_{g' ≤ g} |coeff(g')|²`.
pub fn handle_series_report<F>(coefficients: F, g_max: usize) -> Vec<SeriesRow>
where
    F: Fn(usize) -> Complex64,
{
    let c: Vec<Complex64> = (0..=g_max).map(coefficients).collect();
    let coeffs: Vec<Complex64> = (0..=g_max)
        .into_par_iter()
        .map(|g| (0..=g).map(|i| c[i] * c[g - i].conj()).sum())
        .collect();
    let mut acc = 0.0;
    coeffs
        .into_iter()
        .enumerate()
        .map(|(g, coefficient)| {
            acc += coefficient.norm_sqr();
            SeriesRow {
                g,
                coefficient,
                partial_sum_of_squares: acc,
            }
        })
        .collect()
}
