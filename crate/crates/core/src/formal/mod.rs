//! Collected complex-linear superpositions over arbitrary key types.

pub mod amplitude;
pub mod superposition;

pub use amplitude::{
    exact, parse_rational, rational, rational_from_f64, rational_from_json, Amplitude, Complex64,
    ExactAmplitude, EPS_ZERO,
};
pub use superposition::{CanonicalKey, Superposition};
