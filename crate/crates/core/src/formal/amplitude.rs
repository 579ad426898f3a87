//! Numeric modes for superposition amplitudes.
//!
//! Two modes share one interface: exact complex rationals, used wherever the
//! inputs are rational and cancellation must be exact, and `Complex64` for
//! everything driven by search or sampling.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::{BigRational, Complex, One, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;
pub type ExactAmplitude = Complex<BigRational>;

/// Collected terms whose amplitude magnitude is at most this are dropped.
pub const EPS_ZERO: f64 = 1e-12;

pub trait Amplitude:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    type Real: Clone + PartialOrd + Debug + Zero + Add<Output = Self::Real> + Send + Sync;

    fn conj(&self) -> Self;
    fn norm_sqr(&self) -> Self::Real;
    /// True when the amplitude should not be stored after collection.
    fn is_negligible(&self) -> bool;
    fn to_complex64(&self) -> Complex64;
    fn real_to_f64(r: &Self::Real) -> f64;
    fn from_real(r: Self::Real) -> Self;
    /// `(re, im)` as JSON values; exact amplitudes render as fraction strings.
    fn json_parts(&self) -> (Value, Value);
    fn real_json(r: &Self::Real) -> Value;
    fn from_json_parts(re: &Value, im: &Value) -> Result<Self>;
}

impl Amplitude for Complex64 {
    type Real = f64;

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn norm_sqr(&self) -> f64 {
        Complex::norm_sqr(self)
    }

    fn is_negligible(&self) -> bool {
        self.norm() <= EPS_ZERO
    }

    fn to_complex64(&self) -> Complex64 {
        *self
    }

    fn real_to_f64(r: &f64) -> f64 {
        *r
    }

    fn from_real(r: f64) -> Self {
        Complex64::new(r, 0.0)
    }

    fn json_parts(&self) -> (Value, Value) {
        (float_json(self.re), float_json(self.im))
    }

    fn real_json(r: &f64) -> Value {
        float_json(*r)
    }

    fn from_json_parts(re: &Value, im: &Value) -> Result<Self> {
        let re = rational_from_json(re)?;
        let im = rational_from_json(im)?;
        Ok(Complex64::new(
            re.to_f64().unwrap_or(f64::NAN),
            im.to_f64().unwrap_or(f64::NAN),
        ))
    }
}

impl Amplitude for ExactAmplitude {
    type Real = BigRational;

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    fn is_negligible(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn real_to_f64(r: &BigRational) -> f64 {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn from_real(r: BigRational) -> Self {
        Complex::new(r, BigRational::zero())
    }

    fn json_parts(&self) -> (Value, Value) {
        (
            Value::String(self.re.to_string()),
            Value::String(self.im.to_string()),
        )
    }

    fn real_json(r: &BigRational) -> Value {
        Value::String(r.to_string())
    }

    fn from_json_parts(re: &Value, im: &Value) -> Result<Self> {
        Ok(Complex::new(rational_from_json(re)?, rational_from_json(im)?))
    }
}

fn float_json(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Exact rational amplitude `num/den`.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn exact(re: BigRational) -> ExactAmplitude {
    Complex::new(re, BigRational::zero())
}

/// Parses `"3"`, `"-7/4"`, `"0.125"` or `"1e-3"` into an exact rational.
/// Decimal input is read digit by digit, so `"0.1"` is exactly `1/10`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::parse(0, format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let negative = mantissa.starts_with('-');
    let mantissa = mantissa.trim_start_matches(['-', '+']);
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(digits);
    if scale >= 0 {
        value *= BigRational::from_integer(num::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Reads a JSON number or string as an exact rational.
pub fn rational_from_json(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        Value::Null => Ok(BigRational::zero()),
        other => Err(Error::parse(0, format!("expected a number, got {other}"))),
    }
}

/// Exact conversion of a finite float (every finite `f64` is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Param(format!("non-finite value {x}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("-7/4").unwrap(), rational(-7, 4));
        assert_eq!(parse_rational("0.1").unwrap(), rational(1, 10));
        assert_eq!(parse_rational("2.5e-1").unwrap(), rational(1, 4));
        assert_eq!(parse_rational("3").unwrap(), rational(3, 1));
        assert_eq!(parse_rational(".5").unwrap(), rational(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn exact_conjugation_and_norm() {
        let a = Complex::new(rational(1, 2), rational(-3, 2));
        assert_eq!(Amplitude::conj(&a).im, rational(3, 2));
        assert_eq!(Amplitude::norm_sqr(&a), rational(10, 4));
    }
}
