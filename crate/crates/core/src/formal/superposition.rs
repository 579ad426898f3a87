use std::collections::BTreeMap;

use num::Zero;
use serde_json::{json, Value};

use super::amplitude::{Amplitude, Complex64};
use crate::error::{Error, Result};

/// Keys that have a canonical string form, used for JSON output and for
/// reading superpositions back in.
pub trait CanonicalKey {
    fn canonical(&self) -> String;
}

impl CanonicalKey for String {
    fn canonical(&self) -> String {
        self.clone()
    }
}

/// A collected complex-linear combination of keys.
///
/// Equal keys are always merged and terms whose amplitude is negligible are
/// never stored, so structural equality is equality of formal vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Superposition<K: Ord, A = Complex64> {
    terms: BTreeMap<K, A>,
}

impl<K: Ord, A> Default for Superposition<K, A> {
    fn default() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone, A: Amplitude> Superposition<K, A> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(key: K, amp: A) -> Self {
        Self::collect([(amp, key)])
    }

    /// Sums amplitudes per key and drops negligible results.
    pub fn collect<I>(raw: I) -> Self
    where
        I: IntoIterator<Item = (A, K)>,
    {
        let mut terms: BTreeMap<K, A> = BTreeMap::new();
        for (amp, key) in raw {
            match terms.get_mut(&key) {
                Some(slot) => *slot = slot.clone() + amp,
                None => {
                    terms.insert(key, amp);
                }
            }
        }
        terms.retain(|_, a| !a.is_negligible());
        Self { terms }
    }

    /// Sum of squared amplitude magnitudes (the volume term with unit weights).
    pub fn norm2(&self) -> A::Real {
        self.terms
            .values()
            .fold(A::Real::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, key: &K) -> Option<&A> {
        self.terms.get(key)
    }

    /// Amplitude of `key`, zero when absent.
    pub fn amplitude(&self, key: &K) -> A {
        self.terms.get(key).cloned().unwrap_or_else(A::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &A)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    /// The raw `(amplitude, key)` list, in key order.
    pub fn to_raw(&self) -> Vec<(A, K)> {
        self.terms
            .iter()
            .map(|(k, a)| (a.clone(), k.clone()))
            .collect()
    }

    pub fn scale(&self, factor: &A) -> Self {
        Self::collect(
            self.terms
                .iter()
                .map(|(k, a)| (factor.clone() * a.clone(), k.clone())),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::collect(self.to_raw().into_iter().chain(other.to_raw()))
    }

    /// Replaces every key by `f(key)` and collects again.
    pub fn map_keys<K2, F>(&self, mut f: F) -> Superposition<K2, A>
    where
        K2: Ord + Clone,
        F: FnMut(&K) -> K2,
    {
        Superposition::collect(self.terms.iter().map(|(k, a)| (a.clone(), f(k))))
    }

    /// Same keys with conjugated amplitudes.
    pub fn conj(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, a)| (k.clone(), a.conj()))
                .collect(),
        }
    }

    /// Converts to floating amplitudes.
    pub fn to_complex64(&self) -> Superposition<K, Complex64> {
        Superposition::collect(
            self.terms
                .iter()
                .map(|(k, a)| (a.to_complex64(), k.clone())),
        )
    }
}

impl<K: Ord + Clone + CanonicalKey, A: Amplitude> Superposition<K, A> {
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(k, a)| {
                let (re, im) = a.json_parts();
                json!({ "key": k.canonical(), "re": re, "im": im })
            })
            .collect();
        json!({ "terms": terms })
    }

    /// Reads `{"terms": [{"key", "re", "im"}, ...]}`; keys are parsed by
    /// `parse_key` and duplicate keys are collected.
    pub fn from_json<F>(value: &Value, mut parse_key: F) -> Result<Self>
    where
        F: FnMut(&str) -> Result<K>,
    {
        let terms = value
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse(0, "missing \"terms\" array"))?;
        let mut raw = Vec::with_capacity(terms.len());
        for t in terms {
            let key = t
                .get("key")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::parse(0, "term without string \"key\""))?;
            let re = t.get("re").unwrap_or(&Value::Null);
            let im = t.get("im").unwrap_or(&Value::Null);
            raw.push((A::from_json_parts(re, im)?, parse_key(key)?));
        }
        Ok(Self::collect(raw))
    }
}

impl<K: Ord + Clone> Superposition<K, Complex64> {
    /// Rescales to unit `norm2`.
    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm2();
        if !(n2 > 0.0) {
            return Err(Error::ZeroState);
        }
        Ok(self.scale(&Complex64::new(1.0 / n2.sqrt(), 0.0)))
    }
}

impl<K: Ord + Clone, A: Amplitude> FromIterator<(A, K)> for Superposition<K, A> {
    fn from_iter<I: IntoIterator<Item = (A, K)>>(iter: I) -> Self {
        Self::collect(iter)
    }
}
