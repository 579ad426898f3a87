//! Opaque kets with a user-supplied gluing table.
//!
//! Stands in for pairings whose closed manifolds cannot be recognised here;
//! the table says which closed class each gluing lands in.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use super::gluing::PairingRule;
use crate::error::{Error, Result};

/// Closed-class ids ending in `*` denote the orientation reversal of the
/// id without it.
fn mirror_id(id: &str) -> String {
    match id.strip_suffix('*') {
        Some(base) => base.to_string(),
        None => format!("{id}*"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MockEquivalence {
    kets: BTreeSet<String>,
    glue: BTreeMap<(String, String), String>,
}

impl MockEquivalence {
    /// Entries missing in one direction are filled in from the other; the
    /// table must end up total and symmetric up to orientation reversal.
    pub fn new<I, J>(kets: I, glue: J) -> Result<Self>
    where
        I: IntoIterator<Item = String>,
        J: IntoIterator<Item = ((String, String), String)>,
    {
        let kets: BTreeSet<String> = kets.into_iter().collect();
        if kets.is_empty() {
            return Err(Error::Structure("mock table declares no kets".to_string()));
        }
        let mut table: BTreeMap<(String, String), String> = BTreeMap::new();
        for ((a, b), c) in glue {
            for k in [&a, &b] {
                if !kets.contains(k) {
                    return Err(Error::Structure(format!("undeclared ket {k:?} in gluing table")));
                }
            }
            if table.insert((a.clone(), b.clone()), c).is_some() {
                return Err(Error::Structure(format!("duplicate gluing entry {a}|{b}")));
            }
        }
        for a in &kets {
            for b in &kets {
                let fwd = table.get(&(a.clone(), b.clone())).cloned();
                let back = table.get(&(b.clone(), a.clone())).cloned();
                match (fwd, back) {
                    (Some(x), Some(y)) => {
                        if x != y && x != mirror_id(&y) {
                            return Err(Error::Structure(format!(
                                "gluing table not symmetric at {a}|{b}: {x} vs {y}"
                            )));
                        }
                    }
                    (Some(x), None) => {
                        table.insert((b.clone(), a.clone()), x);
                    }
                    (None, Some(y)) => {
                        table.insert((a.clone(), b.clone()), y);
                    }
                    (None, None) => {
                        return Err(Error::Structure(format!("gluing table misses {a}|{b}")));
                    }
                }
            }
        }
        Ok(Self { kets, glue: table })
    }

    /// Reads `{"kets": [...], "glue": {"A|B": "class", ...}}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let kets = v
            .get("kets")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse(0, "mock table needs a \"kets\" array"))?
            .iter()
            .map(|k| {
                k.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::parse(0, "ket ids must be strings"))
            })
            .collect::<Result<Vec<_>>>()?;
        let glue = v
            .get("glue")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::parse(0, "mock table needs a \"glue\" object"))?
            .iter()
            .map(|(k, c)| {
                let (a, b) = k
                    .split_once('|')
                    .ok_or_else(|| Error::parse(0, format!("gluing key {k:?} is not \"A|B\"")))?;
                let c = c
                    .as_str()
                    .ok_or_else(|| Error::parse(0, format!("class for {k:?} must be a string")))?;
                Ok(((a.to_string(), b.to_string()), c.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(kets, glue)
    }

    pub fn to_json(&self) -> Value {
        let glue: serde_json::Map<String, Value> = self
            .glue
            .iter()
            .map(|((a, b), c)| (format!("{a}|{b}"), Value::String(c.clone())))
            .collect();
        json!({ "kets": self.kets, "glue": glue })
    }

    pub fn kets(&self) -> impl Iterator<Item = &String> {
        self.kets.iter()
    }

    /// Two kets pairing identically with every declared ket.
    pub fn equivalent(&self, a: &str, b: &str) -> bool {
        self.kets
            .iter()
            .all(|k| self.glue.get(&(a.to_string(), k.clone())) == self.glue.get(&(b.to_string(), k.clone())))
    }

    /// Every gluing among two kets lands in the same class.
    pub fn four_way_equal(&self, a: &str, b: &str) -> bool {
        let pairs = [(a, a), (a, b), (b, a), (b, b)];
        let classes: BTreeSet<&String> = pairs
            .iter()
            .filter_map(|(x, y)| self.glue.get(&(x.to_string(), y.to_string())))
            .collect();
        classes.len() == 1
    }

    /// Kets `A`, `B` with all four gluings equal.
    pub fn mazur() -> Self {
        let k = |s: &str| s.to_string();
        Self::new(
            [k("A"), k("B")],
            [
                ((k("A"), k("A")), k("W")),
                ((k("A"), k("B")), k("W")),
                ((k("B"), k("B")), k("W")),
            ],
        )
        .expect("static table")
    }
}

#[derive(Clone, Debug)]
pub struct MockRule<'a>(pub &'a MockEquivalence);

impl PairingRule for MockRule<'_> {
    type Ket = String;
    type Closed = String;

    fn glue(&self, a: &String, b: &String) -> Result<String> {
        self.0
            .glue
            .get(&(a.clone(), b.clone()))
            .cloned()
            .ok_or_else(|| Error::Boundary(format!("no gluing for {a}|{b}")))
    }
}
