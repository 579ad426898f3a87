//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Per-dimension arrays use
//! dotted keys such as `Lambda.2 = 0.1`. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::action::ActionParams;
use crate::cdt::{GrowthConfig, Layer};
use crate::error::{Error, Result};

/// Keys taking one value per dimension `0..=2`.
const PER_DIM: [&str; 5] = ["Lambda", "c", "f", "g", "h"];

const SCALARS: [&str; 15] = [
    "G",
    "g.mock",
    "singular_penalty",
    "a",
    "layer",
    "p_circle",
    "topology_change",
    "slices",
    "seed",
    "chains",
    "sweeps",
    "moves_per_sweep",
    "beta",
    "max_dimension",
    "fluct_cap",
];

fn known(key: &str) -> bool {
    if SCALARS.contains(&key) {
        return true;
    }
    match key.split_once('.') {
        Some(("alpha", d)) => matches!(d, "1" | "2"),
        Some((name, d)) => PER_DIM.contains(&name) && matches!(d, "0" | "1" | "2"),
        None => false,
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl FromStr for RunConfig {
    type Err = Error;

    fn from_str(src: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, format!("expected `key = value`, got `{line}`")))?;
            let (k, v) = (k.trim(), v.trim());
            if v.is_empty() {
                return Err(Error::parse(i + 1, format!("`{k}` has no value")));
            }
            if cfg.values.contains_key(k) {
                return Err(Error::parse(i + 1, format!("duplicate key `{k}`")));
            }
            cfg.set(k, v).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::parse(i + 1, msg),
                e => e,
            })?;
        }
        Ok(cfg)
    }
}

impl RunConfig {
    /// Sets or overrides one key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !known(key) {
            return Err(Error::parse(0, format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    /// Parses `key` if present.
    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::parse(0, format!("bad value `{v}` for `{key}`")))
            })
            .transpose()
    }

    fn fill(&self, key: &str, slot: &mut f64) -> Result<()> {
        if let Some(v) = self.parsed::<f64>(key)? {
            *slot = v;
        }
        Ok(())
    }

    fn fill_dims(&self, name: &str, first: usize, slots: &mut [f64]) -> Result<()> {
        for (i, s) in slots.iter_mut().enumerate() {
            self.fill(&format!("{name}.{}", i + first), s)?;
        }
        Ok(())
    }

    pub fn action_params(&self) -> Result<ActionParams> {
        let mut p = ActionParams::default();
        self.fill("G", &mut p.g_newton)?;
        self.fill_dims("Lambda", 0, &mut p.lambda)?;
        self.fill_dims("c", 0, &mut p.c)?;
        self.fill_dims("f", 0, &mut p.f)?;
        self.fill_dims("g", 0, &mut p.g)?;
        self.fill_dims("h", 0, &mut p.h)?;
        self.fill("g.mock", &mut p.g_mock)?;
        self.fill("singular_penalty", &mut p.singular_penalty)?;
        self.fill("a", &mut p.a)?;
        self.fill_dims("alpha", 1, &mut p.alpha)?;
        p.validate()?;
        Ok(p)
    }

    pub fn growth_config(&self) -> Result<GrowthConfig> {
        let mut g = GrowthConfig::default();
        self.fill("a", &mut g.a)?;
        self.fill_dims("alpha", 1, &mut g.alpha)?;
        self.fill("p_circle", &mut g.p_circle)?;
        if let Some(l) = self.parsed::<Layer>("layer")? {
            g.layer = l;
        }
        if let Some(t) = self.parsed::<bool>("topology_change")? {
            g.topology_change = t;
        }
        if let Some(s) = self.parsed::<usize>("slices")? {
            g.slices = s;
        }
        g.validate()?;
        Ok(g)
    }
}
