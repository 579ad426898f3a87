use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formal::CanonicalKey;

/// Closed 0-manifold: counts of positively and negatively oriented points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Closed0Class {
    pub plus_points: u32,
    pub minus_points: u32,
}

impl Closed0Class {
    pub fn new(plus_points: u32, minus_points: u32) -> Self {
        Self {
            plus_points,
            minus_points,
        }
    }

    pub fn total(&self) -> u32 {
        self.plus_points + self.minus_points
    }

    pub fn mirror(&self) -> Self {
        Self::new(self.minus_points, self.plus_points)
    }
}

impl fmt::Display for Closed0Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "points(+{},-{})", self.plus_points, self.minus_points)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Closed1Class {
    pub circles: u32,
}

impl fmt::Display for Closed1Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "circles({})", self.circles)
    }
}

/// Closed orientable surface as the sorted multiset of component genera.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClosedSurfaceClass {
    genera: Vec<u32>,
}

impl ClosedSurfaceClass {
    pub fn new(mut genera: Vec<u32>) -> Self {
        genera.sort_unstable();
        Self { genera }
    }

    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    pub fn components(&self) -> usize {
        self.genera.len()
    }

    pub fn orientable(&self) -> bool {
        true
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.genera.iter().map(|&g| 2 - 2 * g as i64).sum()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut g = self.genera.clone();
        g.extend_from_slice(&other.genera);
        Self::new(g)
    }
}

impl fmt::Display for ClosedSurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.genera.iter().map(u32::to_string).collect();
        write!(f, "surface[{}]", g.join(","))
    }
}

impl CanonicalKey for Closed0Class {
    fn canonical(&self) -> String {
        self.to_string()
    }
}

impl CanonicalKey for Closed1Class {
    fn canonical(&self) -> String {
        self.to_string()
    }
}

impl CanonicalKey for ClosedSurfaceClass {
    fn canonical(&self) -> String {
        self.to_string()
    }
}

impl std::str::FromStr for Closed0Class {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse(0, format!("bad point class {s:?}"));
        let inner = s
            .strip_prefix("points(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (p, m) = inner.split_once(',').ok_or_else(bad)?;
        let p = p.trim_start_matches('+').parse().map_err(|_| bad())?;
        let m = m.trim_start_matches('-').parse().map_err(|_| bad())?;
        Ok(Self::new(p, m))
    }
}

impl std::str::FromStr for Closed1Class {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.strip_prefix("circles(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|n| n.parse().ok())
            .map(|circles| Self { circles })
            .ok_or_else(|| Error::parse(0, format!("bad circle class {s:?}")))
    }
}

impl std::str::FromStr for ClosedSurfaceClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse(0, format!("bad surface class {s:?}"));
        let inner = s
            .strip_prefix("surface[")
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        if inner.is_empty() {
            return Ok(Self::default());
        }
        let g = inner
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(g))
    }
}
