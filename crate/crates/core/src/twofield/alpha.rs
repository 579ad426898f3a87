//! Ket erasure on a finite tower `ℂ^m`, formal combinations of those, and so on.

use crate::error::{Error, Result};
use crate::formal::Complex64;

/// A level-1 vector, or a formal combination of kets one level down.
#[derive(Clone, Debug, PartialEq)]
pub enum Level {
    Vector(Vec<Complex64>),
    Kets(Vec<(Complex64, Level)>),
}

impl Level {
    pub fn depth(&self) -> usize {
        match self {
            Self::Vector(_) => 1,
            Self::Kets(terms) => 1 + terms.first().map_or(1, |(_, k)| k.depth()),
        }
    }

    pub fn as_vector(&self) -> Option<&[Complex64]> {
        match self {
            Self::Vector(v) => Some(v),
            Self::Kets(_) => None,
        }
    }

    fn scaled(&self, a: Complex64) -> Level {
        match self {
            Self::Vector(v) => Self::Vector(v.iter().map(|z| a * z).collect()),
            Self::Kets(t) => Self::Kets(t.iter().map(|(b, k)| (a * b, k.clone())).collect()),
        }
    }

    /// Linear sum of same-level elements; kets are formal and are concatenated.
    fn add(self, other: Level) -> Result<Level> {
        match (self, other) {
            (Self::Vector(mut a), Self::Vector(b)) => {
                if a.len() != b.len() {
                    return Err(Error::Structure("vectors of different sizes".to_string()));
                }
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(Self::Vector(a))
            }
            (Self::Kets(mut a), Self::Kets(b)) => {
                a.extend(b);
                Ok(Self::Kets(a))
            }
            _ => Err(Error::Structure("cannot add elements of different levels".to_string())),
        }
    }
}

/// `α_n : Σ aᵢ|φᵢ⟩ ↦ Σ ãᵢ φᵢ`, with `ã = conj(a)` for odd `n`.
pub fn alpha_erase(v: &Level, n: usize) -> Result<Level> {
    let Level::Kets(terms) = v else {
        return Err(Error::Structure("a level-1 vector has no kets to erase".to_string()));
    };
    if v.depth() != n {
        return Err(Error::Param(format!("element has level {}, not {n}", v.depth())));
    }
    let mut out: Option<Level> = None;
    for (a, k) in terms {
        let a = if n % 2 == 1 { a.conj() } else { *a };
        let t = k.scaled(a);
        out = Some(match out {
            None => t,
            Some(acc) => acc.add(t)?,
        });
    }
    out.ok_or_else(|| Error::Structure("empty combination".to_string()))
}

/// The evaluation lift `e(φ_r) = Σᵢ φ²ᵢ(φ_r)|φ²ᵢ⟩` at level 3, where the
/// frame element `φ²ᵢ = Σⱼ b_ij |e_j⟩` evaluates to `b_ir` on the basis
/// vector `e_r`.
pub fn evaluation_lift(frame: &[Vec<Complex64>], r: usize) -> Result<Level> {
    let m = frame.first().map_or(0, Vec::len);
    if m == 0 || frame.iter().any(|row| row.len() != m) || r >= m {
        return Err(Error::Param("frame rows must share a nonzero length above the index".to_string()));
    }
    let basis = |j: usize| {
        let mut e = vec![Complex64::new(0.0, 0.0); m];
        e[j] = Complex64::new(1.0, 0.0);
        Level::Vector(e)
    };
    let terms = frame
        .iter()
        .map(|row| {
            let ket = Level::Kets(row.iter().enumerate().map(|(j, b)| (*b, basis(j))).collect());
            (row[r], ket)
        })
        .collect();
    Ok(Level::Kets(terms))
}
