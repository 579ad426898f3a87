//! Simplicial homology over the integers via Smith normal form.

use std::collections::BTreeMap;

use serde::Serialize;

use super::triangulation::{Triangulation, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Homology {
    /// Betti numbers `b_0 ..= b_d`.
    pub betti: Vec<usize>,
    /// Torsion coefficients (invariant factors > 1) of `H_0 ..= H_d`.
    pub torsion: Vec<Vec<i64>>,
}

/// Betti numbers and torsion of `t` from the Smith normal forms of its
/// boundary matrices.
pub fn homology_ranks(t: &Triangulation) -> Result<Homology> {
    let d = t.dim();
    let simplices: Vec<Vec<Vec<VertexId>>> = (0..=d)
        .map(|k| t.simplices(k).into_iter().collect())
        .collect();
    // diag[k] = invariant factors of the boundary map C_k -> C_{k-1}
    let mut diag: Vec<Vec<i64>> = vec![Vec::new(); d + 2];
    for k in 1..=d {
        let rows = &simplices[k - 1];
        let index: BTreeMap<&[VertexId], usize> = rows
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_slice(), i))
            .collect();
        let mut m = vec![vec![0i64; simplices[k].len()]; rows.len()];
        for (j, s) in simplices[k].iter().enumerate() {
            for omit in 0..s.len() {
                let face: Vec<VertexId> = s
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != omit)
                    .map(|(_, &v)| v)
                    .collect();
                let sign = if omit % 2 == 0 { 1 } else { -1 };
                m[index[face.as_slice()]][j] = sign;
            }
        }
        diag[k] = smith_diagonal(m)?;
    }
    let mut betti = Vec::with_capacity(d + 1);
    let mut torsion = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let rank_k = diag[k].len();
        let rank_k1 = diag[k + 1].len();
        betti.push(simplices[k].len() - rank_k - rank_k1);
        torsion.push(diag[k + 1].iter().copied().filter(|&x| x > 1).collect());
    }
    Ok(Homology { betti, torsion })
}

/// Nonzero invariant factors of an integer matrix, in divisibility order.
pub fn smith_diagonal(mut m: Vec<Vec<i64>>) -> Result<Vec<i64>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let overflow = || Error::Param("integer overflow in Smith normal form".to_string());
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero magnitude in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0
                    && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                if m[i][t] != 0 {
                    let q = m[i][t] / p;
                    for j in t..cols {
                        let v = m[t][j].checked_mul(q).ok_or_else(overflow)?;
                        m[i][j] = m[i][j].checked_sub(v).ok_or_else(overflow)?;
                    }
                    if m[i][t] != 0 {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if m[t][j] != 0 {
                    let q = m[t][j] / p;
                    for i in t..rows {
                        let v = m[i][t].checked_mul(q).ok_or_else(overflow)?;
                        m[i][j] = m[i][j].checked_sub(v).ok_or_else(overflow)?;
                    }
                    if m[t][j] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                // the pivot must divide the rest of the block
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| m[i][j] % p != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..cols {
                            m[t][j] = m[t][j].checked_add(m[i][j]).ok_or_else(overflow)?;
                        }
                        continue;
                    }
                }
            }
            // move the smallest remainder into the pivot position
            let mut best = (t, t);
            for i in t..rows {
                if m[i][t] != 0 && m[i][t].abs() < m[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if m[t][j] != 0 && m[t][j].abs() < m[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            m.swap(t, best.0);
            for row in m.iter_mut() {
                row.swap(t, best.1);
            }
        }
        out.push(m[t][t].abs());
        t += 1;
    }
    Ok(out)
}
