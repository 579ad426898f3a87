//! Topological Cauchy–Schwarz checks: `o(AB̄) < max{o(AĀ), o(BB̄)}`.

use super::gluing::PairingRule;
use crate::error::Result;
use crate::topo::{Closed0Class, Closed1Class, ClosedSurfaceClass};

/// All ordered index pairs `(i, j)`, `i ≠ j`, where the strict inequality
/// fails for the given order.
pub fn cauchy_schwarz_check<R, O, F>(rule: &R, kets: &[R::Ket], order: F) -> Result<Vec<(usize, usize)>>
where
    R: PairingRule,
    O: PartialOrd,
    F: Fn(&R::Closed) -> O,
{
    let diag = kets
        .iter()
        .map(|k| rule.glue(k, k).map(|c| order(&c)))
        .collect::<Result<Vec<O>>>()?;
    let mut bad = Vec::new();
    for (i, a) in kets.iter().enumerate() {
        for (j, b) in kets.iter().enumerate() {
            if i == j {
                continue;
            }
            let cross = order(&rule.glue(a, b)?);
            let max = if diag[i] >= diag[j] { &diag[i] } else { &diag[j] };
            if !(cross < *max) {
                bad.push((i, j));
            }
        }
    }
    Ok(bad)
}

pub fn circle_count_order(c: &Closed1Class) -> u32 {
    c.circles
}

/// `(−#components, χ)`, compared lexicographically.
pub fn components_chi_order(c: &ClosedSurfaceClass) -> (i64, i64) {
    (-(c.components() as i64), c.euler_characteristic())
}

/// `−(total points)` for closed 0-manifolds.
pub fn total_points_order(c: &Closed0Class) -> i64 {
    -(c.total() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::{Bounded1Ket, MatchingRule, PointRule};

    #[test]
    fn four_point_matchings_pass() {
        let kets = Bounded1Ket::all_matchings(&[1, 2, 3, 4], 0);
        assert_eq!(kets.len(), 3);
        assert!(cauchy_schwarz_check(&MatchingRule, &kets, circle_count_order).unwrap().is_empty());
        assert!(cauchy_schwarz_check(&MatchingRule, &kets[..1], circle_count_order).unwrap().is_empty());
    }

    #[test]
    fn negative_point_count_fails_on_equal_sizes() {
        let kets = [Closed0Class::new(1, 0), Closed0Class::new(0, 1), Closed0Class::new(2, 0)];
        let bad = cauchy_schwarz_check(&PointRule, &kets, total_points_order).unwrap();
        assert_eq!(bad, vec![(0, 1), (1, 0)]);
    }
}
