//! Numerical invariants of quotient manifolds and the combinatorial pruning
//! of candidate group orders and types.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::triples::{genus, is_hyperbolic, TripleType};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifoldInvariants {
    pub n: usize,
    pub group_order: u64,
    pub genera: Vec<u64>,
    pub chi: i64,
    pub self_intersection: i64,
    pub euler: i64,
    pub kodaira: usize,
}

/// `χ = (−1)ⁿ ∏(g_i − 1) / |G|`, `Kⁿ = (−1)ⁿ n! 2ⁿ χ`, `e = 2ⁿ χ`.
pub fn compute_invariants(group_order: u64, genera: &[u64]) -> Result<ManifoldInvariants> {
    if group_order == 0 || genera.is_empty() || genera.contains(&0) {
        return Err(Error::Input(format!("invalid configuration: order {group_order}, genera {genera:?}")));
    }
    let n = genera.len();
    let product = genera.iter().try_fold(1i128, |acc, &g| acc.checked_mul(g as i128 - 1));
    let product = product.ok_or_else(|| Error::Inconsistent("genus product overflows".into()))?;
    if product % group_order as i128 != 0 {
        return Err(Error::Inconsistent(format!(
            "∏(g_i − 1) = {product} is not divisible by |G| = {group_order}"
        )));
    }
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let chi = sign * product / group_order as i128;
    let factorial: i128 = (1..=n as i128).product();
    let two_n = 1i128 << n;
    let narrow = |x: i128| i64::try_from(x).map_err(|_| Error::Inconsistent(format!("invariant {x} overflows")));
    Ok(ManifoldInvariants {
        n,
        group_order,
        genera: genera.to_vec(),
        chi: narrow(chi)?,
        self_intersection: narrow(sign * factorial * two_n * chi)?,
        euler: narrow(two_n * chi)?,
        kodaira: genera.iter().filter(|&&g| g >= 2).count(),
    })
}

/// `⌊168 √(−21χ)⌋`, computed as an integer square root.
pub fn hurwitz_bound(chi: i64) -> Result<u64> {
    if chi >= 0 {
        return Err(Error::Domain(format!("the Hurwitz bound needs χ ≤ −1, got {chi}")));
    }
    Ok(isqrt(168u128 * 168 * 21 * chi.unsigned_abs() as u128) as u64)
}

pub fn isqrt(x: u128) -> u128 {
    if x < 2 {
        return x;
    }
    let mut r = (x as f64).sqrt() as u128;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// A possible group order with genera and (sorted) types for a threefold.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CandidateTuple {
    pub order: u64,
    pub genera: [u64; 3],
    pub types: [TripleType; 3],
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Sorted hyperbolic types `[m1 ≤ m2 ≤ m3]` with every `m | order` whose
/// triangle cover of a group of that order has genus `g`.
fn types_of_genus(order: u64, g: u64, divs: &[u64]) -> Vec<TripleType> {
    let ms: Vec<u64> = divs.iter().copied().filter(|&m| m >= 2 && m <= 4 * g + 2).collect();
    let mut out = Vec::new();
    for (i, &m1) in ms.iter().enumerate() {
        for (j, &m2) in ms.iter().enumerate().skip(i) {
            for &m3 in &ms[j..] {
                let ty = [m1 as u32, m2 as u32, m3 as u32];
                if is_hyperbolic(ty) && genus(order as usize, ty).ok() == Some(g) {
                    out.push(ty);
                }
            }
        }
    }
    out
}

/// Every `(N, g_1, g_2, g_3, T_1, T_2, T_3)` passing the numerical constraints for threefolds with free
/// actions of a group of order `N`, up to simultaneous reordering of the three factors.
///
/// The index shift in `m_{i,j} | (g_{i+1} − 1)(g_{i+2} − 1)` is taken mod 3.
pub fn candidate_tuples(chi: i64) -> Result<Vec<CandidateTuple>> {
    let bound = hurwitz_bound(chi)?;
    let abs = chi.unsigned_abs();
    let per_order: Vec<u64> = (1..=bound).collect();
    let mut out: Vec<CandidateTuple> = crate::par::flat_map(&per_order, |&order| {
        let target = order * abs;
        let divs = divisors(order);
        let mut found = Vec::new();
        let gm1 = divisors(target);
        for &d1 in &gm1 {
            for &d2 in &gm1 {
                if d1 > d2 || target % (d1 * d2) != 0 {
                    continue;
                }
                let d3 = target / (d1 * d2);
                if d2 > d3 {
                    continue;
                }
                let genera = [d1 + 1, d2 + 1, d3 + 1];
                let others = [d2 * d3, d1 * d3, d1 * d2];
                let options: Vec<Vec<TripleType>> = (0..3)
                    .map(|i| {
                        types_of_genus(order, genera[i], &divs)
                            .into_iter()
                            .filter(|ty| ty.iter().all(|&m| others[i] % m as u64 == 0))
                            .collect()
                    })
                    .collect();
                for t1 in &options[0] {
                    for t2 in &options[1] {
                        for t3 in &options[2] {
                            let mut pairs = [(genera[0], *t1), (genera[1], *t2), (genera[2], *t3)];
                            pairs.sort();
                            found.push(CandidateTuple {
                                order,
                                genera: pairs.map(|p| p.0),
                                types: pairs.map(|p| p.1),
                            });
                        }
                    }
                }
            }
        }
        found
    });
    out.sort();
    out.dedup();
    Ok(out)
}

impl CandidateTuple {
    /// Whether `(order, types)` matches this candidate, ignoring the order of factors and within types.
    pub fn matches(&self, order: u64, types: &[TripleType]) -> bool {
        if order != self.order || types.len() != 3 {
            return false;
        }
        let mut want: Vec<TripleType> = types.iter().map(|&t| crate::triples::sorted(t)).collect();
        want.sort();
        let mut have = self.types.to_vec();
        have.sort();
        want == have
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z5_squared_configurations() {
        let inv = compute_invariants(25, &[6, 6, 2]).unwrap();
        assert_eq!((inv.chi, inv.self_intersection, inv.euler, inv.kodaira), (-1, 48, -8, 3));
        assert_eq!(compute_invariants(25, &[6, 6, 6]).unwrap().chi, -5);
        let surface = compute_invariants(1, &[2, 2]).unwrap();
        assert_eq!((surface.chi, surface.self_intersection, surface.euler), (1, 8, 4));
        assert!(matches!(compute_invariants(7, &[6, 6, 2]), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn bounds() {
        assert_eq!(hurwitz_bound(-1).unwrap(), 769);
        assert_eq!(hurwitz_bound(-5).unwrap(), 1721);
        assert_eq!(hurwitz_bound(-4).unwrap(), 1539);
        assert!(matches!(hurwitz_bound(0), Err(Error::Domain(_))));
        for x in 0..5000u128 {
            let r = isqrt(x);
            assert!(r * r <= x && (r + 1) * (r + 1) > x);
        }
    }

    #[test]
    fn known_candidates_appear() {
        let two = candidate_tuples(-2).unwrap();
        assert!(two.iter().any(|c| c.matches(120, &[[2, 5, 4], [2, 6, 5], [3, 4, 4]])));
        let five = candidate_tuples(-5).unwrap();
        assert!(five.iter().any(|c| c.matches(25, &[[5, 5, 5]; 3])));
        assert!(five.iter().any(|c| c.matches(120, &[[2, 5, 4], [3, 4, 4], [3, 6, 6]])));
        for c in &five {
            for i in 0..3 {
                assert_eq!(genus(c.order as usize, c.types[i]).unwrap(), c.genera[i]);
            }
            let p: u64 = c.genera.iter().map(|g| g - 1).product();
            assert_eq!(p, 5 * c.order);
        }
    }
}
