//! Spherical generating triples `[a, b, c]` with `abc = 1`.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup, QuotientGroup};
use crate::par;

pub type Triple = [Elem; 3];

/// `[ord a, ord b, ord c]`.
pub type TripleType = [u32; 3];

/// How a requested type is matched against a triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypeFilter {
    Ordered(TripleType),
    /// Matches any reordering.
    Multiset(TripleType),
}

impl TypeFilter {
    pub fn matches(&self, ty: TripleType) -> bool {
        match *self {
            TypeFilter::Ordered(want) => ty == want,
            TypeFilter::Multiset(want) => sorted(want) == sorted(ty),
        }
    }
}

pub fn sorted(mut ty: TripleType) -> TripleType {
    ty.sort_unstable();
    ty
}

/// A validated generating triple of some group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingTriple {
    pub elems: Triple,
    pub ty: TripleType,
    pub genus: u64,
}

impl GeneratingTriple {
    pub fn new(h: &FiniteGroup, t: Triple) -> Result<Self> {
        for &x in &t {
            h.check_index(x)?;
        }
        if !is_generating_triple(h, t) {
            return Err(Error::Input(format!("{t:?} is not a generating triple of {}", h.label())));
        }
        let ty = triple_type(h, t);
        Ok(GeneratingTriple { elems: t, ty, genus: genus(h.order(), ty)? })
    }

    pub fn is_hyperbolic(&self) -> bool {
        is_hyperbolic(self.ty)
    }
}

pub fn triple_type(h: &FiniteGroup, t: Triple) -> TripleType {
    t.map(|x| h.element_order(x))
}

/// Nontrivial entries, product one, and `⟨a, b⟩ = H`.
pub fn is_generating_triple(h: &FiniteGroup, [a, b, c]: Triple) -> bool {
    a != 0 && b != 0 && c != 0 && h.mul(h.mul(a, b), c) == 0 && h.generated_order(&[a, b]) == h.order()
}

/// `1/m1 + 1/m2 + 1/m3 < 1`, in integers.
pub fn is_hyperbolic([m1, m2, m3]: TripleType) -> bool {
    let (m1, m2, m3) = (m1 as u64, m2 as u64, m3 as u64);
    m1 * m2 + m2 * m3 + m1 * m3 < m1 * m2 * m3
}

/// Genus of the triangle cover from Hurwitz's formula `2g − 2 = |H|(1 − Σ 1/m_i)`.
pub fn genus(order: usize, [m1, m2, m3]: TripleType) -> Result<u64> {
    let (m1, m2, m3) = (m1 as i128, m2 as i128, m3 as i128);
    let den = m1 * m2 * m3;
    let num = order as i128 * (den - m1 * m2 - m2 * m3 - m1 * m3);
    if num % den != 0 {
        return Err(Error::Inconsistent(format!(
            "Hurwitz formula gives a non-integral 2g−2 for order {order}, type [{m1},{m2},{m3}]"
        )));
    }
    let two_g = num / den + 2;
    if two_g < 0 || two_g % 2 != 0 {
        return Err(Error::Inconsistent(format!(
            "Hurwitz formula gives 2g = {two_g} for order {order}, type [{m1},{m2},{m3}]"
        )));
    }
    Ok((two_g / 2) as u64)
}

/// Every generating triple of `h`, ordered by `(a, b)`.
///
/// Pairs are scanned in parallel over `a`; `c = (ab)⁻¹` must be nontrivial.
pub fn enumerate_triples(h: &FiniteGroup, filter: Option<TypeFilter>) -> Vec<Triple> {
    let firsts: Vec<Elem> = (1..h.order() as Elem).collect();
    let out = par::flat_map(&firsts, |&a| {
        let mut row = Vec::new();
        for b in 1..h.order() as Elem {
            let ab = h.mul(a, b);
            if ab == 0 {
                continue;
            }
            let t = [a, b, h.inv(ab)];
            if let Some(f) = filter {
                if !f.matches(triple_type(h, t)) {
                    continue;
                }
            }
            if h.generated_order(&[a, b]) == h.order() {
                row.push(t);
            }
        }
        row
    });
    debug_assert!(out.iter().all(|&t| genus(h.order(), triple_type(h, t)).is_ok()));
    out
}

/// `Σ_S`: the union of all conjugates of `⟨a⟩`, `⟨b⟩` and `⟨c⟩`.
///
/// Every conjugate of a power of `a` is a power of a conjugate of `a`, so the
/// union of the conjugacy classes of all powers is exactly this set.
pub fn stabilizer_set(h: &FiniteGroup, t: Triple) -> FixedBitSet {
    let cc = h.conjugacy_classes();
    let mut set = FixedBitSet::with_capacity(h.order());
    set.insert(0);
    for &x in &t {
        let mut p = x;
        while p != 0 {
            if !set.contains(p as usize) {
                for &y in &cc.classes[cc.class_of[p as usize] as usize] {
                    set.insert(y as usize);
                }
            }
            p = h.mul(p, x);
        }
    }
    set
}

/// A triple on `G/K` with its stabilizer set lifted to `G`.
#[derive(Debug, Clone)]
pub struct LiftedTriple {
    pub triple: Triple,
    /// `Σ_S`, over the quotient's elements.
    pub stabilizer: FixedBitSet,
    /// `Σ_S · K`, the preimage in `G`.
    pub lifted: FixedBitSet,
}

pub fn lift_stabilizer(q: &QuotientGroup, t: Triple) -> LiftedTriple {
    let stabilizer = stabilizer_set(&q.group, t);
    let lifted = q.preimage(&stabilizer);
    LiftedTriple { triple: t, stabilizer, lifted }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::group;
    use crate::group::{quotient, subgroup_generated};

    #[test]
    fn triple_counts() {
        assert_eq!(enumerate_triples(&group("C5^2").unwrap(), None).len(), 480);
        assert_eq!(enumerate_triples(&group("C5").unwrap(), None).len(), 12);
        assert!(enumerate_triples(&group("C2").unwrap(), None).is_empty());
        assert!(enumerate_triples(&group("C1").unwrap(), None).is_empty());
    }

    #[test]
    fn triple_counts_match_a_naive_scan() {
        for spec in ["S4", "D5", "C3 x C3", "Q2"] {
            let h = group(spec).unwrap();
            let mut naive = 0;
            for a in h.elements() {
                for b in h.elements() {
                    let c = h.inv(h.mul(a, b));
                    let span = subgroup_generated(&h, &[a, b, c]).unwrap();
                    if a != 0 && b != 0 && c != 0 && span.order() == h.order() {
                        naive += 1;
                    }
                }
            }
            assert_eq!(enumerate_triples(&h, None).len(), naive, "{spec}");
        }
    }

    #[test]
    fn type_filters() {
        let s5 = group("S5").unwrap();
        let ordered = enumerate_triples(&s5, Some(TypeFilter::Ordered([2, 5, 4])));
        assert!(!ordered.is_empty());
        assert!(ordered.iter().all(|&t| triple_type(&s5, t) == [2, 5, 4]));
        let multi = enumerate_triples(&s5, Some(TypeFilter::Multiset([2, 4, 5])));
        assert_eq!(multi.len(), 6 * ordered.len());
    }

    #[test]
    fn hyperbolicity_and_genus() {
        assert!(is_hyperbolic([5, 5, 5]));
        assert!(!is_hyperbolic([2, 3, 6]));
        assert!(!is_hyperbolic([3, 3, 3]));
        assert!(is_hyperbolic([2, 3, 7]));
        assert_eq!(genus(25, [5, 5, 5]).unwrap(), 6);
        assert_eq!(genus(5, [5, 5, 5]).unwrap(), 2);
        assert_eq!(genus(168, [2, 3, 7]).unwrap(), 3);
        assert_eq!(genus(6, [2, 3, 6]).unwrap(), 1);
        assert!(matches!(genus(7, [2, 3, 7]), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn genus_two_iff_hyperbolic() {
        for spec in ["C5^2", "C5", "S5", "S4", "A4"] {
            let h = group(spec).unwrap();
            for t in enumerate_triples(&h, None) {
                let ty = triple_type(&h, t);
                assert_eq!(genus(h.order(), ty).unwrap() >= 2, is_hyperbolic(ty), "{spec} {t:?}");
            }
        }
    }

    #[test]
    fn stabilizer_set_of_the_standard_triple() {
        let g = group("C5^2").unwrap();
        let e1 = g.element_from_vector(&[1, 0]).unwrap();
        let e2 = g.element_from_vector(&[0, 1]).unwrap();
        let c = g.element_from_vector(&[4, 4]).unwrap();
        let sigma = stabilizer_set(&g, [e1, e2, c]);
        assert_eq!(sigma.count_ones(..), 13);
        let lines = [g.closure(&[e1]), g.closure(&[e2]), g.closure(&[c])];
        for x in 0..25 {
            assert_eq!(sigma.contains(x), lines.iter().any(|l| l.contains(x)));
        }
    }

    #[test]
    fn stabilizer_sets_are_conjugation_invariant() {
        let h = group("S5").unwrap();
        for t in enumerate_triples(&h, Some(TypeFilter::Ordered([2, 5, 4]))).into_iter().take(50) {
            let sigma = stabilizer_set(&h, t);
            for &g in h.generators() {
                for x in sigma.ones() {
                    assert!(sigma.contains(h.conj(g, x as Elem) as usize));
                }
            }
        }
    }

    #[test]
    fn lifted_sets_are_preimages() {
        let g = group("C5^2").unwrap();
        let e2 = g.element_from_vector(&[0, 1]).unwrap();
        let e1 = g.element_from_vector(&[1, 0]).unwrap();
        let q = quotient(&g, &subgroup_generated(&g, &[e2]).unwrap()).unwrap();
        let x = q.project(e1);
        let lifted = lift_stabilizer(&q, [x, x, q.group.pow(x, 3)]);
        assert_eq!(lifted.stabilizer.count_ones(..), 5);
        assert_eq!(lifted.lifted.count_ones(..), 25);

        let trivial = quotient(&g, &subgroup_generated(&g, &[]).unwrap()).unwrap();
        let t = [e1, e2, g.element_from_vector(&[4, 4]).unwrap()];
        let lifted = lift_stabilizer(&trivial, t);
        assert_eq!(lifted.lifted, stabilizer_set(&g, t));
    }

    #[test]
    fn invalid_triples_are_rejected() {
        let g = group("C5^2").unwrap();
        let e1 = g.element_from_vector(&[1, 0]).unwrap();
        assert!(GeneratingTriple::new(&g, [e1, e1, g.pow(e1, 3)]).is_err());
        assert!(matches!(GeneratingTriple::new(&g, [e1, 99, 0]), Err(Error::Input(_))));
        let ok = GeneratingTriple::new(&g, [e1, 5, g.element_from_vector(&[4, 4]).unwrap()]).unwrap();
        assert_eq!((ok.ty, ok.genus), ([5, 5, 5], 6));
        assert!(ok.is_hyperbolic());
    }
}
