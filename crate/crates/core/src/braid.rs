//! The action of the braid group `B3` on generating triples, and its
//! combination with `Aut(H)`.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::dsu::UnionFind;
use crate::group::FiniteGroup;
use crate::morphisms::{extend_hom, AutomorphismGroup, GroupHom};
use crate::par;
use crate::triples::{enumerate_triples, genus, sorted, triple_type, Triple, TripleType, TypeFilter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BraidMove {
    Sigma1,
    Sigma2,
    Sigma1Inv,
    Sigma2Inv,
}

impl BraidMove {
    pub const ALL: [BraidMove; 4] = [BraidMove::Sigma1, BraidMove::Sigma2, BraidMove::Sigma1Inv, BraidMove::Sigma2Inv];

    pub fn inverse(self) -> BraidMove {
        match self {
            BraidMove::Sigma1 => BraidMove::Sigma1Inv,
            BraidMove::Sigma2 => BraidMove::Sigma2Inv,
            BraidMove::Sigma1Inv => BraidMove::Sigma1,
            BraidMove::Sigma2Inv => BraidMove::Sigma2,
        }
    }
}

/// `σ1: [a,b,c] ↦ [aba⁻¹, a, c]`, `σ2: [a,b,c] ↦ [a, bcb⁻¹, b]` and their inverses.
pub fn apply_braid(h: &FiniteGroup, mv: BraidMove, [a, b, c]: Triple) -> Triple {
    match mv {
        BraidMove::Sigma1 => [h.conj(a, b), a, c],
        BraidMove::Sigma2 => [a, h.conj(b, c), b],
        BraidMove::Sigma1Inv => [b, h.conj(h.inv(b), a), c],
        BraidMove::Sigma2Inv => [a, c, h.conj(h.inv(c), b)],
    }
}

pub fn apply_aut(phi: &GroupHom, t: Triple) -> Triple {
    t.map(|x| phi.apply(x))
}

/// The `B3`-orbit of `t`, in breadth-first order starting at `t`.
pub fn braid_orbit(h: &FiniteGroup, t: Triple) -> Vec<Triple> {
    let mut seen = HashSet::from([t]);
    let mut orbit = vec![t];
    let mut queue = VecDeque::from([t]);
    while let Some(x) = queue.pop_front() {
        for mv in BraidMove::ALL {
            let y = apply_braid(h, mv, x);
            if seen.insert(y) {
                orbit.push(y);
                queue.push_back(y);
            }
        }
    }
    orbit
}

/// `BAut(H, S)`: automorphisms `φ` with `φ(S)` in the braid orbit of `S`.
///
/// An automorphism is determined by the images of `a` and `b`, so every
/// orbit member `T` contributes at most one `φ` with `φ(S) = T`.
pub fn braid_type_automorphisms(h: &FiniteGroup, s: Triple) -> Vec<GroupHom> {
    let orbit = braid_orbit(h, s);
    let mut out: Vec<GroupHom> = orbit
        .iter()
        .filter_map(|t| extend_hom(h, h, &[s[0], s[1]], &[t[0], t[1]]))
        .map(GroupHom::new)
        .filter(|phi| phi.is_bijective())
        .collect();
    out.sort();
    out
}

pub struct BraidOrbit {
    /// Indices into [`ClassTable::triples`].
    pub members: Vec<u32>,
    /// Least triple of the orbit.
    pub key: Triple,
}

/// One `Aut(H) × B3` orbit of generating triples.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitClass {
    /// Least triple of the whole orbit; also the canonical key.
    pub representative: Triple,
    #[serde(rename = "type")]
    pub ty: TripleType,
    pub genus: u64,
    /// Size of the `B3`-orbit of the representative.
    pub braid_orbit_size: usize,
    /// Number of triples in the `Aut(H) × B3` orbit.
    pub orbit_size: usize,
    /// Ids of the braid orbits making up this class.
    #[serde(skip)]
    pub braid_orbits: Vec<u32>,
}

/// All generating triples of a group, partitioned into braid orbits and
/// `Aut × B3` classes.
pub struct ClassTable {
    order: usize,
    pub triples: Vec<Triple>,
    pair_index: Vec<u32>,
    pub braid_of: Vec<u32>,
    pub braid_orbits: Vec<BraidOrbit>,
    pub class_of_braid: Vec<u32>,
    pub classes: Vec<OrbitClass>,
}

impl ClassTable {
    /// Partitions the triples of `h` whose type is a reordering of `ty` (all triples when `None`).
    ///
    /// Braid orbits come from a union-find over `σ1`, `σ2` images computed in
    /// parallel; classes merge braid orbits along the generators of `aut`.
    pub fn new(h: &FiniteGroup, aut: &AutomorphismGroup, ty: Option<TripleType>) -> Self {
        let triples = enumerate_triples(h, ty.map(TypeFilter::Multiset));
        Self::from_triples(h, aut, triples)
    }

    /// Like [`ClassTable::new`], keeping only hyperbolic types.
    pub fn hyperbolic(h: &FiniteGroup, aut: &AutomorphismGroup) -> Self {
        let triples = enumerate_triples(h, None)
            .into_iter()
            .filter(|&t| crate::triples::is_hyperbolic(triple_type(h, t)))
            .collect();
        Self::from_triples(h, aut, triples)
    }

    fn from_triples(h: &FiniteGroup, aut: &AutomorphismGroup, triples: Vec<Triple>) -> Self {
        let order = h.order();
        let mut pair_index = vec![u32::MAX; order * order];
        for (i, t) in triples.iter().enumerate() {
            pair_index[t[0] as usize * order + t[1] as usize] = i as u32;
        }
        let lookup = |t: Triple| -> u32 {
            let i = pair_index[t[0] as usize * order + t[1] as usize];
            assert!(i != u32::MAX, "triple set is not closed under the action");
            i
        };
        let moves: Vec<[u32; 2]> = par::map(&triples, |&t| {
            [lookup(apply_braid(h, BraidMove::Sigma1, t)), lookup(apply_braid(h, BraidMove::Sigma2, t))]
        });
        let mut braid_uf = UnionFind::new(triples.len());
        for (i, m) in moves.iter().enumerate() {
            braid_uf.union(i, m[0] as usize);
            braid_uf.union(i, m[1] as usize);
        }
        let braid_min = braid_uf.class_minima();
        let mut braid_id = vec![u32::MAX; triples.len()];
        let mut braid_orbits: Vec<BraidOrbit> = Vec::new();
        let mut braid_of = vec![0u32; triples.len()];
        for i in 0..triples.len() {
            let root = braid_min[i] as usize;
            if braid_id[root] == u32::MAX {
                braid_id[root] = braid_orbits.len() as u32;
                braid_orbits.push(BraidOrbit { members: Vec::new(), key: triples[root] });
            }
            braid_of[i] = braid_id[root];
            braid_orbits[braid_id[root] as usize].members.push(i as u32);
        }
        let aut_images: Vec<Vec<u32>> =
            par::map(&braid_orbits, |o| aut.generators().iter().map(|phi| lookup(apply_aut(phi, o.key))).collect());
        let mut class_uf = UnionFind::new(braid_orbits.len());
        for (b, images) in aut_images.iter().enumerate() {
            for &t in images {
                class_uf.union(b, braid_of[t as usize] as usize);
            }
        }
        let class_min = class_uf.class_minima();
        let mut class_id = vec![u32::MAX; braid_orbits.len()];
        let mut classes: Vec<OrbitClass> = Vec::new();
        let mut class_of_braid = vec![0u32; braid_orbits.len()];
        for b in 0..braid_orbits.len() {
            let root = class_min[b] as usize;
            if class_id[root] == u32::MAX {
                class_id[root] = classes.len() as u32;
                let rep = braid_orbits[root].key;
                let ty = triple_type(h, rep);
                classes.push(OrbitClass {
                    representative: rep,
                    ty,
                    genus: genus(order, ty).expect("genuine triples satisfy Hurwitz"),
                    braid_orbit_size: braid_orbits[root].members.len(),
                    orbit_size: 0,
                    braid_orbits: Vec::new(),
                });
            }
            let c = class_id[root];
            class_of_braid[b] = c;
            classes[c as usize].orbit_size += braid_orbits[b].members.len();
            classes[c as usize].braid_orbits.push(b as u32);
        }
        ClassTable { order, triples, pair_index, braid_of, braid_orbits, class_of_braid, classes }
    }

    pub fn index_of(&self, t: Triple) -> Option<u32> {
        let i = *self.pair_index.get(t[0] as usize * self.order + t[1] as usize)?;
        (i != u32::MAX && self.triples[i as usize][2] == t[2]).then_some(i)
    }

    /// Braid-orbit id of `t`, if `t` is one of the tabulated triples.
    pub fn braid_id(&self, t: Triple) -> Option<u32> {
        self.index_of(t).map(|i| self.braid_of[i as usize])
    }

    pub fn class_id(&self, t: Triple) -> Option<u32> {
        self.braid_id(t).map(|b| self.class_of_braid[b as usize])
    }

    /// Classes whose sorted type is `ty`.
    pub fn classes_of_type(&self, ty: TripleType) -> Vec<u32> {
        (0..self.classes.len() as u32).filter(|&c| sorted(self.classes[c as usize].ty) == sorted(ty)).collect()
    }
}

/// A standalone `Aut(H) × B3` classification, as reported by the `orbits` command.
pub fn orbit_classes(h: &FiniteGroup, aut: &AutomorphismGroup, ty: Option<TripleType>) -> Vec<OrbitClass> {
    ClassTable::new(h, aut, ty).classes
}
