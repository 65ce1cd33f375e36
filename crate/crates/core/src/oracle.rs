//! Brute-force enumeration of Beauville structures and their orbit partition.
//!
//! Shares only group arithmetic, quotients and automorphism enumeration with
//! the fiber route in [`crate::beauville`]: triples are scanned directly,
//! every ordered kernel tuple and every tuple of braid orbits is visited, and
//! orbits are found by union-find over canonical forms under the full action.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;

use crate::beauville::{cell_key, CellKey, Constraints, KernelPolicy};
use crate::braid::{apply_aut, braid_orbit};
use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::group::{quotient, FiniteGroup, QuotientGroup, Subgroup};
use crate::invariants::compute_invariants;
use crate::limits::Limits;
use crate::morphisms::{all_automorphisms, automorphism_group, induced_quotient_iso, GroupHom};
use crate::par;
use crate::triples::{genus, sorted, stabilizer_set, triple_type, Triple, TripleType};

/// Which structures the oracle enumerates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleScope {
    /// Every admissible kernel tuple allowed by the constraints, under all of `Aut(G)`.
    Full,
    /// Structures whose kernel multiset is exactly this tuple of normal subgroups,
    /// under the automorphisms preserving that multiset.
    FixedKernels(Vec<Subgroup>),
}

/// Coordinate of a canonical form: kernel position in the oracle's own list and the least triple of a braid orbit.
type Coord = (usize, Triple);

pub struct OracleResult {
    /// Least canonical form of every orbit, in ascending order.
    pub representatives: Vec<Vec<Coord>>,
    pub kernels: Vec<Subgroup>,
    /// Orbit counts keyed by the sorted kernel orders and the sorted type multiset.
    pub cells: BTreeMap<(Vec<usize>, Vec<TripleType>), usize>,
    /// Canonical form → orbit index.
    orbit_of: HashMap<Vec<Coord>, usize>,
    braid_keys: Vec<HashMap<Triple, Triple>>,
}

impl OracleResult {
    pub fn total(&self) -> usize {
        self.representatives.len()
    }

    /// Orbit containing a structure given by kernels and triples; `None` if it is not among the enumerated structures.
    pub fn orbit_of(&self, kernels: &[Subgroup], triples: &[Triple]) -> Option<usize> {
        let mut form = Vec::with_capacity(kernels.len());
        for (k, t) in kernels.iter().zip(triples) {
            let ki = self.kernels.iter().position(|s| s.set() == k.set())?;
            form.push((ki, *self.braid_keys[ki].get(t)?));
        }
        form.sort_unstable();
        self.orbit_of.get(&form).copied()
    }
}

/// Every admissible kernel, its quotient, hyperbolic triples and braid-orbit keys.
struct KernelData {
    quotient: QuotientGroup,
    /// Triple → least member of its braid orbit.
    keys: HashMap<Triple, Triple>,
    /// Braid-orbit keys with their lifted stabilizer sets.
    orbits: Vec<(Triple, FixedBitSet)>,
}

fn hyperbolic_triples(h: &FiniteGroup) -> Vec<Triple> {
    let mut out = Vec::new();
    for a in 1..h.order() as u32 {
        for b in 1..h.order() as u32 {
            let c = h.inv(h.mul(a, b));
            if c == 0 {
                continue;
            }
            let t = [a, b, c];
            let ty = triple_type(h, t);
            let (x, y, z) = (ty[0] as u64, ty[1] as u64, ty[2] as u64);
            if x * y + y * z + x * z >= x * y * z {
                continue;
            }
            if h.closure(&[a, b]).count_ones(..) == h.order() {
                out.push(t);
            }
        }
    }
    out
}

fn kernel_data(g: &FiniteGroup, kernel: Subgroup) -> KernelData {
    let q = quotient(g, &kernel).expect("normal");
    let mut keys: HashMap<Triple, Triple> = HashMap::new();
    let mut orbits = Vec::new();
    for t in hyperbolic_triples(&q.group) {
        if keys.contains_key(&t) {
            continue;
        }
        let orbit = braid_orbit(&q.group, t);
        let key = *orbit.iter().min().expect("nonempty");
        for u in orbit {
            keys.insert(u, key);
        }
        orbits.push((key, q.preimage(&stabilizer_set(&q.group, key))));
    }
    KernelData { quotient: q, keys, orbits }
}

/// Normal subgroups as joins of normal closures of single elements, iterated to a fixed point.
fn normal_subgroups_naive(g: &FiniteGroup) -> Vec<Subgroup> {
    let n = g.order();
    let is_normal = |s: &FixedBitSet| {
        s.ones().all(|x| g.elements().all(|y| s.contains(g.conj(y, x as u32) as usize)))
    };
    let mut found: Vec<FixedBitSet> = Vec::new();
    let push = |s: FixedBitSet, found: &mut Vec<FixedBitSet>| {
        if !found.contains(&s) {
            found.push(s);
        }
    };
    for a in 0..n as u32 {
        // Normal closure of a single element.
        let class: Vec<u32> = g.elements().map(|y| g.conj(y, a)).collect();
        push(g.closure(&class), &mut found);
    }
    loop {
        let before = found.len();
        let snapshot = found.clone();
        for x in &snapshot {
            for y in &snapshot {
                let gens: Vec<u32> = x.ones().chain(y.ones()).map(|e| e as u32).collect();
                let s = g.closure(&gens);
                debug_assert!(is_normal(&s));
                push(s, &mut found);
            }
        }
        if found.len() == before {
            break;
        }
    }
    found.sort_by_key(|s| (s.count_ones(..), s.ones().collect::<Vec<_>>()));
    found.into_iter().map(Subgroup::from_set).collect()
}

fn minimal(kernels: &[&Subgroup]) -> bool {
    (0..kernels.len()).all(|skip| {
        let mut acc: Option<FixedBitSet> = None;
        for (j, k) in kernels.iter().enumerate() {
            if j != skip {
                let mut s = k.set().clone();
                if let Some(a) = &acc {
                    s.intersect_with(a);
                }
                acc = Some(s);
            }
        }
        acc.is_some_and(|a| a.count_ones(..) == 1)
    })
}

/// Enumerates `𝒰ℬ_n(G)` under `constraints` and partitions it into orbits.
pub fn oracle_classify(g: &FiniteGroup, n: usize, constraints: &Constraints, scope: &OracleScope, limits: &Limits) -> Result<OracleResult> {
    if n < 2 {
        return Err(Error::Input(format!("structures need n ≥ 2, got n = {n}")));
    }
    let all_normal = normal_subgroups_naive(g);
    let (kernels, automorphisms): (Vec<Subgroup>, Vec<GroupHom>) = match scope {
        OracleScope::Full => {
            let kernels = match &constraints.kernels {
                KernelPolicy::Trivial => all_normal.into_iter().filter(|s| s.is_trivial()).collect(),
                KernelPolicy::All => all_normal,
                KernelPolicy::Explicit(_) => {
                    return Err(Error::Input("explicit kernels need the fixed-kernel oracle scope".into()))
                }
            };
            (kernels, all_automorphisms(g, limits)?)
        }
        OracleScope::FixedKernels(fixed) => {
            if fixed.len() != n {
                return Err(Error::Input("fixed kernel tuple has the wrong length".into()));
            }
            let mut distinct: Vec<Subgroup> = Vec::new();
            for k in fixed {
                if !distinct.iter().any(|d| d.set() == k.set()) {
                    distinct.push(k.clone());
                }
            }
            // Filter every automorphism for those permuting the fixed kernels.
            let mut keep = Vec::new();
            automorphism_group(g).for_each(|h| {
                if distinct.iter().all(|k| {
                    let img = h.image_set(k, g.order());
                    distinct.iter().any(|d| *d.set() == img)
                }) {
                    keep.push(h.clone());
                }
            });
            (distinct, keep)
        }
    };
    let gens = greedy_generators(g.order(), &automorphisms);
    let data: Vec<KernelData> = par::map(&kernels, |k| kernel_data(g, k.clone()));

    // All admissible ordered kernel tuples allowed in this scope.
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    let m = kernels.len();
    let mut idx = vec![0usize; n];
    if m > 0 {
        loop {
            let ks: Vec<&Subgroup> = idx.iter().map(|&i| &kernels[i]).collect();
            let in_scope = match scope {
                OracleScope::Full => true,
                OracleScope::FixedKernels(fixed) => {
                    let mut want: Vec<usize> = fixed.iter().map(|k| kernels.iter().position(|d| d.set() == k.set()).unwrap()).collect();
                    let mut have = idx.clone();
                    want.sort_unstable();
                    have.sort_unstable();
                    want == have
                }
            };
            if in_scope && minimal(&ks) && !data_empty(&data, &idx) {
                tuples.push(idx.clone());
            }
            let Some(p) = (0..n).rev().find(|&p| idx[p] + 1 < m) else { break };
            idx[p] += 1;
            for q in idx.iter_mut().skip(p + 1) {
                *q = 0;
            }
        }
    }
    let type_key = constraints.types.as_ref().map(|ts| {
        let mut v: Vec<TripleType> = ts.iter().map(|&t| sorted(t)).collect();
        v.sort_unstable();
        v
    });
    let order = g.order() as u64;

    // Free structures as canonical forms.
    let forms: Vec<Vec<Vec<Coord>>> = par::map(&tuples, |tuple| {
        let radix: Vec<usize> = tuple.iter().map(|&k| data[k].orbits.len()).collect();
        let total: usize = radix.iter().product();
        let mut out = Vec::new();
        let mut digits = vec![0usize; n];
        for _ in 0..total {
            let coords: Vec<(usize, &(Triple, FixedBitSet))> =
                tuple.iter().zip(&digits).map(|(&k, &d)| (k, &data[k].orbits[d])).collect();
            let mut acc = coords[0].1 .1.clone();
            for c in &coords[1..] {
                acc.intersect_with(&c.1 .1);
            }
            let keep = acc.count_ones(..) == 1 && {
                let types: Vec<TripleType> =
                    coords.iter().map(|(k, o)| triple_type(&data[*k].quotient.group, o.0)).collect();
                let type_ok = type_key.as_ref().is_none_or(|key| {
                    let mut ts: Vec<TripleType> = types.iter().map(|&t| sorted(t)).collect();
                    ts.sort_unstable();
                    &ts == key
                });
                let chi_ok = constraints.chi.is_none_or(|chi| {
                    let genera: Vec<u64> = coords
                        .iter()
                        .zip(&types)
                        .map(|((k, _), &t)| genus(data[*k].quotient.group.order(), t).expect("genuine triple"))
                        .collect();
                    compute_invariants(order, &genera).is_ok_and(|inv| inv.chi == chi)
                });
                type_ok && chi_ok
            };
            if keep {
                let mut form: Vec<Coord> = coords.iter().map(|(k, o)| (*k, o.0)).collect();
                form.sort_unstable();
                out.push(form);
            }
            for (d, &r) in digits.iter_mut().zip(&radix) {
                *d += 1;
                if *d < r {
                    break;
                }
                *d = 0;
            }
        }
        out
    });
    let mut all: Vec<Vec<Coord>> = forms.into_iter().flatten().collect();
    all.sort_unstable();
    all.dedup();
    if all.len() > limits.max_points {
        return Err(Error::Resource(format!("{} structures exceed the point limit", all.len())));
    }
    let index: HashMap<Vec<Coord>, usize> = all.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();

    // Kernel permutation and induced quotient maps of every generator.
    let kernel_perm: Vec<Vec<usize>> = gens
        .iter()
        .map(|h| {
            kernels
                .iter()
                .map(|k| {
                    let img = h.image_set(k, g.order());
                    kernels.iter().position(|d| *d.set() == img).expect("scope is invariant")
                })
                .collect()
        })
        .collect();
    let induced: Vec<Vec<GroupHom>> = gens
        .iter()
        .zip(&kernel_perm)
        .map(|(h, perm)| {
            (0..kernels.len())
                .map(|k| induced_quotient_iso(h, &data[k].quotient, &data[perm[k]].quotient).expect("image quotient"))
                .collect()
        })
        .collect();
    let mut uf = UnionFind::new(all.len());
    for (gi, perm) in kernel_perm.iter().enumerate() {
        let images: Vec<usize> = par::map(&all, |form| {
            let mut img: Vec<Coord> = form
                .iter()
                .map(|&(k, t)| {
                    let j = perm[k];
                    let u = apply_aut(&induced[gi][k], t);
                    (j, data[j].keys[&u])
                })
                .collect();
            img.sort_unstable();
            index[&img]
        });
        for (i, j) in images.into_iter().enumerate() {
            uf.union(i, j);
        }
    }
    let minima = uf.class_minima();
    let mut orbit_number = HashMap::new();
    let mut representatives = Vec::new();
    let mut cells = BTreeMap::new();
    for (i, form) in all.iter().enumerate() {
        if minima[i] as usize == i {
            orbit_number.insert(i, representatives.len());
            representatives.push(form.clone());
            let ks: Vec<usize> = form.iter().map(|c| kernels[c.0].order()).collect();
            let types: Vec<TripleType> = form.iter().map(|&(k, t)| triple_type(&data[k].quotient.group, t)).collect();
            let mut ks_sorted = ks;
            ks_sorted.sort_unstable();
            let key: CellKey = cell_key(&ks_sorted, &types);
            *cells.entry(key).or_insert(0) += 1;
        }
    }
    let orbit_of = all.iter().enumerate().map(|(i, f)| (f.clone(), orbit_number[&(minima[i] as usize)])).collect();
    let braid_keys = data.into_iter().map(|d| d.keys).collect();
    Ok(OracleResult { representatives, kernels, cells, orbit_of, braid_keys })
}

fn data_empty(data: &[KernelData], idx: &[usize]) -> bool {
    idx.iter().any(|&k| data[k].orbits.is_empty())
}

/// A subset of `elements` generating the same group, chosen greedily by closure.
fn greedy_generators(degree: usize, elements: &[GroupHom]) -> Vec<GroupHom> {
    let mut gens: Vec<GroupHom> = Vec::new();
    let mut closure: std::collections::HashSet<GroupHom> = std::collections::HashSet::from([GroupHom::identity(degree)]);
    for e in elements {
        if closure.contains(e) {
            continue;
        }
        gens.push(e.clone());
        let mut queue: Vec<GroupHom> = closure.iter().cloned().collect();
        while let Some(x) = queue.pop() {
            for s in &gens {
                let y = s.compose(&x);
                if closure.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beauville::Context;
    use crate::catalog::group;
    use crate::morphisms::NormalLattice;

    #[test]
    fn naive_normal_subgroups_match_the_lattice() {
        for spec in ["C5^2", "S4", "D6", "Q2", "C2^3"] {
            let g = group(spec).unwrap();
            let lattice = NormalLattice::new(&g);
            let naive = normal_subgroups_naive(&g);
            assert_eq!(naive.len(), lattice.len(), "{spec}");
            for s in &naive {
                assert!(lattice.index_of(s.set()).is_some());
            }
        }
    }

    #[test]
    fn surfaces_on_z5_squared_agree() {
        let g = group("C5^2").unwrap();
        let ctx = Context::new(&g, Limits::default());
        let fiber = ctx.classify(2, &Constraints::default()).unwrap();
        let oracle = oracle_classify(&g, 2, &Constraints::default(), &OracleScope::Full, &Limits::default()).unwrap();
        assert_eq!(fiber.total(), oracle.total());
        let mut hit = vec![false; oracle.total()];
        for c in &fiber.classes {
            let ks: Vec<Subgroup> = c.structure.kernels.iter().map(|&k| ctx.lattice().get(k).clone()).collect();
            let o = oracle.orbit_of(&ks, &c.structure.triples).expect("reported class is enumerated");
            assert!(!hit[o]);
            hit[o] = true;
        }
    }
}
