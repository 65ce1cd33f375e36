//! Homomorphisms, automorphism groups and the action of `Aut(G)` on kernel tuples.
//!
//! Automorphisms are stored as element maps. Because they are determined by
//! the images of a generating set `b_1, …, b_k` of `G`, a group of
//! automorphisms is kept as a stabilizer chain with base `(b_1, …, b_k)`:
//! level `i` holds the orbit of `b_i` under the automorphisms fixing
//! `b_1, …, b_{i-1}`. Groups like `Aut(ℤ_5³) ≅ GL(3,5)` (about 1.5 million
//! elements) never need to be listed.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;

use fixedbitset::FixedBitSet;
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{normal_subgroups, quotient, Elem, FiniteGroup, QuotientGroup, Subgroup};
use crate::limits::Limits;
use crate::par;

const NONE: u32 = u32::MAX;

/// A total map between the element sets of two groups.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupHom {
    images: Vec<Elem>,
}

impl std::fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GroupHom{:?}", self.images)
    }
}

impl GroupHom {
    pub fn new(images: Vec<Elem>) -> Self {
        GroupHom { images }
    }

    pub fn identity(order: usize) -> Self {
        GroupHom { images: (0..order as Elem).collect() }
    }

    pub fn images(&self) -> &[Elem] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.images[x as usize]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &GroupHom) -> GroupHom {
        GroupHom { images: other.images.iter().map(|&x| self.images[x as usize]).collect() }
    }

    /// Inverse of a bijective map.
    pub fn inverse(&self) -> GroupHom {
        let mut inv = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y as usize] = x as Elem;
        }
        GroupHom { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x as Elem == y)
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = FixedBitSet::with_capacity(self.images.len());
        self.images.iter().all(|&y| (y as usize) < self.images.len() && !seen.put(y as usize))
    }

    /// Checks `f(xy) = f(x)f(y)`: exhaustively up to order 256, on 10⁵ seeded samples above.
    pub fn is_homomorphism(&self, src: &FiniteGroup, tgt: &FiniteGroup) -> bool {
        if self.images.len() != src.order() || self.images.first() != Some(&0) {
            return false;
        }
        if self.images.iter().any(|&y| y as usize >= tgt.order()) {
            return false;
        }
        let ok = |x: Elem, y: Elem| self.apply(src.mul(x, y)) == tgt.mul(self.apply(x), self.apply(y));
        if src.order() <= 256 {
            src.elements().all(|x| src.elements().all(|y| ok(x, y)))
        } else {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6a09_e667);
            let n = src.order() as Elem;
            (0..100_000).all(|_| ok(rng.gen_range(0..n), rng.gen_range(0..n)))
        }
    }

    /// Image of a subgroup as a bitset over the target.
    pub fn image_set(&self, sub: &Subgroup, target_order: usize) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(target_order);
        for &x in sub.members() {
            set.insert(self.apply(x) as usize);
        }
        set
    }
}

/// Extends `gens[i] ↦ images[i]` to a homomorphism `src → tgt`.
///
/// Returns `None` if the assignment is inconsistent with the relations of
/// `src` or if `gens` does not generate `src`. Consistency is checked on every
/// edge of the Cayley graph, which is equivalent to the homomorphism property.
pub fn extend_hom(src: &FiniteGroup, tgt: &FiniteGroup, gens: &[Elem], images: &[Elem]) -> Option<Vec<Elem>> {
    debug_assert_eq!(gens.len(), images.len());
    let mut map = vec![NONE; src.order()];
    map[0] = 0;
    let mut queue = VecDeque::from([0 as Elem]);
    while let Some(x) = queue.pop_front() {
        let fx = map[x as usize];
        for (&s, &t) in gens.iter().zip(images) {
            let y = src.mul(x, s);
            let fy = tgt.mul(fx, t);
            match map[y as usize] {
                NONE => {
                    map[y as usize] = fy;
                    queue.push_back(y);
                }
                v if v != fy => return None,
                _ => {}
            }
        }
    }
    if map.contains(&NONE) {
        return None;
    }
    Some(map)
}

/// Injective extension on `⟨gens⟩ ≤ src` into `tgt`; the map is left in `map` (unset entries are `NONE`).
fn extend_injective(
    src: &FiniteGroup,
    tgt: &FiniteGroup,
    gens: &[Elem],
    images: &[Elem],
    map: &mut [u32],
    hit: &mut FixedBitSet,
) -> bool {
    map.fill(NONE);
    hit.clear();
    map[0] = 0;
    hit.insert(0);
    let mut queue = VecDeque::from([0 as Elem]);
    while let Some(x) = queue.pop_front() {
        let fx = map[x as usize];
        for (&s, &t) in gens.iter().zip(images) {
            let y = src.mul(x, s);
            let fy = tgt.mul(fx, t);
            match map[y as usize] {
                NONE => {
                    if hit.put(fy as usize) {
                        return false;
                    }
                    map[y as usize] = fy;
                    queue.push_back(y);
                }
                v if v != fy => return false,
                _ => {}
            }
        }
    }
    true
}

/// Backtracking search over images of a fixed generating set.
struct AutSearch<'a> {
    g: &'a FiniteGroup,
    base: Vec<Elem>,
    candidates: Vec<Vec<Elem>>,
}

impl<'a> AutSearch<'a> {
    fn new(g: &'a FiniteGroup) -> Self {
        let base = Subgroup::whole(g).generators(g);
        // Element order and conjugacy-class size are preserved by automorphisms.
        let candidates = base
            .iter()
            .map(|&b| {
                let (o, c) = (g.element_order(b), g.class_size(b));
                g.elements().filter(|&y| g.element_order(y) == o && g.class_size(y) == c).collect()
            })
            .collect();
        AutSearch { g, base, candidates }
    }

    /// Depth-first completion of `images` (a prefix of base images). Calls
    /// `visit` for every automorphism found; stops when `visit` returns false.
    fn complete(&self, images: &mut Vec<Elem>, map: &mut Vec<u32>, hit: &mut FixedBitSet, visit: &mut dyn FnMut(&[u32]) -> bool) -> bool {
        let depth = images.len();
        if !extend_injective(self.g, self.g, &self.base[..depth], images, map, hit) {
            return true;
        }
        if depth == self.base.len() {
            return visit(map);
        }
        for &c in &self.candidates[depth] {
            images.push(c);
            let go_on = self.complete(images, map, hit, visit);
            images.pop();
            if !go_on {
                return false;
            }
        }
        true
    }

    fn find_one(&self, prefix: &[Elem]) -> Option<GroupHom> {
        let mut images = prefix.to_vec();
        let mut map = vec![NONE; self.g.order()];
        let mut hit = FixedBitSet::with_capacity(self.g.order());
        let mut found = None;
        self.complete(&mut images, &mut map, &mut hit, &mut |m| {
            found = Some(GroupHom::new(m.to_vec()));
            false
        });
        found
    }
}

/// An isomorphism `a → b`, if one exists.
///
/// Same backtracking as the automorphism search, with candidate images taken in `b`.
pub fn find_isomorphism(a: &FiniteGroup, b: &FiniteGroup) -> Option<GroupHom> {
    if a.order() != b.order() {
        return None;
    }
    let profile = |g: &FiniteGroup| {
        let mut v: Vec<(u32, usize)> = g.elements().map(|x| (g.element_order(x), g.class_size(x))).collect();
        v.sort_unstable();
        v
    };
    if profile(a) != profile(b) {
        return None;
    }
    let base = Subgroup::whole(a).generators(a);
    let candidates: Vec<Vec<Elem>> = base
        .iter()
        .map(|&x| {
            let (o, c) = (a.element_order(x), a.class_size(x));
            b.elements().filter(|&y| b.element_order(y) == o && b.class_size(y) == c).collect()
        })
        .collect();
    fn dfs(
        a: &FiniteGroup,
        b: &FiniteGroup,
        base: &[Elem],
        candidates: &[Vec<Elem>],
        images: &mut Vec<Elem>,
        map: &mut [u32],
        hit: &mut FixedBitSet,
    ) -> bool {
        let depth = images.len();
        if !extend_injective(a, b, &base[..depth], images, map, hit) {
            return false;
        }
        if depth == base.len() {
            return true;
        }
        for &c in &candidates[depth] {
            images.push(c);
            if dfs(a, b, base, candidates, images, map, hit) {
                return true;
            }
            images.pop();
        }
        false
    }
    let mut images = Vec::new();
    let mut map = vec![NONE; a.order()];
    let mut hit = FixedBitSet::with_capacity(b.order());
    dfs(a, b, &base, &candidates, &mut images, &mut map, &mut hit).then(|| GroupHom::new(map))
}

/// Every automorphism of `g` exactly once, sorted by image vector.
///
/// Candidate images of a greedy generating set are filtered by element order
/// and class size, extended with conflict detection, and kept when the
/// extension is bijective. The search is split over first-generator images.
pub fn all_automorphisms(g: &FiniteGroup, limits: &Limits) -> Result<Vec<GroupHom>> {
    let search = AutSearch::new(g);
    if search.base.is_empty() {
        return Ok(vec![GroupHom::identity(g.order())]);
    }
    let expected = automorphism_group(g).order();
    if expected > limits.max_automorphisms as u128 {
        return Err(Error::Resource(format!(
            "|Aut({})| = {expected} exceeds the enumeration bound {}",
            g.label(),
            limits.max_automorphisms
        )));
    }
    let mut all = par::flat_map(&search.candidates[0], |&first| {
        let mut out = Vec::new();
        let mut images = vec![first];
        let mut map = vec![NONE; g.order()];
        let mut hit = FixedBitSet::with_capacity(g.order());
        search.complete(&mut images, &mut map, &mut hit, &mut |m| {
            out.push(GroupHom::new(m.to_vec()));
            true
        });
        out
    });
    all.sort();
    Ok(all)
}

struct Level {
    orbit: Vec<Elem>,
    pos: Vec<u32>,
    reps: Vec<GroupHom>,
    inv_reps: Vec<GroupHom>,
}

impl Level {
    fn build(degree: usize, point: Elem, strong: &[GroupHom], gens: &[usize]) -> Level {
        let mut pos = vec![NONE; degree];
        pos[point as usize] = 0;
        let mut orbit = vec![point];
        let mut reps = vec![GroupHom::identity(degree)];
        let mut head = 0;
        while head < orbit.len() {
            let y = orbit[head];
            for &s in gens {
                let z = strong[s].apply(y);
                if pos[z as usize] == NONE {
                    pos[z as usize] = orbit.len() as u32;
                    orbit.push(z);
                    reps.push(strong[s].compose(&reps[head]));
                }
            }
            head += 1;
        }
        let inv_reps = reps.iter().map(GroupHom::inverse).collect();
        Level { orbit, pos, reps, inv_reps }
    }
}

/// A group of automorphisms of `G`, stored as a stabilizer chain.
pub struct AutomorphismGroup {
    degree: usize,
    base: Vec<Elem>,
    generators: Vec<GroupHom>,
    levels: Vec<Level>,
}

impl std::fmt::Debug for AutomorphismGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AutomorphismGroup")
            .field("order", &self.order())
            .field("generators", &self.generators.len())
            .finish()
    }
}

impl AutomorphismGroup {
    /// Schreier–Sims closure of `gens`, which must be automorphisms of a
    /// group of order `degree` generated by `base`.
    pub fn from_generators(degree: usize, base: &[Elem], gens: &[GroupHom]) -> Self {
        let mut strong: Vec<GroupHom> = Vec::new();
        for h in gens {
            if !h.is_identity() && !strong.contains(h) {
                strong.push(h.clone());
            }
        }
        let generators = strong.clone();
        let k = base.len();
        let fixes = |h: &GroupHom, i: usize| base[..i].iter().all(|&b| h.apply(b) == b);
        let mut level_gens: Vec<Vec<usize>> =
            (0..k).map(|i| (0..strong.len()).filter(|&s| fixes(&strong[s], i)).collect()).collect();
        let mut levels: Vec<Level> =
            (0..k).map(|i| Level::build(degree, base[i], &strong, &level_gens[i])).collect();
        let mut i = k;
        while i > 0 {
            let l = i - 1;
            levels[l] = Level::build(degree, base[l], &strong, &level_gens[l]);
            let mut restart = None;
            'scan: for oi in 0..levels[l].orbit.len() {
                let y = levels[l].orbit[oi];
                for &s in &level_gens[l] {
                    let z = strong[s].apply(y);
                    let zi = levels[l].pos[z as usize] as usize;
                    let h = levels[l].inv_reps[zi].compose(&strong[s].compose(&levels[l].reps[oi]));
                    if h.is_identity() {
                        continue;
                    }
                    if let Some((j, r)) = sift(&levels, base, h, l + 1) {
                        strong.push(r);
                        let id = strong.len() - 1;
                        for lg in level_gens.iter_mut().take(j + 1).skip(l + 1) {
                            lg.push(id);
                        }
                        restart = Some(j);
                        break 'scan;
                    }
                }
            }
            match restart {
                Some(j) => i = j + 1,
                None => i -= 1,
            }
        }
        AutomorphismGroup { degree, base: base.to_vec(), generators, levels }
    }

    pub fn trivial(g: &FiniteGroup) -> Self {
        let base = Subgroup::whole(g).generators(g);
        AutomorphismGroup::from_generators(g.order(), &base, &[])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> &[Elem] {
        &self.base
    }

    /// The generators the chain was built from.
    pub fn generators(&self) -> &[GroupHom] {
        &self.generators
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    /// Membership test for an automorphism of the base group.
    pub fn contains(&self, h: &GroupHom) -> bool {
        h.images.len() == self.degree && sift(&self.levels, &self.base, h.clone(), 0).is_none()
    }

    /// Calls `f` on every element, in a fixed order.
    pub fn for_each(&self, mut f: impl FnMut(&GroupHom)) {
        fn rec(levels: &[Level], acc: &GroupHom, f: &mut dyn FnMut(&GroupHom)) {
            match levels.split_first() {
                None => f(acc),
                Some((level, rest)) => {
                    for rep in &level.reps {
                        rec(rest, &acc.compose(rep), f);
                    }
                }
            }
        }
        rec(&self.levels, &GroupHom::identity(self.degree), &mut f);
    }

    /// All elements; fails when the group is larger than `limit`.
    pub fn elements(&self, limit: usize) -> Result<Vec<GroupHom>> {
        if self.order() > limit as u128 {
            return Err(Error::Resource(format!(
                "automorphism group of order {} exceeds the enumeration bound {limit}",
                self.order()
            )));
        }
        let mut out = Vec::with_capacity(self.order() as usize);
        self.for_each(|h| out.push(h.clone()));
        Ok(out)
    }

    /// A uniformly random element.
    pub fn random<R: Rng>(&self, rng: &mut R) -> GroupHom {
        let mut acc = GroupHom::identity(self.degree);
        for level in &self.levels {
            let rep = &level.reps[rng.gen_range(0..level.reps.len())];
            acc = acc.compose(rep);
        }
        acc
    }

    /// Stabilizer of `point` under an action of this group, with the orbit size.
    ///
    /// Schreier generators are added until the chain reaches `|A| / |orbit|`.
    pub fn stabilizer<P, F>(&self, point: P, act: F) -> (usize, AutomorphismGroup)
    where
        P: Clone + Eq + Hash,
        F: Fn(&GroupHom, &P) -> P,
    {
        let gens = &self.generators;
        let mut index: HashMap<P, usize> = HashMap::from([(point.clone(), 0)]);
        let mut points = vec![point];
        // Schreier vector: how each orbit point was reached.
        let mut parent: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX)];
        let mut edges: Vec<(usize, usize, usize)> = Vec::new();
        let mut head = 0;
        while head < points.len() {
            for (s, h) in gens.iter().enumerate() {
                let q = act(h, &points[head]);
                match index.get(&q) {
                    Some(&qi) => edges.push((head, s, qi)),
                    None => {
                        index.insert(q.clone(), points.len());
                        parent.push((head, s));
                        points.push(q);
                    }
                }
            }
            head += 1;
        }
        let orbit = points.len();
        let target = self.order() / orbit as u128;
        let word = |mut p: usize| {
            let mut u = GroupHom::identity(self.degree);
            while parent[p].0 != usize::MAX {
                let (pp, s) = parent[p];
                u = u.compose(&gens[s]);
                p = pp;
            }
            u
        };
        let mut stab_gens: Vec<GroupHom> = Vec::new();
        let mut chain = AutomorphismGroup::from_generators(self.degree, &self.base, &[]);
        for (p, s, q) in edges {
            if chain.order() == target {
                break;
            }
            // u_q⁻¹ · s · u_p fixes the start point.
            let h = word(q).inverse().compose(&gens[s].compose(&word(p)));
            if !chain.contains(&h) {
                stab_gens.push(h);
                chain = AutomorphismGroup::from_generators(self.degree, &self.base, &stab_gens);
            }
        }
        debug_assert_eq!(chain.order(), target);
        (orbit, chain)
    }
}

/// Sifts `h` through `levels[start..]`; returns the level where it leaves the chain and the residue.
fn sift(levels: &[Level], base: &[Elem], mut h: GroupHom, start: usize) -> Option<(usize, GroupHom)> {
    for (m, level) in levels.iter().enumerate().skip(start) {
        let y = h.apply(base[m]);
        let p = level.pos[y as usize];
        if p == NONE {
            return Some((m, h));
        }
        h = level.inv_reps[p as usize].compose(&h);
    }
    assert!(h.is_identity(), "an automorphism fixing a generating set is the identity");
    None
}

/// `Aut(G)` as a stabilizer chain.
///
/// Levels are filled from the deepest base point upwards; at each level only
/// candidate images outside the current orbit are searched, so every
/// successful search adds a new orbit point.
pub fn automorphism_group(g: &FiniteGroup) -> AutomorphismGroup {
    let search = AutSearch::new(g);
    let k = search.base.len();
    let mut gens: Vec<GroupHom> = Vec::new();
    for i in (0..k).rev() {
        let mut orbit = orbit_of(g.order(), search.base[i], &gens);
        for &y in &search.candidates[i] {
            if orbit.contains(y as usize) {
                continue;
            }
            let mut prefix = search.base[..i].to_vec();
            prefix.push(y);
            if let Some(phi) = search.find_one(&prefix) {
                gens.push(phi);
                orbit = orbit_of(g.order(), search.base[i], &gens);
            }
        }
    }
    AutomorphismGroup::from_generators(g.order(), &search.base, &gens)
}

fn orbit_of(degree: usize, point: Elem, gens: &[GroupHom]) -> FixedBitSet {
    let mut seen = FixedBitSet::with_capacity(degree);
    seen.insert(point as usize);
    let mut queue = VecDeque::from([point]);
    while let Some(y) = queue.pop_front() {
        for h in gens {
            let z = h.apply(y);
            if !seen.put(z as usize) {
                queue.push_back(z);
            }
        }
    }
    seen
}

/// The isomorphism `G/K → G/α(K)` induced by `α`; `to` must be the quotient by `α(K)`.
pub fn induced_quotient_iso(alpha: &GroupHom, from: &QuotientGroup, to: &QuotientGroup) -> Result<GroupHom> {
    let degree = from.projection.len();
    if alpha.image_set(&from.kernel, degree) != *to.kernel.set() {
        return Err(Error::Contract("target quotient is not by the image of the kernel".into()));
    }
    Ok(GroupHom::new(from.representatives.iter().map(|&r| to.project(alpha.apply(r))).collect()))
}

/// `α(K)` as a subgroup.
pub fn image_subgroup(alpha: &GroupHom, k: &Subgroup) -> Subgroup {
    Subgroup::from_set(alpha.image_set(k, alpha.images().len()))
}

/// The normal subgroups of `G` with an index for lookups by member set.
#[derive(Debug)]
pub struct NormalLattice {
    subgroups: Vec<Subgroup>,
    index: HashMap<FixedBitSet, usize>,
}

impl NormalLattice {
    pub fn new(g: &FiniteGroup) -> Self {
        let subgroups = normal_subgroups(g);
        let index = subgroups.iter().enumerate().map(|(i, s)| (s.set().clone(), i)).collect();
        NormalLattice { subgroups, index }
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn get(&self, i: usize) -> &Subgroup {
        &self.subgroups[i]
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn index_of(&self, set: &FixedBitSet) -> Option<usize> {
        self.index.get(set).copied()
    }

    /// Index of `α(N_i)`.
    pub fn image(&self, alpha: &GroupHom, i: usize) -> usize {
        let set = alpha.image_set(&self.subgroups[i], alpha.images().len());
        self.index[&set]
    }

    /// The permutation of lattice indices induced by `α`.
    pub fn permutation(&self, alpha: &GroupHom) -> Vec<usize> {
        (0..self.subgroups.len()).map(|i| self.image(alpha, i)).collect()
    }
}

/// Minimality: for every `i`, the intersection of all kernels except `K_i` is trivial.
pub fn is_minimal(lattice: &NormalLattice, tuple: &[usize]) -> bool {
    (0..tuple.len()).all(|skip| {
        let mut acc: Option<FixedBitSet> = None;
        for (j, &k) in tuple.iter().enumerate() {
            if j == skip {
                continue;
            }
            let set = lattice.get(k).set();
            acc = Some(match acc {
                None => set.clone(),
                Some(mut a) => {
                    a.intersect_with(set);
                    a
                }
            });
        }
        // An empty intersection (n = 1) is the whole group.
        acc.is_some_and(|a| a.count_ones(..) == 1)
    })
}

/// One `Aut(G) × S_n` orbit of admissible kernel tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelOrbit {
    /// Lattice indices in ascending order, so equal kernels sit side by side.
    pub tuple: Vec<usize>,
    /// Number of kernel multisets in the orbit.
    pub orbit_size: usize,
}

/// Representatives of the admissible kernel tuples of length `n` modulo `Aut(G) × S_n`.
///
/// Each representative is the lexicographically least sorted tuple of its orbit.
pub fn kernel_tuple_orbits(lattice: &NormalLattice, aut: &AutomorphismGroup, n: usize) -> Vec<KernelOrbit> {
    let perms: Vec<Vec<usize>> = aut.generators().iter().map(|h| lattice.permutation(h)).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    let mut tuple = vec![0usize; n];
    loop {
        if !seen.contains(&tuple) && is_minimal(lattice, &tuple) {
            let mut orbit = vec![tuple.clone()];
            seen.insert(tuple.clone());
            let mut head = 0;
            while head < orbit.len() {
                for p in &perms {
                    let mut img: Vec<usize> = orbit[head].iter().map(|&k| p[k]).collect();
                    img.sort_unstable();
                    if seen.insert(img.clone()) {
                        orbit.push(img);
                    }
                }
                head += 1;
            }
            out.push(KernelOrbit { tuple: tuple.clone(), orbit_size: orbit.len() });
        }
        // Next non-decreasing tuple.
        let Some(i) = (0..n).rev().find(|&i| tuple[i] + 1 < lattice.len()) else { break };
        let v = tuple[i] + 1;
        for t in tuple.iter_mut().skip(i) {
            *t = v;
        }
    }
    out
}

/// How `Aut(G)` moves a fixed kernel tuple onto itself.
pub struct KernelStabilizer {
    /// Automorphisms mapping the kernel multiset to itself.
    pub multiset: AutomorphismGroup,
    /// Automorphisms fixing every kernel.
    pub ordered: AutomorphismGroup,
    /// One element `α` per coset of `ordered` in `multiset`, with the position
    /// map `τ` satisfying `α(K_i) = K_{τ(i)}`. The first entry is the identity.
    pub block_moves: Vec<(GroupHom, Vec<usize>)>,
}

/// Position permutation `τ` with `image[i] = tuple[τ(i)]`, matching equal entries in order.
pub fn position_map(tuple: &[usize], image: &[usize]) -> Vec<usize> {
    let mut used = vec![false; tuple.len()];
    image
        .iter()
        .map(|v| {
            let j = (0..tuple.len()).find(|&j| !used[j] && tuple[j] == *v).expect("image is a permutation of the tuple");
            used[j] = true;
            j
        })
        .collect()
}

pub fn kernel_stabilizer(lattice: &NormalLattice, aut: &AutomorphismGroup, tuple: &[usize]) -> KernelStabilizer {
    let sorted = |h: &GroupHom, t: &Vec<usize>| {
        let mut img: Vec<usize> = t.iter().map(|&k| lattice.image(h, k)).collect();
        img.sort_unstable();
        img
    };
    let (_, multiset) = aut.stabilizer(tuple.to_vec(), sorted);
    let ordered_action = |h: &GroupHom, t: &Vec<usize>| t.iter().map(|&k| lattice.image(h, k)).collect::<Vec<_>>();
    let (_, ordered) = multiset.stabilizer(tuple.to_vec(), ordered_action);
    // Coset representatives: one automorphism per reachable ordering of the tuple.
    let mut block_moves: Vec<(GroupHom, Vec<usize>)> = vec![(GroupHom::identity(aut.degree()), (0..tuple.len()).collect())];
    let mut seen: HashSet<Vec<usize>> = HashSet::from([tuple.to_vec()]);
    let mut head = 0;
    while head < block_moves.len() {
        for h in multiset.generators() {
            let alpha = h.compose(&block_moves[head].0);
            let img: Vec<usize> = tuple.iter().map(|&k| lattice.image(&alpha, k)).collect();
            if seen.insert(img.clone()) {
                let tau = position_map(tuple, &img);
                block_moves.push((alpha, tau));
            }
        }
        head += 1;
    }
    KernelStabilizer { multiset, ordered, block_moves }
}

/// Quotients of `G` by each lattice member, built on demand.
pub struct QuotientCache<'a> {
    g: &'a FiniteGroup,
    lattice: NormalLattice,
    quotients: Vec<std::sync::OnceLock<QuotientGroup>>,
}

impl<'a> QuotientCache<'a> {
    pub fn new(g: &'a FiniteGroup, lattice: NormalLattice) -> Self {
        let quotients = (0..lattice.len()).map(|_| std::sync::OnceLock::new()).collect();
        QuotientCache { g, lattice, quotients }
    }

    pub fn group(&self) -> &'a FiniteGroup {
        self.g
    }

    pub fn lattice(&self) -> &NormalLattice {
        &self.lattice
    }

    pub fn get(&self, i: usize) -> &QuotientGroup {
        self.quotients[i].get_or_init(|| {
            quotient(self.g, self.lattice.get(i)).expect("lattice members are normal")
        })
    }

    /// `ᾱ: G/N_i → G/α(N_i)` together with the target index.
    pub fn induced(&self, alpha: &GroupHom, i: usize) -> (usize, GroupHom) {
        let j = self.lattice.image(alpha, i);
        let map = induced_quotient_iso(alpha, self.get(i), self.get(j)).expect("target is the image quotient");
        (j, map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::group;

    #[test]
    fn isomorphism_search() {
        let iso = |a: &str, b: &str| find_isomorphism(&group(a).unwrap(), &group(b).unwrap());
        let phi = iso("C6", "C2 x C3").unwrap();
        assert!(phi.is_bijective() && phi.is_homomorphism(&group("C6").unwrap(), &group("C2 x C3").unwrap()));
        assert!(iso("D3", "S3").is_some());
        assert!(iso("C4", "C2^2").is_none());
        assert!(iso("Q2", "D4").is_none());
        assert!(iso("A4", "D6").is_none());
    }

    #[test]
    fn automorphism_counts() {
        for (spec, count) in [
            ("C1", 1u128),
            ("C2", 1),
            ("C5", 4),
            ("C5^2", 480),
            ("C2^3", 168),
            ("S3", 6),
            ("D4", 8),
            ("Q2", 24),
            ("S4", 24),
            ("A5", 120),
            ("S5", 120),
            ("PSL(2,7)", 336),
            ("He(3)", 432),
            ("C5^3", 1_488_000),
        ] {
            let g = group(spec).unwrap();
            assert_eq!(automorphism_group(&g).order(), count, "{spec}");
        }
    }

    #[test]
    fn enumeration_matches_the_chain() {
        let limits = Limits::default();
        for spec in ["C5^2", "S5", "D6", "Q2", "C2 x C4", "A4"] {
            let g = group(spec).unwrap();
            let listed = all_automorphisms(&g, &limits).unwrap();
            let chain = automorphism_group(&g);
            assert_eq!(listed.len() as u128, chain.order(), "{spec}");
            let mut from_chain = chain.elements(10_000).unwrap();
            from_chain.sort();
            assert_eq!(listed, from_chain, "{spec}");
        }
    }

    #[test]
    fn automorphisms_are_closed_and_bijective() {
        let g = group("S4").unwrap();
        let all = all_automorphisms(&g, &Limits::default()).unwrap();
        let set: HashSet<&GroupHom> = all.iter().collect();
        assert!(set.contains(&GroupHom::identity(24)));
        for a in &all {
            assert!(a.is_bijective() && a.is_homomorphism(&g, &g));
            assert!(set.contains(&a.inverse()));
            for b in &all {
                assert!(set.contains(&a.compose(b)));
            }
        }
    }

    #[test]
    fn enumeration_bound_is_enforced() {
        let g = group("C5^3").unwrap();
        assert!(matches!(all_automorphisms(&g, &Limits::default()), Err(Error::Resource(_))));
    }

    #[test]
    fn extend_hom_detects_conflicts() {
        let z5 = group("C5").unwrap();
        let z25 = group("C5^2").unwrap();
        // e1 ↦ e1, e2 ↦ 2e1 is a homomorphism onto ℤ5.
        let f = extend_hom(&z25, &z5, &[1, 5], &[1, 2]).unwrap();
        assert_eq!(f[z25.element_from_vector(&[1, 1]).unwrap() as usize], 3);
        let s3 = group("S3").unwrap();
        // A transposition cannot map to an element of order 3.
        let t = s3.generators()[0];
        let r = s3.generators()[1];
        assert!(extend_hom(&s3, &s3, &[t, r], &[r, r]).is_none());
        // Non-generating sets are rejected.
        assert!(extend_hom(&z25, &z5, &[1], &[1]).is_none());
    }

    #[test]
    fn induced_quotient_isomorphisms() {
        let g = group("C5^2").unwrap();
        let cache = QuotientCache::new(&g, NormalLattice::new(&g));
        let lattice = cache.lattice();
        let e1 = g.element_from_vector(&[1, 0]).unwrap();
        let e2 = g.element_from_vector(&[0, 1]).unwrap();
        let k2 = lattice.index_of(&g.closure(&[e2])).unwrap();
        let k1 = lattice.index_of(&g.closure(&[e1])).unwrap();
        let swap = GroupHom::new(extend_hom(&g, &g, &[e1, e2], &[e2, e1]).unwrap());
        let (j, map) = cache.induced(&swap, k2);
        assert_eq!(j, k1);
        let q_from = cache.get(k2);
        let q_to = cache.get(k1);
        // ē1 in G/⟨e2⟩ goes to the class of e2 in G/⟨e1⟩.
        assert_eq!(map.apply(q_from.project(e1)), q_to.project(e2));
        assert!(map.is_homomorphism(&q_from.group, &q_to.group) && map.is_bijective());

        let double = GroupHom::new(extend_hom(&g, &g, &[e1, e2], &[g.pow(e1, 2), g.pow(e2, 2)]).unwrap());
        let (j, map) = cache.induced(&double, k2);
        assert_eq!(j, k2);
        let x = q_from.project(e1);
        assert_eq!(map.apply(x), q_from.group.pow(x, 2));

        let id = GroupHom::identity(25);
        let (j, map) = cache.induced(&id, k2);
        assert_eq!(j, k2);
        assert!(map.is_identity());
    }

    #[test]
    fn induced_maps_compose_to_identity() {
        let g = group("S4").unwrap();
        let cache = QuotientCache::new(&g, NormalLattice::new(&g));
        let lattice = cache.lattice();
        for a in all_automorphisms(&g, &Limits::default()).unwrap() {
            for i in 0..lattice.len() {
                let (j, fwd) = cache.induced(&a, i);
                let (back_to, back) = cache.induced(&a.inverse(), j);
                assert_eq!(back_to, i);
                assert!(back.compose(&fwd).is_identity());
            }
        }
    }

    #[test]
    fn kernel_orbits_of_z5_squared() {
        let g = group("C5^2").unwrap();
        let lattice = NormalLattice::new(&g);
        let aut = automorphism_group(&g);
        assert_eq!(lattice.len(), 8);
        let orders = |t: &[usize]| t.iter().map(|&k| lattice.get(k).order()).collect::<Vec<_>>();
        let n3 = kernel_tuple_orbits(&lattice, &aut, 3);
        let shapes: Vec<Vec<usize>> = n3.iter().map(|o| orders(&o.tuple)).collect();
        assert_eq!(shapes, vec![vec![1, 1, 1], vec![1, 1, 5], vec![1, 1, 25], vec![1, 5, 5], vec![5, 5, 5]]);
        let with_e2 = n3.iter().find(|o| orders(&o.tuple) == vec![1, 1, 5]).unwrap();
        assert_eq!(with_e2.orbit_size, 6);
        // Under the stated minimality condition only the trivial pair survives for n = 2.
        let n2 = kernel_tuple_orbits(&lattice, &aut, 2);
        assert_eq!(n2.len(), 1);
        assert_eq!(orders(&n2[0].tuple), vec![1, 1]);
    }

    #[test]
    fn kernel_orbit_representatives_are_inequivalent() {
        for spec in ["C5^2", "S4", "C2^3"] {
            let g = group(spec).unwrap();
            let lattice = NormalLattice::new(&g);
            let aut = automorphism_group(&g);
            let elements = aut.elements(10_000).unwrap();
            let orbits = kernel_tuple_orbits(&lattice, &aut, 3);
            for (i, a) in orbits.iter().enumerate() {
                for b in orbits.iter().skip(i + 1) {
                    for h in &elements {
                        let mut img: Vec<usize> = a.tuple.iter().map(|&k| lattice.image(h, k)).collect();
                        img.sort_unstable();
                        assert_ne!(img, b.tuple, "{spec}");
                    }
                }
            }
            let total: usize = orbits.iter().map(|o| o.orbit_size).sum();
            let mut brute = 0;
            let m = lattice.len();
            for x in 0..m {
                for y in x..m {
                    for z in y..m {
                        brute += is_minimal(&lattice, &[x, y, z]) as usize;
                    }
                }
            }
            assert_eq!(total, brute, "{spec}");
        }
    }

    #[test]
    fn trivial_group_has_one_kernel_tuple() {
        let g = group("C1").unwrap();
        let lattice = NormalLattice::new(&g);
        let aut = automorphism_group(&g);
        for n in 2..5 {
            let orbits = kernel_tuple_orbits(&lattice, &aut, n);
            assert_eq!(orbits, vec![KernelOrbit { tuple: vec![0; n], orbit_size: 1 }]);
        }
    }

    #[test]
    fn kernel_stabilizers_of_three_lines() {
        let g = group("C5^3").unwrap();
        let lattice = NormalLattice::new(&g);
        let aut = automorphism_group(&g);
        let lines: Vec<usize> =
            g.generators().iter().map(|&e| lattice.index_of(&g.closure(&[e])).unwrap()).collect();
        let mut tuple = lines.clone();
        tuple.sort_unstable();
        let stab = kernel_stabilizer(&lattice, &aut, &tuple);
        // Monomial matrices: diagonal (ℤ4)³ extended by the coordinate permutations.
        assert_eq!(stab.multiset.order(), 64 * 6);
        assert_eq!(stab.ordered.order(), 64);
        assert_eq!(stab.block_moves.len(), 6);
        for (alpha, tau) in &stab.block_moves {
            for (i, &k) in tuple.iter().enumerate() {
                assert_eq!(lattice.image(alpha, k), tuple[tau[i]]);
            }
        }
    }

    #[test]
    fn stabilizer_matches_filtering() {
        let g = group("S4").unwrap();
        let lattice = NormalLattice::new(&g);
        let aut = automorphism_group(&g);
        let elements = aut.elements(1000).unwrap();
        let x = g.generators()[0];
        let (orbit, stab) = aut.stabilizer(x, |h, &y| h.apply(y));
        let brute = elements.iter().filter(|h| h.apply(x) == x).count();
        assert_eq!(stab.order(), brute as u128);
        assert_eq!(orbit as u128 * stab.order(), aut.order());
        assert!(lattice.len() >= 4);
    }
}
