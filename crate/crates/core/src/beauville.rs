//! Unmixed Beauville structures: validation, classification through fibers
//! over tuples of triple classes, existence search and Beauville dimension.
//!
//! A structure on `G` is a minimal kernel tuple `(K_1, …, K_n)` together with
//! a hyperbolic generating triple `S_i` of every `G/K_i`, such that the lifted
//! stabilizer sets `Σ_{S_i}·K_i` meet only in the identity. Structures are
//! counted up to `Aut(G) × (B3 ≀ S_n)`.
//!
//! Kernel tuples are first reduced to orbit representatives (sorted, equal
//! kernels adjacent). For a fixed representative, a structure up to braids is
//! a tuple of braid orbits, one per coordinate; mapping each braid orbit to its
//! `Aut × B3` class gives the class tuple `x`. The acting group moves class
//! tuples only through permutations of equal kernels and through automorphisms
//! that permute distinct kernels, so the count splits as a sum over class
//! tuples modulo those moves of the orbit counts of `Stab(x)` on the fiber over
//! `x`.

use std::collections::HashSet;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::braid::ClassTable;
use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup, QuotientGroup};
use crate::invariants::{compute_invariants, ManifoldInvariants};
use crate::limits::Limits;
use crate::morphisms::{
    automorphism_group, is_minimal, kernel_stabilizer, kernel_tuple_orbits, AutomorphismGroup, GroupHom,
    KernelStabilizer, NormalLattice, QuotientCache,
};
use crate::par;
use crate::triples::{
    is_generating_triple, is_hyperbolic, lift_stabilizer, sorted, stabilizer_set, triple_type, Triple, TripleType,
};

/// Everything derived from `G` that classification runs share.
pub struct Context<'g> {
    cache: QuotientCache<'g>,
    aut: AutomorphismGroup,
    quotient_auts: Vec<OnceLock<AutomorphismGroup>>,
    tables: Vec<OnceLock<ClassTable>>,
    lifted: Vec<OnceLock<Vec<FixedBitSet>>>,
    limits: Limits,
}

impl<'g> Context<'g> {
    pub fn new(g: &'g FiniteGroup, limits: Limits) -> Self {
        let lattice = NormalLattice::new(g);
        let k = lattice.len();
        Context {
            cache: QuotientCache::new(g, lattice),
            aut: automorphism_group(g),
            quotient_auts: (0..k).map(|_| OnceLock::new()).collect(),
            tables: (0..k).map(|_| OnceLock::new()).collect(),
            lifted: (0..k).map(|_| OnceLock::new()).collect(),
            limits,
        }
    }

    pub fn group(&self) -> &'g FiniteGroup {
        self.cache.group()
    }

    pub fn lattice(&self) -> &NormalLattice {
        self.cache.lattice()
    }

    pub fn automorphisms(&self) -> &AutomorphismGroup {
        &self.aut
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn quotient(&self, k: usize) -> &QuotientGroup {
        self.cache.get(k)
    }

    /// `ᾱ: G/N_k → G/α(N_k)` and the index of `α(N_k)`.
    pub fn induced(&self, alpha: &GroupHom, k: usize) -> (usize, GroupHom) {
        self.cache.induced(alpha, k)
    }

    pub fn quotient_automorphisms(&self, k: usize) -> &AutomorphismGroup {
        self.quotient_auts[k].get_or_init(|| automorphism_group(&self.quotient(k).group))
    }

    /// Hyperbolic generating triples of `G/N_k`, partitioned into braid orbits and classes.
    pub fn table(&self, k: usize) -> &ClassTable {
        self.tables[k].get_or_init(|| ClassTable::hyperbolic(&self.quotient(k).group, self.quotient_automorphisms(k)))
    }

    /// Lifted stabilizer set of every braid orbit of [`Context::table`]`(k)`.
    fn lifted(&self, k: usize) -> &[FixedBitSet] {
        self.lifted[k].get_or_init(|| {
            let q = self.quotient(k);
            let table = self.table(k);
            par::map(&table.braid_orbits, |o| q.preimage(&stabilizer_set(&q.group, o.key)))
        })
    }

    /// Lattice index of the trivial subgroup.
    pub fn trivial_kernel(&self) -> usize {
        self.lattice().subgroups().iter().position(|s| s.is_trivial()).expect("the lattice contains {1}")
    }

    /// Lattice index of the normal subgroup generated by `gens`.
    pub fn kernel_index(&self, gens: &[Elem]) -> Result<usize> {
        let g = self.group();
        for &x in gens {
            g.check_index(x)?;
        }
        self.lattice()
            .index_of(&g.closure(gens))
            .ok_or_else(|| Error::Input(format!("the subgroup generated by {gens:?} is not normal")))
    }

    /// Orbit representative of an arbitrary kernel tuple.
    pub fn kernel_representative(&self, tuple: &[usize]) -> Vec<usize> {
        let perms: Vec<Vec<usize>> = self.aut.generators().iter().map(|h| self.lattice().permutation(h)).collect();
        let mut start = tuple.to_vec();
        start.sort_unstable();
        let mut seen = HashSet::from([start.clone()]);
        let mut queue = vec![start];
        let mut head = 0;
        while head < queue.len() {
            for p in &perms {
                let mut img: Vec<usize> = queue[head].iter().map(|&k| p[k]).collect();
                img.sort_unstable();
                if seen.insert(img.clone()) {
                    queue.push(img);
                }
            }
            head += 1;
        }
        queue.into_iter().min().expect("orbit is nonempty")
    }
}

/// Kernels as lattice indices and one triple of `G/K_i` per factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BeauvilleStructure {
    pub kernels: Vec<usize>,
    pub triples: Vec<Triple>,
}

/// Outcome of re-checking the defining conditions from scratch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub generating: bool,
    pub hyperbolic: bool,
    pub minimal: bool,
    pub free: bool,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.generating && self.hyperbolic && self.minimal && self.free
    }
}

impl Context<'_> {
    fn check_shape(&self, s: &BeauvilleStructure) -> Result<()> {
        if s.kernels.len() != s.triples.len() || s.kernels.is_empty() {
            return Err(Error::Input("a structure needs one kernel per triple".into()));
        }
        for (&k, t) in s.kernels.iter().zip(&s.triples) {
            if k >= self.lattice().len() {
                return Err(Error::Input(format!("kernel index {k} out of range")));
            }
            let q = &self.quotient(k).group;
            for &x in t {
                q.check_index(x)?;
            }
        }
        Ok(())
    }

    /// `⋂ Σ_{S_i}·K_i = {1}`.
    pub fn is_free(&self, s: &BeauvilleStructure) -> Result<bool> {
        self.check_shape(s)?;
        let mut acc: Option<FixedBitSet> = None;
        for (&k, &t) in s.kernels.iter().zip(&s.triples) {
            let lifted = lift_stabilizer(self.quotient(k), t).lifted;
            acc = Some(match acc {
                None => lifted,
                Some(mut a) => {
                    a.intersect_with(&lifted);
                    a
                }
            });
        }
        Ok(acc.is_some_and(|a| a.count_ones(..) == 1))
    }

    pub fn validate(&self, s: &BeauvilleStructure) -> Result<Validation> {
        self.check_shape(s)?;
        let mut generating = true;
        let mut hyperbolic = true;
        for (&k, &t) in s.kernels.iter().zip(&s.triples) {
            let q = &self.quotient(k).group;
            generating &= is_generating_triple(q, t);
            hyperbolic &= is_hyperbolic(triple_type(q, t));
        }
        Ok(Validation { generating, hyperbolic, minimal: is_minimal(self.lattice(), &s.kernels), free: self.is_free(s)? })
    }

    pub fn types(&self, s: &BeauvilleStructure) -> Vec<TripleType> {
        s.kernels.iter().zip(&s.triples).map(|(&k, &t)| triple_type(&self.quotient(k).group, t)).collect()
    }

    pub fn genera(&self, s: &BeauvilleStructure) -> Result<Vec<u64>> {
        s.kernels
            .iter()
            .zip(self.types(s))
            .map(|(&k, ty)| crate::triples::genus(self.quotient(k).group.order(), ty))
            .collect()
    }

    pub fn invariants(&self, s: &BeauvilleStructure) -> Result<ManifoldInvariants> {
        compute_invariants(self.group().order() as u64, &self.genera(s)?)
    }

    /// Renders a quotient element as its least coset representative, in brackets unless the kernel is trivial.
    pub fn element_name(&self, k: usize, x: Elem) -> String {
        let q = self.quotient(k);
        let g = self.group();
        let rep = (0..g.order() as Elem).find(|&y| q.project(y) == x).expect("projection is onto");
        if q.kernel.is_trivial() {
            g.element_name(rep)
        } else {
            format!("[{}]", g.element_name(rep))
        }
    }
}

/// All permutations of `0..n`, in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { return out };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("a larger entry exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

impl Context<'_> {
    /// `(α, τ)` applied to a structure: factor `i` becomes factor `τ(i)` with kernel `α(K_i)` and triple `ᾱ(S_i)`.
    pub fn act(&self, s: &BeauvilleStructure, alpha: &GroupHom, tau: &[usize]) -> BeauvilleStructure {
        let n = s.kernels.len();
        let mut kernels = vec![0; n];
        let mut triples = vec![[0; 3]; n];
        for i in 0..n {
            let (j, abar) = self.induced(alpha, s.kernels[i]);
            kernels[tau[i]] = j;
            triples[tau[i]] = s.triples[i].map(|x| abar.apply(x));
        }
        BeauvilleStructure { kernels, triples }
    }

    /// Whether some `(α, braids, τ)` maps `a` to `b`, by exhaustive search over `Aut(G) × S_n`.
    ///
    /// Braids are covered by testing membership in the braid orbits of `b`'s triples.
    pub fn equivalent(&self, a: &BeauvilleStructure, b: &BeauvilleStructure) -> Result<bool> {
        self.check_shape(a)?;
        self.check_shape(b)?;
        let n = a.kernels.len();
        if b.kernels.len() != n {
            return Ok(false);
        }
        let orbits: Vec<HashSet<Triple>> = b
            .kernels
            .iter()
            .zip(&b.triples)
            .map(|(&k, &t)| crate::braid::braid_orbit(&self.quotient(k).group, t).into_iter().collect())
            .collect();
        let perms = permutations(n);
        let mut want = b.kernels.clone();
        want.sort_unstable();
        let mut found = false;
        self.aut.for_each(|alpha| {
            if found {
                return;
            }
            let images: Vec<usize> = a.kernels.iter().map(|&k| self.lattice().image(alpha, k)).collect();
            let mut sorted_images = images.clone();
            sorted_images.sort_unstable();
            if sorted_images != want {
                return;
            }
            let moved: Vec<Triple> = a
                .kernels
                .iter()
                .zip(&a.triples)
                .map(|(&k, t)| {
                    let (_, abar) = self.induced(alpha, k);
                    t.map(|x| abar.apply(x))
                })
                .collect();
            found = perms.iter().any(|tau| {
                (0..n).all(|i| images[i] == b.kernels[tau[i]] && orbits[tau[i]].contains(&moved[i]))
            });
        });
        Ok(found)
    }
}

/// Which kernel tuples a run considers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum KernelPolicy {
    #[default]
    All,
    /// Absolutely faithful structures only.
    Trivial,
    /// The orbit of one tuple of lattice indices.
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, Default)]
pub struct Constraints {
    pub chi: Option<i64>,
    pub kernels: KernelPolicy,
    /// Multiset of types, one per factor; each type matches any reordering.
    pub types: Option<Vec<TripleType>>,
}

impl Constraints {
    fn type_key(&self) -> Option<Vec<TripleType>> {
        self.types.as_ref().map(|ts| {
            let mut v: Vec<TripleType> = ts.iter().map(|&t| sorted(t)).collect();
            v.sort_unstable();
            v
        })
    }
}

/// One reported class, with the representative in the form found by the search.
#[derive(Debug, Clone)]
pub struct FoundClass {
    pub structure: BeauvilleStructure,
    pub types: Vec<TripleType>,
    pub genera: Vec<u64>,
    pub invariants: ManifoldInvariants,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub n: usize,
    /// Kernel orbit representatives that were searched.
    pub kernel_orbits: Vec<Vec<usize>>,
    pub classes: Vec<FoundClass>,
    pub diagnostics: Vec<String>,
}

/// Cell of a classification: kernel orbit and the multiset of sorted types.
pub type CellKey = (Vec<usize>, Vec<TripleType>);

pub fn cell_key(kernels: &[usize], types: &[TripleType]) -> CellKey {
    let mut ts: Vec<TripleType> = types.iter().map(|&t| sorted(t)).collect();
    ts.sort_unstable();
    (kernels.to_vec(), ts)
}

impl Classification {
    pub fn total(&self) -> usize {
        self.classes.len()
    }

    /// Class counts per cell, in ascending cell order.
    pub fn cells(&self) -> Vec<(CellKey, usize)> {
        let mut map = std::collections::BTreeMap::new();
        for c in &self.classes {
            *map.entry(cell_key(&c.structure.kernels, &c.types)).or_insert(0) += 1;
        }
        map.into_iter().collect()
    }
}

/// One coordinate of a fiber: the braid orbits of a single class.
struct Coordinate<'a> {
    kernel: usize,
    table: &'a ClassTable,
    /// Braid-orbit ids of the class, in table order.
    local: Vec<u32>,
    /// Braid-orbit id → position in `local`.
    position: Vec<u32>,
}

impl<'a> Coordinate<'a> {
    fn new(ctx: &'a Context<'_>, kernel: usize, class: u32) -> Self {
        let table = ctx.table(kernel);
        let local = table.classes[class as usize].braid_orbits.clone();
        let mut position = vec![u32::MAX; table.braid_orbits.len()];
        for (i, &b) in local.iter().enumerate() {
            position[b as usize] = i as u32;
        }
        Coordinate { kernel, table, local, position }
    }

    fn len(&self) -> usize {
        self.local.len()
    }
}

/// An element of `Stab(x)` acting on fiber points: `f'_{σ(i)} = maps[i][f_i]`.
struct PointMap {
    sigma: Vec<usize>,
    maps: Vec<Vec<u32>>,
}

impl PointMap {
    fn new(ctx: &Context<'_>, coords: &[Coordinate<'_>], alpha: &GroupHom, sigma: Vec<usize>) -> Self {
        let maps = coords
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let target = &coords[sigma[i]];
                let (j, abar) = ctx.induced(alpha, c.kernel);
                assert_eq!(j, target.kernel, "stabilizer element must respect kernels");
                c.local
                    .iter()
                    .map(|&b| {
                        let t = c.table.braid_orbits[b as usize].key.map(|x| abar.apply(x));
                        let b2 = target.table.braid_id(t).expect("images of hyperbolic triples are tabulated");
                        let l = target.position[b2 as usize];
                        assert!(l != u32::MAX, "stabilizer element must preserve the class tuple");
                        l
                    })
                    .collect()
            })
            .collect();
        PointMap { sigma, maps }
    }
}

/// Mixed-radix encoding of fiber points.
struct Radix {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl Radix {
    fn new(sizes: Vec<usize>) -> Option<Self> {
        let mut strides = Vec::with_capacity(sizes.len());
        let mut total: usize = 1;
        for &s in &sizes {
            strides.push(total);
            total = total.checked_mul(s)?;
        }
        Some(Radix { sizes, strides, total })
    }

    fn decode(&self, mut p: usize, out: &mut [u32]) {
        for (d, &s) in out.iter_mut().zip(&self.sizes) {
            *d = (p % s) as u32;
            p /= s;
        }
    }

    fn apply(&self, m: &PointMap, p: usize) -> usize {
        let mut rest = p;
        let mut out = 0;
        for (i, &s) in self.sizes.iter().enumerate() {
            let d = rest % s;
            rest /= s;
            out += m.maps[i][d] as usize * self.strides[m.sigma[i]];
        }
        out
    }
}

/// Orbits of a fiber, by representative point.
pub struct FiberOrbit {
    /// Triples of the representative, one braid-orbit key per coordinate.
    pub triples: Vec<Triple>,
    pub size: usize,
    pub free: bool,
}

/// Work item: a kernel representative with its stabilizer and positional data.
struct KernelJob<'a> {
    tuple: Vec<usize>,
    stab: KernelStabilizer,
    /// Per block move (same order as `stab.block_moves`), per position, the class transport map.
    transports: Vec<Vec<Vec<u32>>>,
    ctx: &'a Context<'a>,
}

impl<'a> KernelJob<'a> {
    fn new(ctx: &'a Context<'a>, tuple: Vec<usize>) -> Self {
        let stab = kernel_stabilizer(ctx.lattice(), ctx.automorphisms(), &tuple);
        let transports = stab
            .block_moves
            .iter()
            .map(|(alpha, _)| {
                tuple
                    .iter()
                    .map(|&k| {
                        let (j, abar) = ctx.induced(alpha, k);
                        let (from, to) = (ctx.table(k), ctx.table(j));
                        from.classes
                            .iter()
                            .map(|c| to.class_id(c.representative.map(|x| abar.apply(x))).expect("tabulated"))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        KernelJob { tuple, stab, transports, ctx }
    }

    fn same_block(&self, i: usize, j: usize) -> bool {
        self.tuple[i] == self.tuple[j]
    }

    /// `x` moved by block move `m`, re-sorted within blocks.
    fn transport(&self, m: usize, x: &[u32]) -> Vec<u32> {
        let tau = &self.stab.block_moves[m].1;
        let mut out = vec![0u32; x.len()];
        for i in 0..x.len() {
            out[tau[i]] = self.transports[m][i][x[i] as usize];
        }
        self.sort_blocks(&mut out);
        out
    }

    fn sort_blocks(&self, x: &mut [u32]) {
        let mut start = 0;
        while start < x.len() {
            let mut end = start + 1;
            while end < x.len() && self.same_block(start, end) {
                end += 1;
            }
            x[start..end].sort_unstable();
            start = end;
        }
    }

    fn is_canonical(&self, x: &[u32]) -> bool {
        (1..self.stab.block_moves.len()).all(|m| self.transport(m, x).as_slice() >= x)
    }

    /// Class tuples passing the filters, sorted within blocks, before block-move reduction.
    fn class_tuples(&self, constraints: &Constraints) -> Vec<Vec<u32>> {
        let n = self.tuple.len();
        let type_key = constraints.type_key();
        let allowed: Vec<Vec<u32>> = self
            .tuple
            .iter()
            .map(|&k| {
                let t = self.ctx.table(k);
                (0..t.classes.len() as u32)
                    .filter(|&c| type_key.as_ref().is_none_or(|ts| ts.contains(&sorted(t.classes[c as usize].ty))))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut x = Vec::with_capacity(n);
        self.extend(&allowed, &mut x, constraints, &type_key, &mut out);
        out
    }

    fn extend(
        &self,
        allowed: &[Vec<u32>],
        x: &mut Vec<u32>,
        constraints: &Constraints,
        type_key: &Option<Vec<TripleType>>,
        out: &mut Vec<Vec<u32>>,
    ) {
        let i = x.len();
        if i == allowed.len() {
            if self.passes(x, constraints, type_key) {
                out.push(x.clone());
            }
            return;
        }
        for &c in &allowed[i] {
            if i > 0 && self.same_block(i - 1, i) && c < x[i - 1] {
                continue;
            }
            x.push(c);
            self.extend(allowed, x, constraints, type_key, out);
            x.pop();
        }
    }

    fn classes_of(&self, x: &[u32]) -> Vec<&crate::braid::OrbitClass> {
        x.iter().zip(&self.tuple).map(|(&c, &k)| &self.ctx.table(k).classes[c as usize]).collect()
    }

    fn passes(&self, x: &[u32], constraints: &Constraints, type_key: &Option<Vec<TripleType>>) -> bool {
        let classes = self.classes_of(x);
        if let Some(key) = type_key {
            let mut ts: Vec<TripleType> = classes.iter().map(|c| sorted(c.ty)).collect();
            ts.sort_unstable();
            if &ts != key {
                return false;
            }
        }
        if let Some(chi) = constraints.chi {
            let genera: Vec<u64> = classes.iter().map(|c| c.genus).collect();
            match compute_invariants(self.ctx.group().order() as u64, &genera) {
                Ok(inv) if inv.chi == chi => {}
                _ => return false,
            }
        }
        true
    }

    fn coordinates(&self, x: &[u32]) -> Vec<Coordinate<'a>> {
        x.iter().zip(&self.tuple).map(|(&c, &k)| Coordinate::new(self.ctx, k, c)).collect()
    }

    /// Generators of `Stab(x)` (or of the ordered kernel stabilizer alone).
    fn stabilizer_maps(&self, coords: &[Coordinate<'_>], x: &[u32], with_permutations: bool) -> Vec<PointMap> {
        let n = x.len();
        let id: Vec<usize> = (0..n).collect();
        let mut maps: Vec<PointMap> =
            self.stab.ordered.generators().iter().map(|a| PointMap::new(self.ctx, coords, a, id.clone())).collect();
        if !with_permutations {
            return maps;
        }
        let identity = GroupHom::identity(self.ctx.group().order());
        for i in 0..n.saturating_sub(1) {
            if self.same_block(i, i + 1) && x[i] == x[i + 1] {
                let mut sigma = id.clone();
                sigma.swap(i, i + 1);
                maps.push(PointMap::new(self.ctx, coords, &identity, sigma));
            }
        }
        for m in 1..self.stab.block_moves.len() {
            if self.transport(m, x) != x {
                continue;
            }
            let (alpha, tau) = &self.stab.block_moves[m];
            // Send position i to an unused position of the target block holding the transported class.
            let mut used = vec![false; n];
            let sigma: Vec<usize> = (0..n)
                .map(|i| {
                    let want = self.transports[m][i][x[i] as usize];
                    let j = (0..n)
                        .find(|&j| !used[j] && self.same_block(j, tau[i]) && x[j] == want)
                        .expect("transported tuple equals x");
                    used[j] = true;
                    j
                })
                .collect();
            maps.push(PointMap::new(self.ctx, coords, alpha, sigma));
        }
        maps
    }

    fn fiber_orbits(&self, x: &[u32], with_permutations: bool) -> Result<Vec<FiberOrbit>> {
        let coords = self.coordinates(x);
        let radix = Radix::new(coords.iter().map(|c| c.len()).collect())
            .filter(|r| r.total <= self.ctx.limits.max_points)
            .ok_or_else(|| {
                Error::Resource(format!(
                    "fiber over class tuple {x:?} exceeds {} points; use the brute-force path or raise the limit",
                    self.ctx.limits.max_points
                ))
            })?;
        let maps = self.stabilizer_maps(&coords, x, with_permutations);
        let mut uf = UnionFind::new(radix.total);
        for m in &maps {
            let images = par::map_range(radix.total, |p| radix.apply(m, p) as u32);
            for (p, &q) in images.iter().enumerate() {
                uf.union(p, q as usize);
            }
        }
        let minima = uf.class_minima();
        let mut sizes = vec![0usize; radix.total];
        for &m in &minima {
            sizes[m as usize] += 1;
        }
        let reps: Vec<usize> = (0..radix.total).filter(|&p| minima[p] as usize == p).collect();
        let lifted: Vec<&[FixedBitSet]> = coords.iter().map(|c| self.ctx.lifted(c.kernel)).collect();
        Ok(par::map(&reps, |&p| {
            let mut digits = vec![0u32; coords.len()];
            radix.decode(p, &mut digits);
            let braid: Vec<u32> = digits.iter().zip(&coords).map(|(&d, c)| c.local[d as usize]).collect();
            let mut acc = lifted[0][braid[0] as usize].clone();
            for i in 1..coords.len() {
                acc.intersect_with(&lifted[i][braid[i] as usize]);
            }
            FiberOrbit {
                triples: braid.iter().zip(&coords).map(|(&b, c)| c.table.braid_orbits[b as usize].key).collect(),
                size: sizes[p],
                free: acc.count_ones(..) == 1,
            }
        }))
    }

    /// Whether some point of the fiber over `x` is free; depth-first with early exit.
    fn fiber_has_free_point(&self, x: &[u32]) -> bool {
        let coords = self.coordinates(x);
        let lifted: Vec<&[FixedBitSet]> = coords.iter().map(|c| self.ctx.lifted(c.kernel)).collect();
        fn dfs(coords: &[Coordinate<'_>], lifted: &[&[FixedBitSet]], i: usize, acc: &FixedBitSet) -> bool {
            if acc.count_ones(..) == 1 {
                return true;
            }
            if i == coords.len() {
                return false;
            }
            coords[i].local.iter().any(|&b| {
                let mut next = acc.clone();
                next.intersect_with(&lifted[i][b as usize]);
                dfs(coords, lifted, i + 1, &next)
            })
        }
        let first = &coords[0];
        par::any(&first.local, |&b| dfs(&coords, &lifted, 1, &lifted[0][b as usize]))
    }
}

impl<'a> Context<'a> {
    fn kernel_orbits(&self, n: usize, policy: &KernelPolicy) -> Result<Vec<Vec<usize>>> {
        if n < 2 {
            return Err(Error::Input(format!("structures need n ≥ 2, got n = {n}")));
        }
        Ok(match policy {
            KernelPolicy::All => kernel_tuple_orbits(self.lattice(), &self.aut, n).into_iter().map(|o| o.tuple).collect(),
            KernelPolicy::Trivial => vec![vec![self.trivial_kernel(); n]],
            KernelPolicy::Explicit(tuple) => {
                if tuple.len() != n {
                    return Err(Error::Input(format!("kernel tuple has {} entries, expected {n}", tuple.len())));
                }
                if tuple.iter().any(|&k| k >= self.lattice().len()) {
                    return Err(Error::Input("kernel index out of range".into()));
                }
                if !is_minimal(self.lattice(), tuple) {
                    return Err(Error::Input(format!("kernel tuple {tuple:?} is not minimal")));
                }
                vec![self.kernel_representative(tuple)]
            }
        })
    }

    fn check_constraints(&self, n: usize, constraints: &Constraints) -> Result<Vec<String>> {
        let mut diagnostics = Vec::new();
        if let Some(ts) = &constraints.types {
            if ts.len() != n {
                return Err(Error::Input(format!("{} types given for n = {n}", ts.len())));
            }
            if let (Some(chi), KernelPolicy::Trivial) = (constraints.chi, &constraints.kernels) {
                let order = self.group().order();
                let genera: Result<Vec<u64>> = ts.iter().map(|&t| crate::triples::genus(order, t)).collect();
                match genera.and_then(|g| compute_invariants(order as u64, &g)) {
                    Ok(inv) if inv.chi == chi => {}
                    Ok(inv) => diagnostics.push(format!(
                        "type filter {ts:?} forces χ = {} on a group of order {order}, which conflicts with χ = {chi}",
                        inv.chi
                    )),
                    Err(e) => diagnostics.push(format!("type filter {ts:?} is not realizable with χ = {chi}: {e}")),
                }
            }
        }
        Ok(diagnostics)
    }

    /// Classes of `𝒰ℬ_n(G)` modulo `Aut(G) × (B3 ≀ S_n)` that satisfy `constraints`.
    pub fn classify(&'a self, n: usize, constraints: &Constraints) -> Result<Classification> {
        let kernel_orbits = self.kernel_orbits(n, &constraints.kernels)?;
        let mut diagnostics = self.check_constraints(n, constraints)?;
        if !diagnostics.is_empty() {
            return Ok(Classification { n, kernel_orbits, classes: Vec::new(), diagnostics });
        }
        let per_kernel: Vec<Result<(usize, Vec<FoundClass>)>> = par::map(&kernel_orbits, |tuple| {
            let job = KernelJob::new(self, tuple.clone());
            let xs: Vec<Vec<u32>> =
                job.class_tuples(constraints).into_iter().filter(|x| job.is_canonical(x)).collect();
            let found: Vec<Result<Vec<FoundClass>>> = par::map(&xs, |x| {
                let orbits = job.fiber_orbits(x, true)?;
                let classes = job.classes_of(x);
                let types: Vec<TripleType> = classes.iter().map(|c| c.ty).collect();
                let genera: Vec<u64> = classes.iter().map(|c| c.genus).collect();
                let mut out = Vec::new();
                for o in orbits.into_iter().filter(|o| o.free) {
                    let invariants = compute_invariants(self.group().order() as u64, &genera)?;
                    let structure = BeauvilleStructure { kernels: tuple.clone(), triples: o.triples };
                    out.push(FoundClass { structure, types: types.clone(), genera: genera.clone(), invariants });
                }
                Ok(out)
            });
            let mut classes = Vec::new();
            for f in found {
                classes.extend(f?);
            }
            Ok((xs.len(), classes))
        });
        let mut classes = Vec::new();
        let mut tuples_seen = 0;
        for r in per_kernel {
            let (count, found) = r?;
            tuples_seen += count;
            classes.extend(found);
        }
        if tuples_seen == 0 && (constraints.chi.is_some() || constraints.types.is_some()) {
            diagnostics.push("no class tuple satisfies the χ and type filters".into());
        }
        Ok(Classification { n, kernel_orbits, classes, diagnostics })
    }

    /// Orbits of the ordered kernel stabilizer on the fiber over a class tuple.
    ///
    /// `kernels` must be a kernel orbit representative and `x` holds one class id of
    /// [`Context::table`] per coordinate. Permutations of coordinates are not applied.
    pub fn fiber_count(&'a self, kernels: &[usize], x: &[u32]) -> Result<Vec<FiberOrbit>> {
        if kernels.len() != x.len() || kernels.is_empty() {
            return Err(Error::Input("class tuple and kernel tuple differ in length".into()));
        }
        for (&k, &c) in kernels.iter().zip(x) {
            if k >= self.lattice().len() || c as usize >= self.table(k).classes.len() {
                return Err(Error::Input(format!("no class {c} for kernel {k}")));
            }
        }
        KernelJob::new(self, kernels.to_vec()).fiber_orbits(x, false)
    }

    /// Whether `𝒰ℬ_n(G)` has a member satisfying `constraints`.
    pub fn exists(&'a self, n: usize, constraints: &Constraints) -> Result<bool> {
        let kernel_orbits = self.kernel_orbits(n, &constraints.kernels)?;
        if !self.check_constraints(n, constraints)?.is_empty() {
            return Ok(false);
        }
        for tuple in kernel_orbits {
            let job = KernelJob::new(self, tuple);
            let xs = job.class_tuples(constraints);
            if par::any(&xs, |x| job.fiber_has_free_point(x)) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Result of a Beauville dimension search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Dimension {
    Exact { n: usize },
    /// No structure with `n ≤ n_max`; larger `n` is not ruled out.
    Indeterminate { n_max: usize },
}

/// Least `n` in `2..=n_max` with `𝒰ℬ_n(G) ≠ ∅`.
pub fn beauville_dimension(ctx: &Context<'_>, n_max: usize) -> Result<Dimension> {
    if n_max < 2 {
        return Err(Error::Input(format!("n_max must be at least 2, got {n_max}")));
    }
    for n in 2..=n_max {
        if ctx.exists(n, &Constraints::default())? {
            return Ok(Dimension::Exact { n });
        }
    }
    Ok(Dimension::Indeterminate { n_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::group;

    fn v(g: &FiniteGroup, c: &[i64]) -> Elem {
        g.element_from_vector(c).unwrap()
    }

    #[test]
    fn identical_factors_are_not_free() {
        let g = group("C5^2").unwrap();
        let ctx = Context::new(&g, Limits::default());
        let t = [v(&g, &[1, 0]), v(&g, &[0, 1]), v(&g, &[4, 4])];
        let s = BeauvilleStructure { kernels: vec![0, 0], triples: vec![t, t] };
        let check = ctx.validate(&s).unwrap();
        assert!(check.generating && check.hyperbolic && check.minimal && !check.free);
    }

    #[test]
    fn n_one_is_rejected() {
        let g = group("C5").unwrap();
        let ctx = Context::new(&g, Limits::default());
        assert!(matches!(ctx.classify(1, &Constraints::default()), Err(Error::Input(_))));
        assert!(beauville_dimension(&ctx, 1).is_err());
    }

    #[test]
    fn conflicting_filters_give_an_empty_report() {
        let g = group("C5^2").unwrap();
        let ctx = Context::new(&g, Limits::default());
        let c = Constraints { chi: Some(-1), kernels: KernelPolicy::Trivial, types: Some(vec![[5, 5, 5]; 3]) };
        let r = ctx.classify(3, &c).unwrap();
        assert_eq!(r.total(), 0);
        assert!(!r.diagnostics.is_empty());
    }

    #[test]
    fn surfaces_on_z5_squared() {
        let g = group("C5^2").unwrap();
        let ctx = Context::new(&g, Limits::default());
        let r = ctx.classify(2, &Constraints::default()).unwrap();
        assert!(r.total() > 0);
        for c in &r.classes {
            assert!(ctx.validate(&c.structure).unwrap().is_valid());
            assert_eq!(c.invariants.chi, 1);
        }
        assert_eq!(beauville_dimension(&ctx, 3).unwrap(), Dimension::Exact { n: 2 });
    }

    #[test]
    fn permutation_listing() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(3)[1], vec![0, 2, 1]);
        assert_eq!(permutations(1), vec![vec![0]]);
    }

    #[test]
    fn reported_classes_are_pairwise_inequivalent() {
        let g = group("C5^2").unwrap();
        let ctx = Context::new(&g, Limits::default());
        let r = ctx.classify(3, &Constraints { chi: Some(-1), ..Default::default() }).unwrap();
        assert_eq!(r.total(), 8);
        for (i, a) in r.classes.iter().enumerate() {
            assert!(ctx.equivalent(&a.structure, &a.structure).unwrap());
            for b in &r.classes[i + 1..] {
                assert!(!ctx.equivalent(&a.structure, &b.structure).unwrap());
            }
        }
        // A moved copy is recognized.
        let a = &r.classes[0].structure;
        let alpha = ctx.automorphisms().generators()[0].clone();
        let moved = ctx.act(a, &alpha, &[2, 0, 1]);
        assert!(ctx.equivalent(a, &moved).unwrap());
    }

    #[test]
    fn small_groups_have_no_threefolds() {
        for spec in ["C2^3", "C3^3", "S4", "C4^2"] {
            let g = group(spec).unwrap();
            let ctx = Context::new(&g, Limits::default());
            assert!(!ctx.exists(3, &Constraints::default()).unwrap(), "{spec}");
            assert_eq!(ctx.classify(3, &Constraints::default()).unwrap().total(), 0, "{spec}");
        }
    }
}
