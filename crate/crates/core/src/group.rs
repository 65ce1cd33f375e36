//! Fully enumerated finite groups.
//!
//! Elements are indices `0..order` with `0` the identity. Multiplication is a
//! lookup in a materialized Cayley table, so every algorithm above this layer
//! works with exact, constant-time arithmetic.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Index of a group element. `0` is always the identity.
pub type Elem = u32;

/// How elements are rendered in reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Naming {
    /// `ℤ_{n1} × … × ℤ_{nk}` with mixed-radix indices: index = x1 + n1·(x2 + n2·(…)).
    Vector(Vec<u32>),
    /// One permutation per element (0-based images), rendered in cycle notation.
    Permutation(Vec<Vec<u32>>),
    /// Shortest words in the construction generators `g1, g2, …`.
    Words,
}

#[derive(Debug)]
pub struct ConjugacyClasses {
    pub class_of: Vec<u32>,
    pub classes: Vec<Vec<Elem>>,
}

pub struct FiniteGroup {
    order: usize,
    table: Vec<Elem>,
    inverse: Vec<Elem>,
    element_order: Vec<u32>,
    label: String,
    generators: Vec<Elem>,
    naming: Naming,
    classes: OnceLock<ConjugacyClasses>,
    words: OnceLock<Vec<String>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("label", &self.label)
            .field("order", &self.order)
            .field("generators", &self.generators)
            .finish()
    }
}

impl FiniteGroup {
    /// Builds a group from a row-major Cayley table.
    ///
    /// Checks the identity law, that every row and column is a permutation,
    /// associativity (exhaustive up to order 64, 10⁵ seeded random triples
    /// above) and that `generators` generate the whole table.
    pub fn from_table(
        label: impl Into<String>,
        table: Vec<Elem>,
        generators: Vec<Elem>,
        naming: Naming,
    ) -> Result<Self> {
        let len = table.len();
        let order = (len as f64).sqrt().round() as usize;
        if order == 0 || order * order != len {
            return Err(Error::Validation(format!("table of length {len} is not square")));
        }
        if table.iter().any(|&x| x as usize >= order) {
            return Err(Error::Validation("table entry out of range".into()));
        }
        for x in 0..order {
            if table[x] as usize != x || table[x * order] as usize != x {
                return Err(Error::Validation(format!("element 0 is not an identity (fails at {x})")));
            }
        }
        let mut inverse = vec![u32::MAX; order];
        for x in 0..order {
            let row = &table[x * order..(x + 1) * order];
            let mut seen = FixedBitSet::with_capacity(order);
            for (y, &z) in row.iter().enumerate() {
                if seen.put(z as usize) {
                    return Err(Error::Validation(format!("row {x} repeats an entry")));
                }
                if z == 0 {
                    inverse[x] = y as u32;
                }
            }
        }
        for y in 0..order {
            let mut seen = FixedBitSet::with_capacity(order);
            for x in 0..order {
                if seen.put(table[x * order + y] as usize) {
                    return Err(Error::Validation(format!("column {y} repeats an entry")));
                }
            }
        }
        let mul = |a: usize, b: usize| table[a * order + b] as usize;
        if order <= 64 {
            for x in 0..order {
                for y in 0..order {
                    let xy = mul(x, y);
                    for z in 0..order {
                        if mul(xy, z) != mul(x, mul(y, z)) {
                            return Err(Error::Validation(format!("not associative at ({x},{y},{z})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_9a0u64 ^ order as u64);
            for _ in 0..100_000 {
                let (x, y, z) = (rng.gen_range(0..order), rng.gen_range(0..order), rng.gen_range(0..order));
                if mul(mul(x, y), z) != mul(x, mul(y, z)) {
                    return Err(Error::Validation(format!("not associative at ({x},{y},{z})")));
                }
            }
        }
        let mut element_order = vec![0u32; order];
        for x in 0..order {
            let mut k = 1u32;
            let mut p = x;
            while p != 0 {
                p = mul(p, x);
                k += 1;
            }
            element_order[x] = k;
        }
        let group = FiniteGroup {
            order,
            table,
            inverse,
            element_order,
            label: label.into(),
            generators,
            naming,
            classes: OnceLock::new(),
            words: OnceLock::new(),
        };
        if group.generators.iter().any(|&g| g as usize >= order) {
            return Err(Error::Validation("generator index out of range".into()));
        }
        if group.closure(&group.generators).count_ones(..) != order {
            return Err(Error::Validation(format!(
                "generators of {} do not generate the whole table",
                group.label
            )));
        }
        Ok(group)
    }

    /// Enumerates the group generated by `gens` under `mul` by breadth-first
    /// closure. Element indices follow discovery order, so the result is
    /// deterministic for a fixed generator list. Returns the group together
    /// with the enumerated objects.
    pub fn from_closure<T, F>(
        label: impl Into<String>,
        identity: T,
        gens: &[T],
        mul: F,
        max_order: usize,
    ) -> Result<(Self, Vec<T>)>
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
    {
        let label = label.into();
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<T, Elem> = HashMap::new();
        index.insert(identity, 0);
        let mut gen_idx = Vec::with_capacity(gens.len());
        let mut head = 0;
        // Seed generators first so they receive small indices.
        for g in gens {
            let id = *index.entry(g.clone()).or_insert_with(|| {
                elements.push(g.clone());
                (elements.len() - 1) as Elem
            });
            gen_idx.push(id);
        }
        while head < elements.len() {
            let x = elements[head].clone();
            head += 1;
            for g in gens {
                let y = mul(&x, g);
                if !index.contains_key(&y) {
                    if elements.len() >= max_order {
                        return Err(Error::Resource(format!(
                            "{label} has order above the bound {max_order}"
                        )));
                    }
                    index.insert(y.clone(), elements.len() as Elem);
                    elements.push(y);
                }
            }
        }
        let n = elements.len();
        let mut table = vec![0; n * n];
        for (i, x) in elements.iter().enumerate() {
            for (j, y) in elements.iter().enumerate() {
                table[i * n + j] = index[&mul(x, y)];
            }
        }
        let mut gens_dedup: Vec<Elem> = Vec::new();
        for g in gen_idx {
            if g != 0 && !gens_dedup.contains(&g) {
                gens_dedup.push(g);
            }
        }
        let group = FiniteGroup::from_table(label, table, gens_dedup, Naming::Words)?;
        Ok((group, elements))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn naming(&self) -> &Naming {
        &self.naming
    }

    pub(crate) fn set_naming(&mut self, naming: Naming) {
        self.naming = naming;
        self.words = OnceLock::new();
    }

    /// The construction generators.
    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inverse[a as usize]
    }

    /// `g·x·g⁻¹`
    #[inline]
    pub fn conj(&self, g: Elem, x: Elem) -> Elem {
        self.mul(self.mul(g, x), self.inverse[g as usize])
    }

    #[inline]
    pub fn element_order(&self, a: Elem) -> u32 {
        self.element_order[a as usize]
    }

    pub fn pow(&self, a: Elem, k: i64) -> Elem {
        let m = self.element_order(a) as i64;
        let e = k.rem_euclid(m);
        let mut r = 0;
        for _ in 0..e {
            r = self.mul(r, a);
        }
        r
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order as Elem
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .all(|&a| self.generators.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn check_index(&self, x: Elem) -> Result<()> {
        if (x as usize) < self.order {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "element index {x} out of range for {} of order {}",
                self.label, self.order
            )))
        }
    }

    /// Closure of `gens ∪ {1}` under multiplication, as a bitset.
    pub fn closure(&self, gens: &[Elem]) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.order);
        set.insert(0);
        let mut queue = VecDeque::from([0u32]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !set.put(y as usize) {
                    queue.push_back(y);
                }
            }
        }
        set
    }

    /// Size of ⟨gens⟩ without materializing anything beyond a bitset.
    pub fn generated_order(&self, gens: &[Elem]) -> usize {
        self.closure(gens).count_ones(..)
    }

    pub fn conjugacy_classes(&self) -> &ConjugacyClasses {
        self.classes.get_or_init(|| {
            let mut class_of = vec![u32::MAX; self.order];
            let mut classes: Vec<Vec<Elem>> = Vec::new();
            for x in 0..self.order as Elem {
                if class_of[x as usize] != u32::MAX {
                    continue;
                }
                let id = classes.len() as u32;
                let mut members = vec![x];
                class_of[x as usize] = id;
                let mut head = 0;
                while head < members.len() {
                    let y = members[head];
                    head += 1;
                    for &g in &self.generators {
                        let z = self.conj(g, y);
                        if class_of[z as usize] == u32::MAX {
                            class_of[z as usize] = id;
                            members.push(z);
                        }
                    }
                }
                members.sort_unstable();
                classes.push(members);
            }
            ConjugacyClasses { class_of, classes }
        })
    }

    pub fn class_size(&self, x: Elem) -> usize {
        let cc = self.conjugacy_classes();
        cc.classes[cc.class_of[x as usize] as usize].len()
    }

    /// Renders an element for reports.
    pub fn element_name(&self, x: Elem) -> String {
        match &self.naming {
            Naming::Vector(moduli) => {
                let coords = vector_coords(moduli, x);
                format!(
                    "({})",
                    coords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
                )
            }
            Naming::Permutation(perms) => cycle_notation(&perms[x as usize]),
            Naming::Words => self.words()[x as usize].clone(),
        }
    }

    /// For groups with vector naming, the element with the given exponent vector (reduced mod each modulus).
    pub fn element_from_vector(&self, coords: &[i64]) -> Option<Elem> {
        match &self.naming {
            Naming::Vector(moduli) if moduli.len() == coords.len() => {
                let mut idx: i64 = 0;
                let mut radix: i64 = 1;
                for (&m, &c) in moduli.iter().zip(coords) {
                    idx += c.rem_euclid(m as i64) * radix;
                    radix *= m as i64;
                }
                Some(idx as Elem)
            }
            _ => None,
        }
    }

    /// Exponent vector of `x` for groups with vector naming.
    pub fn vector_of(&self, x: Elem) -> Option<Vec<u32>> {
        match &self.naming {
            Naming::Vector(moduli) => Some(vector_coords(moduli, x)),
            _ => None,
        }
    }

    fn words(&self) -> &Vec<String> {
        self.words.get_or_init(|| {
            let mut parent: Vec<Option<(Elem, usize)>> = vec![None; self.order];
            let mut seen = FixedBitSet::with_capacity(self.order);
            seen.insert(0);
            let mut queue = VecDeque::from([0u32]);
            while let Some(x) = queue.pop_front() {
                for (j, &g) in self.generators.iter().enumerate() {
                    let y = self.mul(x, g);
                    if !seen.put(y as usize) {
                        parent[y as usize] = Some((x, j));
                        queue.push_back(y);
                    }
                }
            }
            (0..self.order)
                .map(|x| {
                    let mut letters = Vec::new();
                    let mut cur = x;
                    while let Some((p, j)) = parent[cur] {
                        letters.push(j);
                        cur = p as usize;
                    }
                    letters.reverse();
                    format_word(&letters)
                })
                .collect()
        })
    }
}

fn vector_coords(moduli: &[u32], x: Elem) -> Vec<u32> {
    let mut rest = x;
    moduli
        .iter()
        .map(|&m| {
            let c = rest % m;
            rest /= m;
            c
        })
        .collect()
}

fn format_word(letters: &[usize]) -> String {
    if letters.is_empty() {
        return "1".into();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < letters.len() {
        let mut j = i;
        while j < letters.len() && letters[j] == letters[i] {
            j += 1;
        }
        let run = j - i;
        if run == 1 {
            parts.push(format!("g{}", letters[i] + 1));
        } else {
            parts.push(format!("g{}^{}", letters[i] + 1, run));
        }
        i = j;
    }
    parts.join("*")
}

/// 1-based disjoint-cycle notation; the identity renders as `()`.
pub fn cycle_notation(perm: &[u32]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] as usize == start {
            continue;
        }
        let mut cycle = vec![start + 1];
        seen[start] = true;
        let mut cur = perm[start] as usize;
        while cur != start {
            seen[cur] = true;
            cycle.push(cur + 1);
            cur = perm[cur] as usize;
        }
        out.push('(');
        out.push_str(&cycle.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","));
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

/// A subgroup, stored as its sorted member list plus a membership bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    members: Vec<Elem>,
    set: FixedBitSet,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", self.members)
    }
}

impl Subgroup {
    pub fn from_set(set: FixedBitSet) -> Self {
        let members = set.ones().map(|x| x as Elem).collect();
        Subgroup { members, set }
    }

    pub fn trivial(g: &FiniteGroup) -> Self {
        let mut set = FixedBitSet::with_capacity(g.order());
        set.insert(0);
        Subgroup::from_set(set)
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        let mut set = FixedBitSet::with_capacity(g.order());
        set.insert_range(..);
        Subgroup::from_set(set)
    }

    pub fn members(&self) -> &[Elem] {
        &self.members
    }

    pub fn set(&self) -> &FixedBitSet {
        &self.set
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.set.contains(x as usize)
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let mut set = self.set.clone();
        set.intersect_with(&other.set);
        Subgroup::from_set(set)
    }

    /// A small generating set: greedily adds the member of largest order that enlarges the span.
    pub fn generators(&self, g: &FiniteGroup) -> Vec<Elem> {
        let mut gens = Vec::new();
        let mut span = g.closure(&[]);
        let mut candidates: Vec<Elem> = self.members.iter().copied().filter(|&x| x != 0).collect();
        candidates.sort_by_key(|&x| (std::cmp::Reverse(g.element_order(x)), x));
        while span.count_ones(..) < self.order() {
            let next = candidates
                .iter()
                .copied()
                .find(|&x| !span.contains(x as usize))
                .expect("span is a proper subgroup, so some member lies outside");
            gens.push(next);
            span = g.closure(&gens);
        }
        gens
    }
}

/// ⟨gens⟩ by breadth-first closure.
pub fn subgroup_generated(g: &FiniteGroup, gens: &[Elem]) -> Result<Subgroup> {
    for &x in gens {
        g.check_index(x)?;
    }
    Ok(Subgroup::from_set(g.closure(gens)))
}

/// Whether `h` is normal in `g`. Conjugating by the generators of `g` suffices.
pub fn is_normal(g: &FiniteGroup, h: &Subgroup) -> bool {
    g.generators()
        .iter()
        .all(|&x| h.members().iter().all(|&y| h.contains(g.conj(x, y))))
}

/// Every normal subgroup of `g` exactly once, sorted by (order, members).
///
/// Normal subgroups are exactly the joins of normal closures of conjugacy
/// classes; the join lattice is closed by a worklist.
pub fn normal_subgroups(g: &FiniteGroup) -> Vec<Subgroup> {
    let cc = g.conjugacy_classes();
    let mut atoms: Vec<FixedBitSet> = Vec::new();
    for class in &cc.classes {
        if class[0] == 0 {
            continue;
        }
        let closure = g.closure(class);
        if !atoms.contains(&closure) {
            atoms.push(closure);
        }
    }
    let trivial = g.closure(&[]);
    let mut found: Vec<FixedBitSet> = vec![trivial.clone()];
    let mut known: std::collections::HashSet<FixedBitSet> = std::collections::HashSet::from([trivial]);
    let mut head = 0;
    while head < found.len() {
        let current = found[head].clone();
        head += 1;
        for atom in &atoms {
            if atom.is_subset(&current) {
                continue;
            }
            let mut gens: Vec<Elem> = current.ones().map(|x| x as Elem).collect();
            gens.extend(atom.ones().map(|x| x as Elem));
            let join = g.closure(&gens);
            if known.insert(join.clone()) {
                found.push(join);
            }
        }
    }
    let mut subs: Vec<Subgroup> = found.into_iter().map(Subgroup::from_set).collect();
    subs.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members().cmp(b.members())));
    subs
}

/// `G/K` together with the projection map.
#[derive(Debug)]
pub struct QuotientGroup {
    pub kernel: Subgroup,
    pub group: FiniteGroup,
    /// Parent element → coset index.
    pub projection: Vec<Elem>,
    /// One parent element per coset; `representatives[0] = 0`.
    pub representatives: Vec<Elem>,
}

impl QuotientGroup {
    #[inline]
    pub fn project(&self, x: Elem) -> Elem {
        self.projection[x as usize]
    }

    /// Preimage of a set of quotient elements.
    pub fn preimage(&self, set: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.projection.len());
        for (x, &p) in self.projection.iter().enumerate() {
            if set.contains(p as usize) {
                out.insert(x);
            }
        }
        out
    }
}

/// Coset enumeration of `G/K`; fails if `K` is not normal.
pub fn quotient(g: &FiniteGroup, k: &Subgroup) -> Result<QuotientGroup> {
    if k.set().len() != g.order() {
        return Err(Error::Contract("kernel belongs to a different group".into()));
    }
    if !is_normal(g, k) {
        return Err(Error::Contract(format!("subgroup of order {} is not normal in {}", k.order(), g.label())));
    }
    let n = g.order();
    let mut projection = vec![u32::MAX; n];
    let mut representatives = Vec::with_capacity(n / k.order());
    for x in 0..n as Elem {
        if projection[x as usize] != u32::MAX {
            continue;
        }
        let id = representatives.len() as Elem;
        representatives.push(x);
        for &m in k.members() {
            projection[g.mul(x, m) as usize] = id;
        }
    }
    let q = representatives.len();
    let mut table = vec![0; q * q];
    for (i, &a) in representatives.iter().enumerate() {
        for (j, &b) in representatives.iter().enumerate() {
            table[i * q + j] = projection[g.mul(a, b) as usize];
        }
    }
    let mut gens: Vec<Elem> = Vec::new();
    for &x in g.generators() {
        let p = projection[x as usize];
        if p != 0 && !gens.contains(&p) {
            gens.push(p);
        }
    }
    let label = format!("{}/N{}", g.label(), k.order());
    let group = FiniteGroup::from_table(label, table, gens, Naming::Words)?;
    Ok(QuotientGroup { kernel: k.clone(), group, projection, representatives })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic_power(n: u32, k: u32) -> FiniteGroup {
        let order = n.pow(k) as usize;
        let moduli = vec![n; k as usize];
        let coords = |x: usize| vector_coords(&moduli, x as Elem);
        let mut table = vec![0; order * order];
        for x in 0..order {
            for y in 0..order {
                let (cx, cy) = (coords(x), coords(y));
                let mut idx = 0u32;
                let mut radix = 1u32;
                for i in 0..k as usize {
                    idx += ((cx[i] + cy[i]) % n) * radix;
                    radix *= n;
                }
                table[x * order + y] = idx;
            }
        }
        let gens = (0..k).map(|i| n.pow(i)).collect();
        FiniteGroup::from_table(format!("C{n}^{k}"), table, gens, Naming::Vector(moduli.clone())).unwrap()
    }

    fn symmetric(n: usize) -> FiniteGroup {
        let mut t: Vec<u32> = (0..n as u32).collect();
        t.swap(0, 1);
        let c: Vec<u32> = (0..n as u32).map(|i| (i + 1) % n as u32).collect();
        let compose = |a: &Vec<u32>, b: &Vec<u32>| a.iter().map(|&i| b[i as usize]).collect::<Vec<u32>>();
        FiniteGroup::from_closure("S", (0..n as u32).collect(), &[t, c], compose, 5000).unwrap().0
    }

    #[test]
    fn cyclic_closure_and_generation() {
        let g = cyclic_power(5, 2);
        let e1 = g.element_from_vector(&[1, 0]).unwrap();
        let e2 = g.element_from_vector(&[0, 1]).unwrap();
        assert_eq!(subgroup_generated(&g, &[e1]).unwrap().order(), 5);
        assert_eq!(subgroup_generated(&g, &[e1, e2]).unwrap().order(), 25);
        assert!(matches!(subgroup_generated(&g, &[25]), Err(Error::Input(_))));
    }

    #[test]
    fn subgroup_generation_is_idempotent() {
        let g = symmetric(4);
        for x in g.elements() {
            let h = subgroup_generated(&g, &[x, g.generators()[0]]).unwrap();
            let again = subgroup_generated(&g, h.members()).unwrap();
            assert_eq!(h, again);
        }
    }

    #[test]
    fn s5_generation_and_normality() {
        let g = symmetric(5);
        assert_eq!(g.order(), 120);
        let t = g.generators()[0];
        let h = subgroup_generated(&g, &[t]).unwrap();
        assert!(!is_normal(&g, &h));
        // Squares generate A5, an index-2 subgroup.
        let squares: Vec<Elem> = g.elements().map(|x| g.mul(x, x)).collect();
        let a5 = subgroup_generated(&g, &squares).unwrap();
        assert_eq!(a5.order(), 60);
        assert!(is_normal(&g, &a5));
        let normals = normal_subgroups(&g);
        let orders: Vec<usize> = normals.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 60, 120]);
        assert!(normals.iter().all(|n| is_normal(&g, n)));
    }

    #[test]
    fn trivial_group_has_one_normal_subgroup() {
        let g = FiniteGroup::from_table("C1", vec![0], vec![], Naming::Vector(vec![1])).unwrap();
        assert_eq!(normal_subgroups(&g).len(), 1);
    }

    #[test]
    fn quotients_of_elementary_abelian_groups() {
        let g = cyclic_power(5, 2);
        let e2 = g.element_from_vector(&[0, 1]).unwrap();
        let k = subgroup_generated(&g, &[e2]).unwrap();
        let q = quotient(&g, &k).unwrap();
        assert_eq!(q.group.order(), 5);
        let g3 = cyclic_power(5, 3);
        let e3 = g3.element_from_vector(&[0, 0, 1]).unwrap();
        let q3 = quotient(&g3, &subgroup_generated(&g3, &[e3]).unwrap()).unwrap();
        assert_eq!(q3.group.order(), 25);
        let id = quotient(&g, &Subgroup::trivial(&g)).unwrap();
        let mut seen = id.projection.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 25);
    }

    #[test]
    fn quotient_projection_is_a_homomorphism() {
        let g = symmetric(4);
        for k in normal_subgroups(&g) {
            let q = quotient(&g, &k).unwrap();
            assert_eq!(g.order(), k.order() * q.group.order());
            for x in g.elements() {
                for y in g.elements() {
                    assert_eq!(q.project(g.mul(x, y)), q.group.mul(q.project(x), q.project(y)));
                }
            }
            let fiber: Vec<Elem> = g.elements().filter(|&x| q.project(x) == 0).collect();
            assert_eq!(fiber, k.members());
        }
    }

    #[test]
    fn quotient_by_non_normal_subgroup_is_rejected() {
        let g = symmetric(3);
        let h = subgroup_generated(&g, &[g.generators()[0]]).unwrap();
        assert!(matches!(quotient(&g, &h), Err(Error::Contract(_))));
    }

    #[test]
    fn bad_tables_are_rejected() {
        // Not associative: a Latin square of order 5 that is not a group.
        let table = vec![
            0, 1, 2, 3, 4, //
            1, 0, 3, 4, 2, //
            2, 4, 0, 1, 3, //
            3, 2, 4, 0, 1, //
            4, 3, 1, 2, 0,
        ];
        assert!(FiniteGroup::from_table("bad", table, vec![1, 2], Naming::Words).is_err());
    }

    #[test]
    fn element_orders_divide_group_order() {
        let g = symmetric(5);
        for x in g.elements() {
            assert_eq!(g.order() % g.element_order(x) as usize, 0);
            assert_eq!(g.pow(x, g.element_order(x) as i64), 0);
            assert_eq!(g.mul(x, g.inv(x)), 0);
        }
    }

    #[test]
    fn cycle_notation_renders() {
        assert_eq!(cycle_notation(&[1, 2, 0, 4, 3]), "(1,2,3)(4,5)");
        assert_eq!(cycle_notation(&[0, 1]), "()");
    }
}
