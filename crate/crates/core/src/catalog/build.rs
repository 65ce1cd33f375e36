//! Deterministic constructors behind [`build`].

use crate::catalog::groupfile::load_group_file;
use crate::catalog::parse::{GroupSpec, SpecNode, Word};
use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup, Naming};
use crate::limits::Limits;

/// Builds the group described by `spec`. Identical specs yield identical Cayley tables.
pub fn build(spec: &GroupSpec, limits: &Limits) -> Result<FiniteGroup> {
    let mut g = build_node(&spec.ast, limits)?;
    g.set_label(spec.ast.to_string());
    Ok(g)
}

/// Parses and builds in one step.
pub fn group(text: &str) -> Result<FiniteGroup> {
    build(&crate::catalog::parse_group_spec(text)?, &Limits::from_env())
}

fn check_order(what: &str, order: u128, limits: &Limits) -> Result<()> {
    if order > limits.max_order as u128 {
        return Err(Error::Resource(format!(
            "{what} has order {order}, above the bound {}",
            limits.max_order
        )));
    }
    Ok(())
}

fn build_node(node: &SpecNode, limits: &Limits) -> Result<FiniteGroup> {
    match node {
        SpecNode::Cyclic(n) => {
            if *n == 0 {
                return Err(Error::Input("cyclic group of order 0".into()));
            }
            check_order(&node.to_string(), *n as u128, limits)?;
            abelian(&[*n])
        }
        SpecNode::Power(base, k) => {
            if let SpecNode::Cyclic(n) = **base {
                if n == 0 {
                    return Err(Error::Input("cyclic group of order 0".into()));
                }
                check_order(&node.to_string(), (n as u128).saturating_pow(*k), limits)?;
                return abelian(&vec![n; *k as usize]);
            }
            let b = build_node(base, limits)?;
            check_order(&node.to_string(), (b.order() as u128).saturating_pow(*k), limits)?;
            let mut acc = trivial();
            for _ in 0..*k {
                acc = direct_product(&acc, &b)?;
            }
            Ok(acc)
        }
        SpecNode::Product(factors) => {
            if factors.iter().all(|f| abelian_moduli(f).is_some()) {
                let moduli: Vec<u32> = factors.iter().flat_map(|f| abelian_moduli(f).unwrap()).collect();
                let order = moduli.iter().fold(1u128, |acc, &m| acc.saturating_mul(m as u128));
                check_order(&node.to_string(), order, limits)?;
                if moduli.contains(&0) {
                    return Err(Error::Input("cyclic group of order 0".into()));
                }
                return abelian(&moduli);
            }
            let built: Vec<FiniteGroup> = factors.iter().map(|f| build_node(f, limits)).collect::<Result<_>>()?;
            let order = built.iter().fold(1u128, |acc, g| acc.saturating_mul(g.order() as u128));
            check_order(&node.to_string(), order, limits)?;
            let mut acc = trivial();
            for g in &built {
                acc = direct_product(&acc, g)?;
            }
            Ok(acc)
        }
        SpecNode::Symmetric(n) => symmetric(*n, limits),
        SpecNode::Alternating(n) => alternating(*n, limits),
        SpecNode::Dihedral(n) => dihedral(*n, limits),
        SpecNode::Dicyclic(n) => dicyclic(*n, limits),
        SpecNode::Heisenberg(p) => heisenberg(*p, limits),
        SpecNode::Psl(d, q) => linear(*d, *q, true, limits),
        SpecNode::Sl(d, q) => linear(*d, *q, false, limits),
        SpecNode::Semidirect { normal, acting, action } => {
            let a = build_node(normal, limits)?;
            let b = build_node(acting, limits)?;
            semidirect(&a, &b, action, limits)
        }
        SpecNode::Permutations(gens) => permutation_literal(gens, limits),
        SpecNode::File(path) => load_group_file(std::path::Path::new(path), limits),
    }
}

fn abelian_moduli(node: &SpecNode) -> Option<Vec<u32>> {
    match node {
        SpecNode::Cyclic(n) => Some(vec![*n]),
        SpecNode::Power(base, k) => match **base {
            SpecNode::Cyclic(n) => Some(vec![n; *k as usize]),
            _ => None,
        },
        _ => None,
    }
}

fn trivial() -> FiniteGroup {
    FiniteGroup::from_table("C1", vec![0], vec![], Naming::Vector(vec![])).expect("trivial group")
}

/// `ℤ_{n1} × … × ℤ_{nk}` with mixed-radix indices and generators `e_i`.
fn abelian(moduli: &[u32]) -> Result<FiniteGroup> {
    let order: usize = moduli.iter().map(|&m| m as usize).product();
    let mut radix = Vec::with_capacity(moduli.len());
    let mut r = 1usize;
    for &m in moduli {
        radix.push(r);
        r *= m as usize;
    }
    let digits = |x: usize| -> Vec<usize> {
        moduli.iter().zip(&radix).map(|(&m, &rd)| (x / rd) % m as usize).collect()
    };
    let all: Vec<Vec<usize>> = (0..order).map(digits).collect();
    let mut table = vec![0 as Elem; order * order];
    for x in 0..order {
        for y in 0..order {
            let mut z = 0;
            for (i, &m) in moduli.iter().enumerate() {
                z += ((all[x][i] + all[y][i]) % m as usize) * radix[i];
            }
            table[x * order + y] = z as Elem;
        }
    }
    let generators: Vec<Elem> = moduli
        .iter()
        .zip(&radix)
        .filter(|(&m, _)| m > 1)
        .map(|(_, &rd)| rd as Elem)
        .collect();
    FiniteGroup::from_table("", table, generators, Naming::Vector(moduli.to_vec()))
}

/// `A × B`, indexed `a + |A|·b`, with A's generators followed by B's.
pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<FiniteGroup> {
    let (na, nb) = (a.order(), b.order());
    let n = na * nb;
    let mut table = vec![0 as Elem; n * n];
    for x in 0..n {
        let (xa, xb) = ((x % na) as Elem, (x / na) as Elem);
        for y in 0..n {
            let (ya, yb) = ((y % na) as Elem, (y / na) as Elem);
            table[x * n + y] = a.mul(xa, ya) + na as Elem * b.mul(xb, yb);
        }
    }
    let mut generators: Vec<Elem> = a.generators().to_vec();
    generators.extend(b.generators().iter().map(|&g| g * na as Elem));
    let naming = match (a.naming(), b.naming()) {
        (Naming::Vector(ma), Naming::Vector(mb)) => Naming::Vector(ma.iter().chain(mb).copied().collect()),
        _ => Naming::Words,
    };
    FiniteGroup::from_table(format!("{} x {}", a.label(), b.label()), table, generators, naming)
}

/// Composition of permutations as maps on points: apply `p` first, then `q`.
fn compose(p: &[u32], q: &[u32]) -> Vec<u32> {
    p.iter().map(|&i| q[i as usize]).collect()
}

fn permutation_group(
    label: &str,
    degree: usize,
    gens: &[Vec<u32>],
    limits: &Limits,
) -> Result<FiniteGroup> {
    let identity: Vec<u32> = (0..degree as u32).collect();
    let gens: Vec<Vec<u32>> = gens.iter().filter(|g| **g != identity).cloned().collect();
    let (mut g, elements) = FiniteGroup::from_closure(label, identity, &gens, |p, q| compose(p, q), limits.max_order)?;
    g.set_naming(Naming::Permutation(elements));
    Ok(g)
}

fn cycle_perm(degree: usize, cycles: &[Vec<u32>]) -> Vec<u32> {
    let mut p: Vec<u32> = (0..degree as u32).collect();
    for c in cycles {
        for (i, &pt) in c.iter().enumerate() {
            p[pt as usize - 1] = c[(i + 1) % c.len()] - 1;
        }
    }
    p
}

/// Permutation of `{1..degree}` from cycles, rejecting points out of range and repeated points.
pub(crate) fn perm_from_cycles(degree: usize, cycles: &[Vec<u32>]) -> std::result::Result<Vec<u32>, String> {
    let mut used = vec![false; degree + 1];
    for c in cycles {
        for &pt in c {
            if pt == 0 || pt as usize > degree {
                return Err(format!("point {pt} outside 1..{degree}"));
            }
            if std::mem::replace(&mut used[pt as usize], true) {
                return Err(format!("point {pt} repeated"));
            }
        }
    }
    Ok(cycle_perm(degree, cycles))
}

fn symmetric(n: u32, limits: &Limits) -> Result<FiniteGroup> {
    let d = n.max(1) as usize;
    let mut gens = Vec::new();
    if n >= 2 {
        gens.push(cycle_perm(d, &[vec![1, 2]]));
    }
    if n >= 3 {
        gens.push(cycle_perm(d, &[(1..=n).collect()]));
    }
    permutation_group(&format!("S{n}"), d, &gens, limits)
}

fn alternating(n: u32, limits: &Limits) -> Result<FiniteGroup> {
    let d = n.max(1) as usize;
    let mut gens = Vec::new();
    if n >= 3 {
        gens.push(cycle_perm(d, &[vec![1, 2, 3]]));
    }
    if n >= 4 {
        let long: Vec<u32> = if n % 2 == 1 { (1..=n).collect() } else { (2..=n).collect() };
        gens.push(cycle_perm(d, &[long]));
    }
    permutation_group(&format!("A{n}"), d, &gens, limits)
}

/// Dihedral group of order `2n`: index `k + n·e` is `r^k s^e`; generators `r, s`.
fn dihedral(n: u32, limits: &Limits) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::Input("dihedral group needs n ≥ 1".into()));
    }
    check_order(&format!("D{n}"), 2 * n as u128, limits)?;
    let n = n as usize;
    let order = 2 * n;
    let mut table = vec![0 as Elem; order * order];
    for x in 0..order {
        let (i, e) = (x % n, x / n);
        for y in 0..order {
            let (j, f) = (y % n, y / n);
            let k = if e == 0 { (i + j) % n } else { (i + n - j) % n };
            table[x * order + y] = (k + n * ((e + f) % 2)) as Elem;
        }
    }
    let mut generators = Vec::new();
    if n > 1 {
        generators.push(1);
    }
    generators.push(n as Elem);
    FiniteGroup::from_table(format!("D{n}"), table, generators, Naming::Words)
}

/// Dicyclic group of order `4n`: `⟨x, y | x^{2n}, y² = x^n, y x y⁻¹ = x⁻¹⟩`,
/// index `k + 2n·e` is `x^k y^e`.
fn dicyclic(n: u32, limits: &Limits) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::Input("dicyclic group needs n ≥ 1".into()));
    }
    check_order(&format!("Q{n}"), 4 * n as u128, limits)?;
    let m = 2 * n as usize;
    let order = 2 * m;
    let mut table = vec![0 as Elem; order * order];
    for x in 0..order {
        let (i, e) = (x % m, x / m);
        for y in 0..order {
            let (j, f) = (y % m, y / m);
            // x^i y^e · x^j y^f = x^{i ± j} y^{e+f}, with y² = x^n.
            let k = if e == 0 { i + j } else { i + m - j };
            let (k, s) = if e == 1 && f == 1 { (k + n as usize, 0) } else { (k, e + f) };
            table[x * order + y] = ((k % m) + m * s) as Elem;
        }
    }
    FiniteGroup::from_table(format!("Q{n}"), table, vec![1, m as Elem], Naming::Words)
}

/// Upper unitriangular 3×3 matrices over `𝔽_p`; `(x, y, z)` stands for
/// `[[1,x,z],[0,1,y],[0,0,1]]`, index `x + p·y + p²·z`, generators `(1,0,0), (0,1,0)`.
fn heisenberg(p: u32, limits: &Limits) -> Result<FiniteGroup> {
    if !is_prime(p) {
        return Err(Error::Input(format!("He(p) needs a prime, got {p}")));
    }
    check_order(&format!("He({p})"), (p as u128).pow(3), limits)?;
    let p = p as usize;
    let order = p * p * p;
    let mut table = vec![0 as Elem; order * order];
    for a in 0..order {
        let (x1, y1, z1) = (a % p, (a / p) % p, a / (p * p));
        for b in 0..order {
            let (x2, y2, z2) = (b % p, (b / p) % p, b / (p * p));
            let x = (x1 + x2) % p;
            let y = (y1 + y2) % p;
            let z = (z1 + z2 + x1 * y2) % p;
            table[a * order + b] = (x + p * y + p * p * z) as Elem;
        }
    }
    FiniteGroup::from_table(format!("He({p})"), table, vec![1, p as Elem], Naming::Words)
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `SL(2,q)` or `PSL(2,q)` for a prime `q ≤ 13`, generated by `[[1,1],[0,1]]` and `[[0,-1],[1,0]]`.
fn linear(d: u32, q: u32, projective: bool, limits: &Limits) -> Result<FiniteGroup> {
    let name = if projective { format!("PSL({d},{q})") } else { format!("SL({d},{q})") };
    if d != 2 {
        return Err(Error::Unsupported(format!("{name}: only 2×2 matrices are supported")));
    }
    if !is_prime(q) || q > 13 {
        return Err(Error::Unsupported(format!("{name}: q must be a prime ≤ 13")));
    }
    let q = q as i64;
    let canon = |m: [i64; 4]| -> [i64; 4] {
        let m = m.map(|v| v.rem_euclid(q));
        if projective {
            let neg = m.map(|v| (q - v) % q);
            if neg < m {
                return neg;
            }
        }
        m
    };
    let mul = |a: &[i64; 4], b: &[i64; 4]| {
        canon([
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ])
    };
    let gens = [canon([1, 1, 0, 1]), canon([0, q - 1, 1, 0])];
    let (g, _) = FiniteGroup::from_closure(name, canon([1, 0, 0, 1]), &gens, mul, limits.max_order)?;
    Ok(g)
}

fn permutation_literal(gens: &[Vec<Vec<u32>>], limits: &Limits) -> Result<FiniteGroup> {
    let degree = gens.iter().flatten().flatten().copied().max().unwrap_or(1).max(1) as usize;
    let perms: Vec<Vec<u32>> = gens
        .iter()
        .map(|cycles| perm_from_cycles(degree, cycles).map_err(Error::Input))
        .collect::<Result<_>>()?;
    permutation_group("Perm", degree, &perms, limits)
}

/// Evaluates a word in the construction generators of `g`.
pub fn eval_word(g: &FiniteGroup, word: &Word) -> Result<Elem> {
    let mut x = 0;
    for &(i, e) in &word.0 {
        let gen = *g.generators().get(i as usize - 1).ok_or_else(|| {
            Error::Validation(format!("{} has {} generators, a{i} is undefined", g.label(), g.generators().len()))
        })?;
        x = g.mul(x, g.pow(gen, e));
    }
    Ok(x)
}

/// `A ⋊ B` with `action[j][i]` the image of A-generator `i` under B-generator `j`.
/// Elements are `(a, b)` indexed `a + |A|·b` with `(a1,b1)(a2,b2) = (a1·φ_{b1}(a2), b1·b2)`.
fn semidirect(a: &FiniteGroup, b: &FiniteGroup, action: &[Vec<Word>], limits: &Limits) -> Result<FiniteGroup> {
    let (na, nb) = (a.order(), b.order());
    check_order("semidirect product", na as u128 * nb as u128, limits)?;
    if action.len() != b.generators().len() {
        return Err(Error::Validation(format!(
            "action lists {} rows but the acting group has {} generators",
            action.len(),
            b.generators().len()
        )));
    }
    let mut gen_maps: Vec<Vec<Elem>> = Vec::with_capacity(action.len());
    for (j, row) in action.iter().enumerate() {
        if row.len() != a.generators().len() {
            return Err(Error::Validation(format!(
                "action row {} has {} images but the normal factor has {} generators",
                j + 1,
                row.len(),
                a.generators().len()
            )));
        }
        let images: Vec<Elem> = row.iter().map(|w| eval_word(a, w)).collect::<Result<_>>()?;
        let map = crate::morphisms::extend_hom(a, a, a.generators(), &images).ok_or_else(|| {
            Error::Validation(format!("action of generator {} does not define a homomorphism", j + 1))
        })?;
        let mut seen = vec![false; na];
        for &y in &map {
            seen[y as usize] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Validation(format!("action of generator {} is not bijective", j + 1)));
        }
        gen_maps.push(map);
    }
    // φ: B → Aut(A) by breadth-first extension, φ(x·b_j) = φ(x) ∘ φ(b_j).
    let mut phi: Vec<Option<Vec<Elem>>> = vec![None; nb];
    phi[0] = Some((0..na as Elem).collect());
    let mut queue = std::collections::VecDeque::from([0 as Elem]);
    while let Some(x) = queue.pop_front() {
        let px = phi[x as usize].clone().expect("queued elements have maps");
        for (j, &bj) in b.generators().iter().enumerate() {
            let y = b.mul(x, bj);
            let composed: Vec<Elem> = gen_maps[j].iter().map(|&t| px[t as usize]).collect();
            match &phi[y as usize] {
                Some(existing) if *existing != composed => {
                    return Err(Error::Validation(
                        "action does not respect the relations of the acting group".into(),
                    ))
                }
                Some(_) => {}
                None => {
                    phi[y as usize] = Some(composed);
                    queue.push_back(y);
                }
            }
        }
    }
    let phi: Vec<Vec<Elem>> = phi.into_iter().map(|m| m.expect("B is generated by its generators")).collect();
    let n = na * nb;
    let mut table = vec![0 as Elem; n * n];
    for x in 0..n {
        let (a1, b1) = ((x % na) as Elem, x / na);
        for y in 0..n {
            let (a2, b2) = ((y % na) as Elem, (y / na) as Elem);
            let ap = a.mul(a1, phi[b1][a2 as usize]);
            let bp = b.mul(b1 as Elem, b2);
            table[x * n + y] = ap + na as Elem * bp;
        }
    }
    let mut generators: Vec<Elem> = a.generators().to_vec();
    generators.extend(b.generators().iter().map(|&g| g * na as Elem));
    FiniteGroup::from_table("Semidirect", table, generators, Naming::Words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::parse_group_spec;

    fn g(text: &str) -> FiniteGroup {
        build(&parse_group_spec(text).unwrap(), &Limits::default()).unwrap()
    }

    #[test]
    fn catalog_orders() {
        for (spec, order) in [
            ("C1", 1),
            ("C5^2", 25),
            ("C5^3", 125),
            ("S5", 120),
            ("A5", 60),
            ("A4", 12),
            ("D4", 8),
            ("Q2", 8),
            ("He(3)", 27),
            ("He(5)", 125),
            ("PSL(2,7)", 168),
            ("SL(2,5)", 120),
            ("PSL(2,5)", 60),
            ("PSL(2,2)", 6),
            ("S3 x C2^2", 24),
            ("Perm[(1,2,3,4,5), (1,2)]", 120),
        ] {
            assert_eq!(g(spec).order(), order, "{spec}");
        }
    }

    #[test]
    fn elementary_abelian_uses_mixed_radix() {
        let z = g("C5^2");
        assert_eq!(z.element_order(0), 1);
        assert!((1..25).all(|x| z.element_order(x) == 5));
        assert_eq!(z.generators(), &[1, 5]);
        assert_eq!(z.element_from_vector(&[4, 4]), Some(24));
        assert_eq!(z.generated_order(z.generators()), 25);
        let mixed = g("C2 x C6");
        assert_eq!(mixed.element_from_vector(&[1, 2]), Some(1 + 2 * 2));
    }

    #[test]
    fn builds_are_deterministic() {
        for spec in ["PSL(2,7)", "S4", "Semidirect(C7, C3, [[a1^2]])", "He(3) x C2"] {
            assert_eq!(g(spec).table(), g(spec).table(), "{spec}");
        }
    }

    #[test]
    fn nonabelian_constructions() {
        assert!(!g("D5").is_abelian());
        assert!(!g("Q2").is_abelian());
        assert!(!g("He(5)").is_abelian());
        let f21 = g("Semidirect(C7, C3, [[a1^2]])");
        assert_eq!(f21.order(), 21);
        assert!(!f21.is_abelian());
        let q8 = g("Q2");
        assert_eq!((1..8).filter(|&x| q8.element_order(x) == 2).count(), 1);
        let he = g("He(5)");
        assert!((1..125).all(|x| he.element_order(x) == 5));
    }

    #[test]
    fn invalid_semidirect_actions_are_rejected() {
        let limits = Limits::default();
        // x ↦ x³ has order 6 mod 7, so it is not an action of C3.
        let spec = parse_group_spec("Semidirect(C7, C3, [[a1^3]])").unwrap();
        assert!(matches!(build(&spec, &limits), Err(Error::Validation(_))));
        let spec = parse_group_spec("Semidirect(C7, C3, [[1]])").unwrap();
        assert!(matches!(build(&spec, &limits), Err(Error::Validation(_))));
        let spec = parse_group_spec("Semidirect(C5^2, C2, [[a1]])").unwrap();
        assert!(matches!(build(&spec, &limits), Err(Error::Validation(_))));
    }

    #[test]
    fn order_bound_is_enforced() {
        let tight = Limits { max_order: 100, ..Limits::default() };
        let spec = parse_group_spec("C5^3").unwrap();
        assert!(matches!(build(&spec, &tight), Err(Error::Resource(_))));
        let spec = parse_group_spec("S5").unwrap();
        assert!(matches!(build(&spec, &tight), Err(Error::Resource(_))));
        let spec = parse_group_spec("PSL(2,17)").unwrap();
        assert!(matches!(build(&spec, &Limits::default()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn standard_basis_of_cyclic_powers() {
        for (n, k) in [(2u32, 3u32), (5, 2), (7, 2), (3, 3)] {
            let z = g(&format!("C{n}^{k}"));
            assert_eq!(z.generators().len(), k as usize);
            for &e in z.generators() {
                assert_eq!(z.element_order(e), n);
            }
            assert_eq!(z.generated_order(z.generators()), z.order());
        }
    }
}
