//! Randomized invariants of the braid and automorphism actions and the numerical formulas.

use std::sync::OnceLock;

use beauville::beauville::{BeauvilleStructure, Constraints, Context};
use beauville::braid::{apply_aut, apply_braid, BraidMove, ClassTable};
use beauville::catalog::group;
use beauville::group::quotient;
use beauville::invariants::{compute_invariants, hurwitz_bound};
use beauville::morphisms::{automorphism_group, AutomorphismGroup, NormalLattice};
use beauville::triples::{enumerate_triples, genus, sorted, stabilizer_set, triple_type, Triple};
use beauville::{FiniteGroup, Limits};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Fixture {
    h: FiniteGroup,
    aut: AutomorphismGroup,
    triples: Vec<Triple>,
}

fn fixtures() -> &'static [Fixture] {
    static CELL: OnceLock<Vec<Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        ["C5^2", "S5", "PSL(2,7)", "He(3)", "A5"]
            .iter()
            .map(|s| {
                let h = group(s).unwrap();
                let aut = automorphism_group(&h);
                let triples = enumerate_triples(&h, None);
                Fixture { h, aut, triples }
            })
            .collect()
    })
}

fn word() -> impl Strategy<Value = Vec<BraidMove>> {
    prop::collection::vec(prop::sample::select(BraidMove::ALL.to_vec()), 0..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn braid_relation_and_inverses(which in 0..5usize, idx in any::<prop::sample::Index>(), w in word()) {
        let f = &fixtures()[which];
        let t = *idx.get(&f.triples);
        let s1 = |x| apply_braid(&f.h, BraidMove::Sigma1, x);
        let s2 = |x| apply_braid(&f.h, BraidMove::Sigma2, x);
        prop_assert_eq!(s1(s2(s1(t))), s2(s1(s2(t))));
        let mut u = t;
        for &m in &w {
            u = apply_braid(&f.h, m, u);
        }
        for &m in w.iter().rev() {
            u = apply_braid(&f.h, m.inverse(), u);
        }
        prop_assert_eq!(u, t);
    }

    #[test]
    fn orbit_invariants(which in 0..5usize, idx in any::<prop::sample::Index>(), w in word(), seed in any::<u64>()) {
        let f = &fixtures()[which];
        let t = *idx.get(&f.triples);
        let mut u = t;
        for &m in &w {
            u = apply_braid(&f.h, m, u);
        }
        prop_assert_eq!(sorted(triple_type(&f.h, u)), sorted(triple_type(&f.h, t)));
        prop_assert_eq!(stabilizer_set(&f.h, u), stabilizer_set(&f.h, t));
        let phi = f.aut.random(&mut ChaCha8Rng::seed_from_u64(seed));
        let v = apply_aut(&phi, t);
        prop_assert!(f.triples.contains(&v));
        prop_assert_eq!(triple_type(&f.h, v), triple_type(&f.h, t));
        let moved: Vec<usize> = stabilizer_set(&f.h, t).ones().map(|x| phi.apply(x as u32) as usize).collect();
        let mut moved = moved;
        moved.sort_unstable();
        prop_assert_eq!(stabilizer_set(&f.h, v).ones().collect::<Vec<_>>(), moved);
    }

    #[test]
    fn hurwitz_formula_is_integral_on_real_types(which in 0..5usize, idx in any::<prop::sample::Index>()) {
        let f = &fixtures()[which];
        let t = *idx.get(&f.triples);
        prop_assert!(genus(f.h.order(), triple_type(&f.h, t)).is_ok());
    }

    #[test]
    fn invariant_formulas(n in 1usize..6, genera in prop::collection::vec(2u64..40, 1..6), order in 1u64..60) {
        let genera: Vec<u64> = genera.into_iter().cycle().take(n).collect();
        let product: i128 = genera.iter().map(|&g| g as i128 - 1).product();
        match compute_invariants(order, &genera) {
            Ok(inv) => {
                let sign: i128 = if n % 2 == 0 { 1 } else { -1 };
                prop_assert_eq!(inv.chi as i128 * order as i128, sign * product);
                let factorial: i128 = (1..=n as i128).product();
                prop_assert_eq!(inv.self_intersection as i128, sign * factorial * (1i128 << n) * inv.chi as i128);
                prop_assert_eq!(inv.euler as i128, (1i128 << n) * inv.chi as i128);
                prop_assert_eq!(inv.kodaira, n);
            }
            Err(_) => prop_assert!(product % order as i128 != 0),
        }
    }

    #[test]
    fn hurwitz_bound_is_the_integer_square_root(chi in -10_000i64..0) {
        let b = hurwitz_bound(chi).unwrap() as u128;
        let target = 168u128 * 168 * 21 * chi.unsigned_abs() as u128;
        prop_assert!(b * b <= target && (b + 1) * (b + 1) > target);
    }
}

#[test]
fn classes_are_unions_of_braid_orbits() {
    for f in fixtures().iter().take(3) {
        let table = ClassTable::hyperbolic(&f.h, &f.aut);
        for (i, &t) in table.triples.iter().enumerate() {
            let b = table.braid_of[i];
            for m in BraidMove::ALL {
                let j = table.index_of(apply_braid(&f.h, m, t)).unwrap();
                assert_eq!(table.braid_of[j as usize], b);
            }
            for phi in f.aut.generators() {
                let j = table.index_of(apply_aut(phi, t)).unwrap();
                assert_eq!(table.class_of_braid[table.braid_of[j as usize] as usize], table.class_of_braid[b as usize]);
            }
        }
    }
}

#[test]
fn every_quotient_projection_is_a_homomorphism() {
    for spec in ["C5^2", "S4", "D6", "Q2 x C2"] {
        let g = group(spec).unwrap();
        for k in NormalLattice::new(&g).subgroups() {
            let q = quotient(&g, k).unwrap();
            assert_eq!(q.group.order() * k.order(), g.order());
            for x in g.elements() {
                for y in g.elements() {
                    assert_eq!(q.project(g.mul(x, y)), q.group.mul(q.project(x), q.project(y)));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn freeness_is_invariant_under_the_action(class in 0..8usize, seed in any::<u64>(), perm in Just(()).prop_perturb(|_, mut r| {
        let mut p = vec![0usize, 1, 2];
        for i in (1..3).rev() { p.swap(i, (r.next_u32() as usize) % (i + 1)); }
        p
    })) {
        static CTX: OnceLock<(Context<'static>, Vec<BeauvilleStructure>)> = OnceLock::new();
        static G: OnceLock<FiniteGroup> = OnceLock::new();
        let (ctx, reps) = CTX.get_or_init(|| {
            let g = G.get_or_init(|| group("C5^2").unwrap());
            let ctx = Context::new(g, Limits::default());
            let reps = ctx
                .classify(3, &Constraints { chi: Some(-1), ..Default::default() })
                .unwrap()
                .classes
                .into_iter()
                .map(|c| c.structure)
                .collect();
            (ctx, reps)
        });
        let s = &reps[class];
        let alpha = ctx.automorphisms().random(&mut ChaCha8Rng::seed_from_u64(seed));
        let moved = ctx.act(s, &alpha, &perm);
        prop_assert!(ctx.validate(&moved).unwrap().is_valid());
        prop_assert!(ctx.equivalent(s, &moved).unwrap());
        let broken = BeauvilleStructure { kernels: vec![moved.kernels[0]; 2], triples: vec![moved.triples[0]; 2] };
        prop_assert!(!ctx.is_free(&broken).unwrap());
    }
}
