//! The fiber route and the brute-force enumeration agree on every instance small enough for both.

use beauville::beauville::{Constraints, Context, KernelPolicy};
use beauville::catalog::group;
use beauville::oracle::{oracle_classify, OracleScope};
use beauville::verify::oracle_agrees;
use beauville::Limits;

fn agree(spec: &str, n: usize, constraints: Constraints) -> usize {
    let g = group(spec).unwrap();
    let limits = Limits::default();
    let ctx = Context::new(&g, limits);
    let fiber = ctx.classify(n, &constraints).unwrap();
    let oracle = oracle_classify(&g, n, &constraints, &OracleScope::Full, &limits).unwrap();
    assert!(oracle_agrees(&ctx, &fiber, &oracle), "{spec}, n = {n}: fiber {} vs brute force {}", fiber.total(), oracle.total());
    fiber.total()
}

#[test]
fn surfaces() {
    assert_eq!(agree("C5^2", 2, Constraints::default()), 1);
    assert!(agree("C7^2", 2, Constraints::default()) > 0);
    assert_eq!(agree("C3^2", 2, Constraints::default()), 0);
    agree("He(3)", 2, Constraints::default());
}

#[test]
fn threefolds() {
    assert_eq!(agree("C5^2", 3, Constraints { chi: Some(-1), ..Default::default() }), 8);
    assert_eq!(agree("C5^2", 3, Constraints { kernels: KernelPolicy::Trivial, ..Default::default() }), 77);
    assert_eq!(agree("C3^3", 3, Constraints::default()), 0);
    assert_eq!(agree("C2^3", 3, Constraints::default()), 0);
}

#[test]
fn fourfolds_on_small_groups() {
    // chi = 1 forces two trivial and two cyclic kernels, so both kinds of block move occur.
    assert!(agree("C5^2", 4, Constraints { chi: Some(1), ..Default::default() }) > 0);
}
