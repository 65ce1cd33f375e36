//! Classification and candidate search on one worker versus the full pool.

use std::hint::black_box;

use beauville::beauville::{Constraints, Context, KernelPolicy};
use beauville::catalog::group;
use beauville::invariants::candidate_tuples;
use beauville::par::with_threads;
use beauville::Limits;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn pools() -> Vec<(String, Option<usize>)> {
    vec![("sequential".into(), Some(1)), (format!("pool-{}", std::thread::available_parallelism().map_or(1, |n| n.get())), None)]
}

fn classify(c: &mut Criterion) {
    let g = group("C5^2").unwrap();
    let mut bench = c.benchmark_group("classify-c5sq-trivial");
    bench.sample_size(10);
    for (name, jobs) in pools() {
        bench.bench_function(BenchmarkId::from_parameter(&name), |b| {
            b.iter(|| {
                with_threads(jobs, || {
                    let ctx = Context::new(&g, Limits::default());
                    let constraints = Constraints { kernels: KernelPolicy::Trivial, ..Default::default() };
                    black_box(ctx.classify(3, &constraints).unwrap().total())
                })
                .unwrap()
            })
        });
    }
    bench.finish();
}

fn dimension_sweep(c: &mut Criterion) {
    let specs = ["C4 x C2", "Q2", "D6", "A4", "SL(2,3)", "S4", "C3^2", "He(3)"];
    let groups: Vec<_> = specs.iter().map(|s| group(s).unwrap()).collect();
    let mut bench = c.benchmark_group("exists-threefold");
    bench.sample_size(10);
    for (name, jobs) in pools() {
        bench.bench_function(BenchmarkId::from_parameter(&name), |b| {
            b.iter(|| {
                with_threads(jobs, || {
                    groups
                        .iter()
                        .filter(|g| Context::new(g, Limits::default()).exists(3, &Constraints::default()).unwrap())
                        .count()
                })
                .unwrap()
            })
        });
    }
    bench.finish();
}

fn candidates(c: &mut Criterion) {
    let mut bench = c.benchmark_group("candidates-chi-5");
    bench.sample_size(10);
    for (name, jobs) in pools() {
        bench.bench_function(BenchmarkId::from_parameter(&name), |b| {
            b.iter(|| with_threads(jobs, || black_box(candidate_tuples(-5).unwrap().len())).unwrap())
        });
    }
    bench.finish();
}

criterion_group!(benches, classify, dimension_sweep, candidates);
criterion_main!(benches);
