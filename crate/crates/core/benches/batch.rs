use std::hint::black_box;

use chainprover::batch::{map_sequential, par_map};
use chainprover::harness::{generate_fixtures, RunConfig};
use chainprover::verifier::{Category, Instance, Verifier};
use criterion::{criterion_group, criterion_main, Criterion};

fn instances() -> Vec<Instance> {
    let cfg = RunConfig {
        seed: Some(7),
        ..RunConfig::default()
    };
    let kinds = [Category::T1, Category::T2, Category::T3, Category::T4];
    generate_fixtures(&cfg, &kinds, 25)
        .expect("fixtures generate")
        .iter()
        .map(|r| r.to_instance().expect("fixtures carry FOL"))
        .collect()
}

fn verify_batch(c: &mut Criterion) {
    let items = instances();
    let v = Verifier::default();
    let mut group = c.benchmark_group("verify_100_fixtures");
    group.sample_size(20);
    group.bench_function("sequential", |b| {
        b.iter(|| map_sequential(black_box(&items), |i| v.verify_instance(i)))
    });
    group.bench_function("parallel", |b| {
        b.iter(|| par_map(black_box(&items), |i| v.verify_instance(i)))
    });
    group.finish();
}

criterion_group!(benches, verify_batch);
criterion_main!(benches);
