use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use torus_indep::isoperimetry::{verify_theorem_exhaustive, verify_theorem_sampled};
use torus_indep::polymer::l_r;
use torus_indep::{count_brute, count_transfer, enumerate_maximum, Caps, ClassIndex};
use torus_indep_bench::{polymer_model, torus};

fn counting(c: &mut Criterion) {
    let caps = Caps::default();
    let mut group = c.benchmark_group("count");
    for (m, n) in [(3, 3), (5, 2)] {
        let g = torus(m, n);
        group.bench_with_input(BenchmarkId::new("brute", format!("{m}^{n}")), &g, |b, g| {
            b.iter(|| count_brute(black_box(g), false, &caps).unwrap())
        });
    }
    for (m, n) in [(3, 3), (5, 2), (3, 4), (5, 3), (9, 2)] {
        let g = torus(m, n);
        group.bench_with_input(BenchmarkId::new("transfer", format!("{m}^{n}")), &g, |b, g| {
            b.iter(|| count_transfer(black_box(g), true, &caps).unwrap())
        });
    }
    group.finish();
}

fn maximum_sets(c: &mut Criterion) {
    let caps = Caps::default();
    let g = torus(3, 4);
    c.bench_function("maxis/3^4", |b| b.iter(|| enumerate_maximum(black_box(&g), false, &caps).unwrap()));
}

fn clusters(c: &mut Criterion) {
    let caps = Caps::default();
    let mut group = c.benchmark_group("cluster_l2");
    for (m, n) in [(5, 2), (5, 3), (7, 3)] {
        let pm = polymer_model(m, n);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{m}^{n}")), &pm, |b, pm| {
            b.iter(|| l_r(black_box(pm), 2, &caps).unwrap())
        });
    }
    group.finish();
}

fn isoperimetry(c: &mut Criterion) {
    let caps = Caps::default();
    let mut group = c.benchmark_group("isoperimetry");
    group.sample_size(10);
    let g = torus(3, 3);
    group.bench_function("exhaustive/3^3", |b| {
        b.iter(|| verify_theorem_exhaustive(black_box(&g), ClassIndex(0), 1, &caps).unwrap())
    });
    let g = torus(5, 3);
    group.bench_function("exhaustive/5^3", |b| {
        b.iter(|| verify_theorem_exhaustive(black_box(&g), ClassIndex(0), 1, &caps).unwrap())
    });
    let g = torus(3, 6);
    group.bench_function("sampled_10k/3^6", |b| {
        b.iter(|| verify_theorem_sampled(black_box(&g), ClassIndex(0), 1, 10_000, 7).unwrap())
    });
    group.finish();
}

criterion_group!(benches, counting, maximum_sets, clusters, isoperimetry);
criterion_main!(benches);
