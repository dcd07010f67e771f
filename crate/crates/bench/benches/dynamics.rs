use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jclab_bench::{kt_grid, unit_params};
use jclab_core::{
    bell_max, concurrence, evolve_lindblad, joint_state, scalar_profile, truncation_policy,
    two_qubit_report, BlochAngles,
};

fn closed_form(c: &mut Criterion) {
    let params = unit_params();
    let grid = kt_grid(301);
    c.bench_function("scalar_profile/301", |b| {
        b.iter(|| {
            for &kt in &grid {
                black_box(scalar_profile(&params, black_box(kt)).unwrap());
            }
        })
    });
    c.bench_function("joint_state", |b| b.iter(|| joint_state(&params, black_box(1.0)).unwrap()));
    let state = joint_state(&params, 1.0).unwrap();
    c.bench_function("concurrence", |b| b.iter(|| concurrence(black_box(&state)).unwrap()));
    c.bench_function("bell_max", |b| b.iter(|| bell_max(black_box(&state))));
    let input = BlochAngles::new(1.0, 0.5).unwrap();
    c.bench_function("two_qubit_report", |b| {
        b.iter(|| two_qubit_report(&params, black_box(1.0), &input).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("evolve_lindblad");
    group.sample_size(10);
    let params = unit_params();
    let n = truncation_policy(&params, 1.0).unwrap();
    for kt in [0.5, 1.0] {
        group.bench_with_input(BenchmarkId::from_parameter(kt), &kt, |b, &kt| {
            b.iter(|| evolve_lindblad(&params, kt, n, 1e-10).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, closed_form, oracle);
criterion_main!(benches);
