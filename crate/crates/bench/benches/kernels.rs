use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mrnls::diagnostics::energy;
use mrnls::dynamics::step;
use mrnls::groundstate::{solve_ground_state, GsMethod, GsOptions};
use mrnls_bench::{cartesian, gaussian_pair, radial};

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("transform_roundtrip");
    for n in [128, 256] {
        let p = gaussian_pair(&cartesian(n), 0.5);
        group.bench_with_input(BenchmarkId::new("cartesian", n), &p, |b, p| b.iter(|| p.grid.inverse(&p.grid.forward(black_box(&p.u)))));
    }
    for n in [256, 512] {
        let p = gaussian_pair(&radial(n), 0.5);
        group.bench_with_input(BenchmarkId::new("radial", n), &p, |b, p| b.iter(|| p.grid.inverse(&p.grid.forward(black_box(&p.u)))));
    }
    group.finish();
}

fn split_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("strang_step");
    let p = gaussian_pair(&cartesian(256), 0.5);
    group.bench_function("cartesian_256", |b| b.iter(|| step(black_box(&p), 1e-3)));
    let p = gaussian_pair(&radial(512), 0.5);
    group.bench_function("radial_512", |b| b.iter(|| step(black_box(&p), 1e-3)));
    group.finish();
}

fn diagnostics(c: &mut Criterion) {
    let p = gaussian_pair(&cartesian(256), 0.5);
    c.bench_function("energy_cartesian_256", |b| b.iter(|| energy(black_box(&p))));
}

fn ground_state(c: &mut Criterion) {
    let mut group = c.benchmark_group("ground_state");
    group.sample_size(10);
    let g = radial(256);
    group.bench_function("renormalization_radial_256", |b| {
        b.iter(|| solve_ground_state(0.5, black_box(&g), GsMethod::Renormalization, &GsOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, transforms, split_step, diagnostics, ground_state);
criterion_main!(benches);
