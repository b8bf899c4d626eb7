use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use birif::{catalog, slice_norm, taylor_coeffs, QuadGrid, Var};

fn bench_slice_norm(c: &mut Criterion) {
    let kappa = catalog::kappa();
    let grid = QuadGrid::new(32, 128);
    c.bench_function("slice_norm kappa n=1 alpha=1 (32x128)", |b| {
        b.iter(|| slice_norm(black_box(&kappa), Var::Z1, 1, 1.0, &grid).unwrap())
    });
}

fn bench_taylor(c: &mut Criterion) {
    let kappa = catalog::kappa();
    c.bench_function("taylor_coeffs kappa 256x256", |b| {
        b.iter(|| taylor_coeffs(black_box(&kappa), 256, 256).unwrap())
    });
}

fn bench_douglas(c: &mut Criterion) {
    c.bench_function("douglas_1d z^4 alpha=1 A=512", |b| {
        b.iter(|| birif::quadnorms::douglas_1d(|z| black_box(z).powu(4), 1.0, 512).unwrap())
    });
}

criterion_group!(benches, bench_slice_norm, bench_taylor, bench_douglas);
criterion_main!(benches);
